#![allow(dead_code)]

use twolayer_core::{LevyModel, PhaseType, Problem};

/// Six-phase fit to a Weibull jump law.
pub fn weibull_phase_type() -> PhaseType {
    let t = vec![
        vec![-5.6546, 0.0, 0.0, 0.0, 0.0, 0.0],
        vec![0.6066, -5.6847, 0.0, 0.0166, 0.0089, 5.0526],
        vec![0.2156, 4.3616, -5.6485, 0.9162, 0.1424, 0.0126],
        vec![5.6247, 0.0, 0.0, -5.6786, 0.0, 0.0],
        vec![0.0107, 0.0, 0.0, 5.7247, -5.7420, 0.0],
        vec![0.0136, 0.0, 0.0, 0.0024, 5.7022, -5.7183],
    ];
    let alpha = vec![0.0, 0.0007, 0.9961, 0.0, 0.0001, 0.0031];
    PhaseType::new(alpha, t).unwrap()
}

pub fn weibull_model(delta: f64) -> LevyModel {
    LevyModel::new(0.5, 0.2, 2.0, weibull_phase_type(), delta).unwrap()
}

pub const WEIBULL_Q: f64 = 0.05;

/// `rho_bar = q rho / delta` with `beta = 0.5`, `delta = 1`.
pub fn weibull_problem(rho_bar: f64) -> Problem {
    Problem::normalized(weibull_model(1.0), WEIBULL_Q, 0.5, rho_bar / WEIBULL_Q).unwrap()
}

pub fn expo_model() -> LevyModel {
    LevyModel::new(1.0, 0.0, 4.0, PhaseType::exponential(2.0).unwrap(), 0.1).unwrap()
}

pub fn expo_problem(rho: f64) -> Problem {
    Problem::normalized(expo_model(), 0.2, 0.6, rho).unwrap()
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`; `tol` is relative to the
/// first coarse estimate.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol * whole.abs().max(1.0), 22)
}

/// Centered first difference.
pub fn fd(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}
