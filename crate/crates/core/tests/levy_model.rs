mod common;

use approx::assert_relative_eq;
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use twolayer_core::{Error, LevyModel, PhaseType, Process};

/// Positive and negative roots of `a s^2 + b s + c = 0`.
fn quadratic(a: f64, b: f64, c: f64) -> (f64, f64) {
    let d = (b * b - 4.0 * a * c).sqrt();
    ((-b + d) / (2.0 * a), (-b - d) / (2.0 * a))
}

/// `alpha (-T)^{-1} 1` by Jacobi iteration on the diagonally dominant `-T`.
fn mean_by_iteration(pt: &PhaseType) -> f64 {
    let t = pt.generator();
    let m = pt.phases();
    let mut x = vec![0.0; m];
    for _ in 0..5000 {
        let mut next = vec![0.0; m];
        for i in 0..m {
            let mut s = 1.0;
            for j in 0..m {
                if j != i {
                    s += t[(i, j)] * x[j];
                }
            }
            next[i] = s / -t[(i, i)];
        }
        x = next;
    }
    (0..m).map(|i| pt.alpha()[i] * x[i]).sum()
}

#[test]
fn build_weibull_model() {
    let m = weibull_model(1.0);
    assert_relative_eq!(m.c_x(), 1.5, epsilon = 1e-15);
    assert_eq!(m.jumps().phases(), 6);
    assert!(!m.bounded_variation());
}

#[test]
fn build_exponential_model() {
    let m = expo_model();
    assert_relative_eq!(m.c_x(), 1.1, epsilon = 1e-15);
    assert_relative_eq!(m.mean_jump(), 0.5, epsilon = 1e-15);
    assert!(m.bounded_variation());
}

#[test]
fn monotone_paths_rejected() {
    let e = LevyModel::new(0.0, 0.0, 4.0, PhaseType::exponential(2.0).unwrap(), 0.1).unwrap_err();
    assert!(matches!(e, Error::SubordinatorPath { .. }));
    // with diffusion a zero drift is fine
    assert!(LevyModel::new(0.0, 0.3, 4.0, PhaseType::exponential(2.0).unwrap(), 0.1).is_ok());
}

#[test]
fn malformed_phase_type_rejected() {
    let bad_alpha = PhaseType::new(vec![0.5, 0.4], vec![vec![-1.0, 0.0], vec![0.0, -1.0]]);
    assert!(matches!(bad_alpha, Err(Error::InvalidPhaseType(_))));
    let bad_diag = PhaseType::new(vec![1.0], vec![vec![1.0]]);
    assert!(matches!(bad_diag, Err(Error::InvalidPhaseType(_))));
    let leaking = PhaseType::new(vec![1.0, 0.0], vec![vec![-1.0, 2.0], vec![0.0, -1.0]]);
    assert!(matches!(leaking, Err(Error::InvalidPhaseType(_))));
    let ragged = PhaseType::new(vec![1.0, 0.0], vec![vec![-1.0, 0.5], vec![0.0]]);
    assert!(matches!(ragged, Err(Error::InvalidPhaseType(_))));
}

#[test]
fn exponent_values() {
    let m = expo_model();
    assert_eq!(m.psi(Process::Y, 0.0).unwrap(), 0.0);
    assert_relative_eq!(m.psi(Process::Y, 1.0).unwrap(), 1.0 - 4.0 / 3.0, epsilon = 1e-14);
    assert_relative_eq!(m.psi_prime_zero(Process::Y), -1.0, epsilon = 1e-14);
    assert_relative_eq!(m.psi_prime_zero(Process::X), -0.9, epsilon = 1e-14);
    for th in [0.1, 0.5, 1.0, 2.0, 5.0] {
        for model in [expo_model(), weibull_model(1.0)] {
            let d = model.psi(Process::X, th).unwrap() - model.psi(Process::Y, th).unwrap();
            assert_relative_eq!(d, model.delta() * th, epsilon = 1e-12);
        }
    }
}

#[test]
fn pole_reported() {
    let m = expo_model();
    assert!(matches!(m.psi(Process::Y, -2.0), Err(Error::PoleAtTheta { .. })));
}

#[test]
fn derivative_matches_finite_difference() {
    for m in [expo_model(), weibull_model(1.0)] {
        for which in [Process::Y, Process::X] {
            let exact = m.psi_derivative(which, 1.0).unwrap();
            let num = fd(|t| m.psi(which, t).unwrap(), 1.0, 1e-5);
            assert!(rel_err(exact, num) < 1e-6, "{which:?}: {exact} vs {num}");
        }
    }
    let m = expo_model();
    let th: f64 = 0.7;
    assert_relative_eq!(m.psi_derivative(Process::X, th).unwrap(), 1.1 - 8.0 / (2.0 + th).powi(2), epsilon = 1e-13);
}

#[test]
fn weibull_slope_at_zero() {
    let m = weibull_model(1.0);
    let mean = mean_by_iteration(m.jumps());
    assert_relative_eq!(m.mean_jump(), mean, max_relative = 1e-10);
    assert_relative_eq!(m.psi_prime_zero(Process::X), 1.5 - 2.0 * mean, max_relative = 1e-10);
}

#[test]
fn exponential_positive_roots() {
    let m = expo_model();
    // psi_X = q  <=>  1.1 s^2 - 2 s - 0.4 = 0
    let (big_phi, _) = quadratic(1.1, -2.0, -0.4);
    let (phi, _) = quadratic(1.0, -2.2, -0.4);
    assert_relative_eq!(big_phi, 2.0, epsilon = 1e-14);
    assert_relative_eq!(m.positive_root(Process::X, 0.2).unwrap(), big_phi, epsilon = 1e-10);
    assert_relative_eq!(m.positive_root(Process::Y, 0.2).unwrap(), phi, epsilon = 1e-10);
    assert_relative_eq!(phi, (2.2 + 6.44f64.sqrt()) / 2.0, epsilon = 1e-14);
    assert!(phi > big_phi && big_phi > 0.0);
}

#[test]
fn exponential_negative_roots() {
    let m = expo_model();
    let rx = m.negative_roots(Process::X, 0.2).unwrap();
    assert_eq!(rx.negative_roots.len(), 1);
    let (_, neg_x) = quadratic(1.1, -2.0, -0.4);
    assert_relative_eq!(neg_x, -2.0 / 11.0, epsilon = 1e-14);
    assert_relative_eq!(rx.negative_roots[0].re, neg_x, epsilon = 1e-10);
    assert_relative_eq!(rx.residues[0].re, 1.0 / 1.32, epsilon = 1e-10);

    let ry = m.negative_roots(Process::Y, 0.2).unwrap();
    let (_, neg_y) = quadratic(1.0, -2.2, -0.4);
    let b = -1.0 / (1.0 - 8.0 / (2.0 + neg_y).powi(2));
    assert_relative_eq!(ry.negative_roots[0].re, neg_y, epsilon = 1e-10);
    assert_relative_eq!(-neg_y, 0.168858, epsilon = 1e-6);
    assert_relative_eq!(ry.residues[0].re, b, epsilon = 1e-10);
    assert_relative_eq!(b, 0.72157, epsilon = 1e-5);
    assert_relative_eq!(ry.lead_coefficient, 1.0 / m.psi_derivative(Process::Y, ry.positive_root).unwrap(), epsilon = 1e-12);
}

#[test]
fn weibull_root_counts() {
    let m = weibull_model(1.0);
    for which in [Process::Y, Process::X] {
        let rs = m.negative_roots(which, WEIBULL_Q).unwrap();
        assert_eq!(rs.negative_roots.len(), 7, "{which:?}");
        for (r, c) in rs.negative_roots.iter().zip(&rs.residues) {
            assert!(r.re < 0.0);
            let psi = m.psi_complex(which, *r).unwrap();
            assert!((psi - WEIBULL_Q).norm() < 1e-9, "{which:?} root {r}: psi - q = {}", psi - WEIBULL_Q);
            if r.im.abs() > 1e-12 {
                // conjugate partner with conjugate residue
                let k = rs.negative_roots.iter().position(|s| (s - r.conj()).norm() < 1e-9).unwrap();
                assert!((rs.residues[k] - c.conj()).norm() < 1e-9);
            }
        }
    }
    let phi = m.positive_root(Process::Y, WEIBULL_Q).unwrap();
    let big_phi = m.positive_root(Process::X, WEIBULL_Q).unwrap();
    assert!(phi > big_phi && big_phi > 0.0);
}

#[test]
fn partial_fractions() {
    for (m, q) in [(expo_model(), 0.2), (weibull_model(1.0), WEIBULL_Q)] {
        let rs = m.negative_roots(Process::X, q).unwrap();
        for off in [0.5, 1.0, 2.0] {
            let th = rs.positive_root + off;
            let lhs = 1.0 / (m.psi(Process::X, th).unwrap() - q);
            let mut rhs = Complex64::new(rs.lead_coefficient / (th - rs.positive_root), 0.0);
            // W carries the residues with a minus sign
            for (r, c) in rs.negative_roots.iter().zip(&rs.residues) {
                rhs -= c / (th - r);
            }
            assert!((lhs - rhs.re).abs() < 1e-8, "theta {th}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn conjugate_closure() {
    let m = weibull_model(1.0);
    let rs = m.negative_roots(Process::X, WEIBULL_Q).unwrap();
    for x in [0.0, 1.0, 5.0] {
        let s: Complex64 = rs.negative_roots.iter().zip(&rs.residues).map(|(r, c)| c * (r * x).exp()).sum();
        assert!(s.im.abs() < 1e-10 * s.re.abs().max(1e-300) + 1e-14, "x {x}: {s}");
    }
}

#[test]
fn exponent_is_convex() {
    for (m, q) in [(expo_model(), 0.2), (weibull_model(1.0), WEIBULL_Q)] {
        let hi = 2.0 * m.positive_root(Process::Y, q).unwrap();
        let vals: Vec<f64> = (0..=400).map(|i| m.psi(Process::Y, hi * i as f64 / 400.0).unwrap()).collect();
        for w in vals.windows(3) {
            assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-9);
        }
    }
}

proptest! {
    #[test]
    fn exponential_family_roots(c in 0.1f64..3.0, kappa in 0.1f64..8.0, omega in 0.2f64..6.0, delta in 0.01f64..2.0, q in 0.01f64..1.0) {
        let m = LevyModel::new(c, 0.0, kappa, PhaseType::exponential(omega).unwrap(), delta).unwrap();
        for which in [Process::Y, Process::X] {
            let drift = m.drift(which);
            // drift s^2 + (drift omega - kappa - q) s - q omega = 0
            let (pos, neg) = quadratic(drift, drift * omega - kappa - q, -q * omega);
            let root = m.positive_root(which, q).unwrap();
            prop_assert!((root - pos).abs() < 1e-8 * pos.max(1.0));
            if (neg + omega).abs() > 1e-3 {
                let rs = m.negative_roots(which, q).unwrap();
                prop_assert_eq!(rs.negative_roots.len(), 1);
                prop_assert!((rs.negative_roots[0].re - neg).abs() < 1e-8 * neg.abs().max(1.0));
            }
        }
    }

    #[test]
    fn psi_vanishes_at_zero_and_is_convex(sigma in 0.0f64..1.0, kappa in 0.1f64..5.0, omega in 0.5f64..5.0, t in 0.0f64..5.0) {
        let m = LevyModel::new(1.0, sigma, kappa, PhaseType::exponential(omega).unwrap(), 0.5).unwrap();
        prop_assert_eq!(m.psi(Process::Y, 0.0).unwrap(), 0.0);
        let h = 1e-3;
        let second = m.psi(Process::Y, t + 2.0 * h).unwrap() - 2.0 * m.psi(Process::Y, t + h).unwrap() + m.psi(Process::Y, t).unwrap();
        prop_assert!(second >= -1e-12);
    }
}
