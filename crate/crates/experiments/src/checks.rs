//! Property checks on a solved problem. Each check yields items with the
//! measured value, its tolerance and a verdict.

use twolayer_core::mc::{self, SimConfig};
use twolayer_core::optimizer::{self, Case, Solution};
use twolayer_core::{Problem, Process, Result, Side, Strategy};

pub const LAPLACE_TOL: f64 = 1e-8;
pub const RESIDUAL_TOL: f64 = 1e-8;
pub const SLOPE_FIT_TOL: f64 = 1e-5;
pub const CONCAVITY_TOL: f64 = 1e-7;
pub const SLOPE_BAND_TOL: f64 = 1e-8;
pub const DOMINANCE_TOL: f64 = 1e-9;
pub const GENERATOR_TOL: f64 = 1e-6;
pub const BRACKET_TOL: f64 = 1e-9;
/// Offsets above the positive root at which the transform identity is tested.
pub const LAPLACE_OFFSETS: [f64; 5] = [0.5, 1.0, 2.0, 5.0, 10.0];

#[derive(Debug, Clone)]
pub struct CheckItem {
    pub suite: &'static str,
    pub item: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckItem {
    /// Passes when `value <= tol`.
    pub fn at_most(suite: &'static str, item: impl Into<String>, value: f64, tol: f64) -> Self {
        Self { suite, item: item.into(), value, tol, pass: value <= tol }
    }
}

/// Evenly spaced grid of `n` points on `[0, hi]`; a single point is `0`.
pub fn x_grid(hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect()
}

/// Default upper end of plotting and checking grids.
pub fn default_x_max(sol: &Solution) -> f64 {
    2.0 * sol.b_star + 2.0
}

/// Strategies shifted by one unit around the optimum, clipped to validity:
/// four corners in the two-layer case, `(a*+1, b*+-1)` when `a* = 0`.
pub fn perturbed_strategies(sol: &Solution) -> Vec<Strategy> {
    let (a, b) = (sol.a_star, sol.b_star);
    let shifts: &[(f64, f64)] = match sol.case {
        Case::Liquidate => &[],
        Case::RefractOnly => &[(1.0, -1.0), (1.0, 1.0)],
        Case::TwoLayer => &[(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)],
    };
    shifts
        .iter()
        .filter_map(|&(da, db)| Strategy::new((a + da).max(0.0), (b + db).max(0.0)).ok())
        .collect()
}

pub fn laplace(problem: &Problem) -> Result<Vec<CheckItem>> {
    let mut out = Vec::new();
    for which in [Process::Y, Process::X] {
        let phi = problem.scales().family(which).roots.positive_root;
        for off in LAPLACE_OFFSETS {
            let theta = phi + off;
            let r = problem.scales().verify_laplace(problem.model(), which, theta)?;
            out.push(CheckItem::at_most("laplace", format!("{which:?} theta={theta:.4}"), r, LAPLACE_TOL));
        }
    }
    Ok(out)
}

pub fn smooth_fit(problem: &Problem, sol: &Solution) -> Vec<CheckItem> {
    let r = &sol.residuals;
    let mut out = Vec::new();
    if let Some(g) = r.gamma_big {
        out.push(CheckItem::at_most("smooth_fit", "|Gamma(a*,b*)|", g.abs(), RESIDUAL_TOL));
    }
    if let Some(g) = r.gamma_small {
        out.push(CheckItem::at_most("smooth_fit", "|gamma(a*,b*)|", g.abs(), RESIDUAL_TOL));
    }
    if let Some((lo, hi)) = r.dv_a {
        out.push(CheckItem::at_most("smooth_fit", "|v'(a*-) - 1|", lo.abs(), SLOPE_FIT_TOL));
        out.push(CheckItem::at_most("smooth_fit", "|v'(a*+) - 1|", hi.abs(), SLOPE_FIT_TOL));
    }
    if let Some((lo, hi)) = r.dv_b {
        out.push(CheckItem::at_most("smooth_fit", "|v'(b*-) - beta|", lo.abs(), SLOPE_FIT_TOL));
        out.push(CheckItem::at_most("smooth_fit", "|v'(b*+) - beta|", hi.abs(), SLOPE_FIT_TOL));
    }
    if let (Some(b0), Ok(k)) = (sol.b0, optimizer::gap_level(problem)) {
        let lo = b0.min(k) - sol.b_star;
        let hi = sol.b_star - b0;
        out.push(CheckItem::at_most("bracket", "b0 ^ Z^-1(1/beta) - b*", lo, BRACKET_TOL));
        out.push(CheckItem::at_most("bracket", "b* - b0", hi, BRACKET_TOL));
    }
    out
}

/// Second differences of `v_{a*,b*}` and the slope band on a grid.
pub fn concavity(problem: &Problem, sol: &Solution, points: usize, x_max: f64) -> Result<Vec<CheckItem>> {
    let s = sol.strategy();
    let xs = x_grid(x_max, points);
    let vs: Vec<f64> = xs.iter().map(|&x| problem.value(s, x)).collect::<Result<_>>()?;
    let second = vs.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).fold(f64::NEG_INFINITY, f64::max);
    let beta = problem.beta();
    let (mut above, mut below) = (0.0f64, 0.0f64);
    for &x in &xs {
        for side in [Side::Below, Side::Above] {
            if x == 0.0 && side == Side::Below {
                continue;
            }
            let d = problem.value_derivative(s, x, side)?;
            let right_of_a = x > sol.a_star || (x == sol.a_star && side == Side::Above);
            if right_of_a {
                above = above.max(beta - d).max(d - 1.0);
            } else {
                below = below.max(1.0 - d);
            }
        }
    }
    Ok(vec![
        CheckItem::at_most("concavity", "max second difference", second, CONCAVITY_TOL),
        CheckItem::at_most("slope_band", "violation of beta <= v' <= 1 above a*", above, SLOPE_BAND_TOL),
        CheckItem::at_most("slope_band", "violation of v' >= 1 below a*", below, SLOPE_BAND_TOL),
    ])
}

/// `max_x (v_{a,b}(x) - v_{a*,b*}(x))` for each perturbed strategy.
pub fn dominance(problem: &Problem, sol: &Solution, points: usize, x_max: f64) -> Result<Vec<CheckItem>> {
    let xs = x_grid(x_max, points);
    let mut out = Vec::new();
    for st in perturbed_strategies(sol) {
        let mut worst = f64::NEG_INFINITY;
        for &x in &xs {
            worst = worst.max(problem.value(st, x)? - sol.value_at(problem, x)?);
        }
        out.push(CheckItem::at_most("dominance", format!("(a,b)=({:.4},{:.4})", st.a, st.b), worst, DOMINANCE_TOL));
    }
    Ok(out)
}

/// Generator identities inside `(0, a*)` and `(a*, b*)`; exponential jumps only.
pub fn generator(problem: &Problem, sol: &Solution, points: usize) -> Result<Vec<CheckItem>> {
    if problem.model().jumps().phases() != 1 || sol.case == Case::Liquidate {
        return Ok(Vec::new());
    }
    let s = sol.strategy();
    let interior = |lo: f64, hi: f64| (1..=points).map(move |i| lo + (hi - lo) * i as f64 / (points + 1) as f64);
    let mut out = Vec::new();
    if sol.a_star > 0.0 {
        let mut worst = 0.0f64;
        for x in interior(0.0, sol.a_star) {
            worst = worst.max(problem.generator_residual(s, x, Process::Y)?.abs());
        }
        out.push(CheckItem::at_most("generator", "|(L_Y - q) v| on (0, a*)", worst, GENERATOR_TOL));
    }
    let mut worst = 0.0f64;
    for x in interior(sol.a_star, sol.b_star) {
        worst = worst.max(problem.generator_residual(s, x, Process::X)?.abs());
    }
    out.push(CheckItem::at_most("generator", "|(L_X - q) v + delta| on (a*, b*)", worst, GENERATOR_TOL));
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct McCell {
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub analytic: f64,
    pub estimate: mc::McEstimate,
}

impl McCell {
    pub fn within(&self, k: f64) -> bool {
        (self.estimate.mean - self.analytic).abs() <= k * self.estimate.stderr + 1e-12
    }

    pub fn z_score(&self) -> f64 {
        self.estimate.z_score(self.analytic)
    }
}

/// 3 x 3 x 3 grid of `(a, b, x0)` scaled by `s = max(b*, 1)`.
pub fn mc_grid(sol: &Solution) -> Vec<(f64, f64, f64)> {
    let s = sol.b_star.max(1.0);
    let mut out = Vec::with_capacity(27);
    for a in [0.0, s / 3.0, 2.0 * s / 3.0] {
        for b in [s, 1.5 * s, 2.0 * s] {
            for x in [0.5 * s, s, 1.5 * s] {
                out.push((a, b, x));
            }
        }
    }
    out
}

/// Runs the estimator on each cell, seeding cell `i` with `seed + i`.
pub fn mc_cells(problem: &Problem, cells: &[(f64, f64, f64)], config: &SimConfig) -> Result<Vec<McCell>> {
    let mut out = Vec::with_capacity(cells.len());
    for (i, &(a, b, x0)) in cells.iter().enumerate() {
        let st = Strategy::new(a, b)?;
        let cfg = SimConfig { seed: config.seed.wrapping_add(i as u64), ..*config };
        let estimate = mc::simulate_value(problem, st, x0, &cfg)?;
        out.push(McCell { a, b, x0, analytic: problem.value(st, x0)?, estimate });
    }
    Ok(out)
}

/// Required number of cells within 3 standard errors (25 of 27).
pub fn mc_required(n: usize) -> usize {
    (25 * n).div_ceil(27)
}
