//! Optimal thresholds `(a*, b*)` by monotone bisection on the lower envelope
//! of `Gamma`, with case classification and smooth-fit residuals.

use crate::error::{Error, Result};
use crate::expsum::Side;
use crate::levy_model::Process;
use crate::scale::Monotone;
use crate::valuation::{Problem, Strategy};

const B_TOL: f64 = 1e-9;
const MAX_ITER: usize = 200;

/// Which of the three optimal regimes applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// Pay everything and stop at once.
    Liquidate,
    /// `a* = 0 < b*`: rate-capped dividends everywhere below `b*`.
    RefractOnly,
    /// `0 < a* < b*`.
    TwoLayer,
}

impl Case {
    pub fn tag(&self) -> &'static str {
        match self {
            Case::Liquidate => "liquidate",
            Case::RefractOnly => "refract_only",
            Case::TwoLayer => "two_layer",
        }
    }
}

/// Smooth-fit residuals at the optimum. Fields are `None` where the
/// condition does not apply.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Residuals {
    /// `Gamma(a*, b*)`.
    pub gamma_big: Option<f64>,
    /// `gamma(a*, b*)`, only meaningful when `a* > 0`.
    pub gamma_small: Option<f64>,
    /// `v'(a*) - 1` from each side.
    pub dv_a: Option<(f64, f64)>,
    /// `v'(b*) - beta` from each side.
    pub dv_b: Option<(f64, f64)>,
    /// `v''(b*-) - v''(b*+)` for unbounded-variation models.
    pub d2v_b_gap: Option<f64>,
    /// `v''(a*-) - v''(a*+)` for unbounded-variation models.
    pub d2v_a_gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub case: Case,
    pub a_star: f64,
    pub b_star: f64,
    /// Upper bracket; `None` when liquidating.
    pub b0: Option<f64>,
    pub residuals: Residuals,
}

impl Solution {
    pub fn strategy(&self) -> Strategy {
        Strategy { a: self.a_star, b: self.b_star }
    }

    /// `v_{a*,b*}(x)`.
    pub fn value_at(&self, problem: &Problem, x: f64) -> Result<f64> {
        problem.value(self.strategy(), x)
    }
}

/// `Z^{-1}(1/beta)` for the refracted process.
pub fn gap_level(problem: &Problem) -> Result<f64> {
    problem.scales().inverse(Process::X, Monotone::Z, 1.0 / problem.beta())
}

/// Minimizer of `Gamma(., b)` on `[0, b]`.
pub fn a_of_b(problem: &Problem, b: f64) -> Result<f64> {
    Ok((b - gap_level(problem)?).max(0.0))
}

/// `min_{0 <= a <= b} Gamma(a, b)`.
pub fn gamma_lower(problem: &Problem, b: f64) -> Result<f64> {
    Ok(problem.gamma_big(a_of_b(problem, b)?, b))
}

/// Upper bracket `b0`, the root of `Gamma(0, .)`.
pub fn upper_bracket(problem: &Problem) -> Result<f64> {
    let q = problem.q();
    let target = (problem.delta() - q * problem.rho()) / (q * problem.beta())
        - problem.scales().psi_prime_zero(Process::X) / q;
    problem.scales().inverse(Process::X, Monotone::ZBar, target)
}

pub fn solve(problem: &Problem) -> Result<Solution> {
    if problem.gamma_big(0.0, 0.0) <= 0.0 {
        return Ok(Solution {
            case: Case::Liquidate,
            a_star: 0.0,
            b_star: 0.0,
            b0: None,
            residuals: Residuals::default(),
        });
    }
    let k = gap_level(problem)?;
    let b0 = upper_bracket(problem)?;
    let (case, a_star, b_star) = if b0 <= k {
        (Case::RefractOnly, 0.0, b0)
    } else {
        let b = bisect_lower(problem, k, b0, k)?;
        let a = (b - k).max(0.0);
        if a == 0.0 {
            (Case::RefractOnly, 0.0, b)
        } else {
            (Case::TwoLayer, a, b)
        }
    };
    let mut sol = Solution { case, a_star, b_star, b0: Some(b0), residuals: Residuals::default() };
    sol.residuals = verify_smooth_fit(problem, &sol)?;
    Ok(sol)
}

fn bisect_lower(problem: &Problem, lo: f64, hi: f64, k: f64) -> Result<f64> {
    let g = |b: f64| problem.gamma_big((b - k).max(0.0), b);
    let (mut lo, mut hi) = (lo, hi);
    if g(lo) < 0.0 || g(hi) > 0.0 {
        return Err(Error::BracketFailure { lo, hi });
    }
    for _ in 0..MAX_ITER {
        if hi - lo <= B_TOL * 1e-3 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton polish on the envelope, whose slope is -q beta r_k(b).
    let mut b = 0.5 * (lo + hi);
    let q_beta = problem.q() * problem.beta();
    for _ in 0..3 {
        let slope = -q_beta * problem.scales().r_fn(k.min(b), b);
        let next = b - g(b) / slope;
        if !(next >= lo - B_TOL && next <= hi + B_TOL) || g(next).abs() > g(b).abs() {
            break;
        }
        b = next;
    }
    Ok(b)
}

/// Residual report for the smooth-fit conditions at the optimum; empty when
/// liquidating.
pub fn verify_smooth_fit(problem: &Problem, sol: &Solution) -> Result<Residuals> {
    if sol.case == Case::Liquidate {
        return Ok(Residuals::default());
    }
    let s = sol.strategy();
    let (a, b) = (s.a, s.b);
    let beta = problem.beta();
    let dv = |x: f64, side: Side| problem.value_derivative(s, x, side);
    let mut r = Residuals {
        gamma_big: Some(problem.gamma_big(a, b)),
        dv_b: Some((dv(b, Side::Below)? - beta, dv(b, Side::Above)? - beta)),
        ..Residuals::default()
    };
    let unbounded = !problem.model().bounded_variation();
    let d2 = |x: f64, side: Side| problem.value_second_derivative(s, x, side);
    if unbounded {
        r.d2v_b_gap = Some(d2(b, Side::Below)? - d2(b, Side::Above)?);
    }
    if a > 0.0 {
        r.gamma_small = Some(problem.gamma_small(a, b));
        r.dv_a = Some((dv(a, Side::Below)? - 1.0, dv(a, Side::Above)? - 1.0));
        if unbounded {
            r.d2v_a_gap = Some(d2(a, Side::Below)? - d2(a, Side::Above)?);
        }
    }
    Ok(r)
}
