//! Expected present value of dividends plus terminal payoff under two-layer
//! strategies, the boundary functions driving optimality, and the
//! single-control benchmarks.
//!
//! All values are in normalized units (divided by `beta_A`) unless a method
//! says otherwise.

use crate::error::{Error, Result};
use crate::expsum::{self, ExpSum, Side};
use crate::levy_model::{LevyModel, Process};
use crate::scale::{Monotone, ScaleSet};

/// Economic context: discounting, dividend rates, terminal payoff and the
/// scale functions they induce.
#[derive(Debug, Clone)]
pub struct Problem {
    model: LevyModel,
    q: f64,
    beta_a: f64,
    beta_s: f64,
    rho_tilde: f64,
    scales: ScaleSet,
}

impl Problem {
    /// `rho_tilde` is the terminal payoff in original units.
    pub fn new(model: LevyModel, q: f64, beta_a: f64, beta_s: f64, rho_tilde: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidParameter(format!("discount rate q = {q} must be positive")));
        }
        if !(beta_s.is_finite() && beta_a.is_finite() && beta_s > 0.0 && beta_a > beta_s) {
            return Err(Error::InvalidParameter(format!(
                "need beta_A > beta_S > 0, got beta_A = {beta_a}, beta_S = {beta_s}"
            )));
        }
        if !rho_tilde.is_finite() {
            return Err(Error::InvalidParameter("terminal payoff must be finite".into()));
        }
        let scales = ScaleSet::build(&model, q)?;
        Ok(Self { model, q, beta_a, beta_s, rho_tilde, scales })
    }

    /// Problem stated directly in normalized units (`beta_A = 1`).
    pub fn normalized(model: LevyModel, q: f64, beta: f64, rho: f64) -> Result<Self> {
        Self::new(model, q, 1.0, beta, rho)
    }

    /// Same model and rates with a different normalized terminal payoff.
    /// The scale functions are reused.
    pub fn with_rho(&self, rho: f64) -> Self {
        Self { rho_tilde: rho * self.beta_a, ..self.clone() }
    }

    /// Same problem with `beta = beta_S / beta_A` replaced, keeping `beta_A`.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParameter(format!("beta = {beta} must lie in (0, 1)")));
        }
        Ok(Self { beta_s: beta * self.beta_a, ..self.clone() })
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    pub fn scales(&self) -> &ScaleSet {
        &self.scales
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn delta(&self) -> f64 {
        self.model.delta()
    }

    pub fn beta_a(&self) -> f64 {
        self.beta_a
    }

    pub fn beta_s(&self) -> f64 {
        self.beta_s
    }

    pub fn rho_tilde(&self) -> f64 {
        self.rho_tilde
    }

    /// `beta_S / beta_A`.
    pub fn beta(&self) -> f64 {
        self.beta_s / self.beta_a
    }

    /// `rho_tilde / beta_A`.
    pub fn rho(&self) -> f64 {
        self.rho_tilde / self.beta_a
    }

    /// `q rho / delta`.
    pub fn rho_bar(&self) -> f64 {
        self.q * self.rho() / self.delta()
    }

    // Shorthands for the scale functions used below.
    fn zz(&self, x: f64) -> f64 {
        self.scales.family(Process::Y).z().eval(x)
    }

    /// `gamma(a, b) = 1/beta - Z(b - a)`.
    pub fn gamma_small(&self, a: f64, b: f64) -> f64 {
        1.0 / self.beta() - self.scales.family(Process::X).z().eval(b - a)
    }

    /// `Gamma(a, b) = delta ZZ(a) - q rho - q beta r~_{b-a}(b)`.
    pub fn gamma_big(&self, a: f64, b: f64) -> f64 {
        let q = self.q;
        self.delta() * self.zz(a) - q * self.rho() - q * self.beta() * self.scales.rt_fn(b - a, b)
    }

    /// `v_{a,b}(x)`.
    pub fn value(&self, strategy: Strategy, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::NegativeStart(x));
        }
        let (a, b) = (strategy.a, strategy.b);
        let beta = self.beta();
        if strategy.is_liquidation() {
            return Ok(beta * x + self.rho());
        }
        if x > b {
            return Ok(beta * (x - b) + self.value(strategy, b)?);
        }
        let (q, delta) = (self.q, self.delta());
        let c = b - a;
        let s = &self.scales;
        let ratio = s.r_fn(c, b - x) / s.r_fn(c, b);
        Ok(-self.gamma_big(a, b) / q * ratio + delta / q * self.zz(a - x) - beta * s.rt_fn(c, b - x))
    }

    /// `v_{a,b}'(x)`; `side` selects the one-sided limit in `x` at the kinks
    /// `a` and `b` (`Below` = from the left).
    pub fn value_derivative(&self, strategy: Strategy, x: f64, side: Side) -> Result<f64> {
        self.value_deriv_n(strategy, x, side, 1)
    }

    /// `v_{a,b}''(x)`, one-sided as in [`Problem::value_derivative`].
    pub fn value_second_derivative(&self, strategy: Strategy, x: f64, side: Side) -> Result<f64> {
        self.value_deriv_n(strategy, x, side, 2)
    }

    fn value_deriv_n(&self, strategy: Strategy, x: f64, side: Side, n: usize) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::NegativeStart(x));
        }
        let (a, b) = (strategy.a, strategy.b);
        let beta = self.beta();
        let above_b = x > b || (x == b && side == Side::Above);
        if strategy.is_liquidation() || above_b {
            return Ok(if n == 1 { beta } else { 0.0 });
        }
        let (q, delta) = (self.q, self.delta());
        let c = b - a;
        let s = &self.scales;
        // arguments b - x and a - x run against x
        let zside = match side {
            Side::Below => Side::Above,
            Side::Above => Side::Below,
        };
        let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
        let gamma = self.gamma_big(a, b);
        let r_b = s.r_fn(c, b);
        let first = -gamma / q * s.r_deriv(c, b - x, n, zside) / r_b;
        let zz_n = s.family(Process::Y).z_deriv(n).eval_side(a - x, zside);
        let second = delta / q * zz_n;
        let third = -beta * s.rt_deriv(c, b - x, n, zside);
        Ok(sign * (first + second + third))
    }

    /// Value in original currency units, `beta_A v_{a,b}(x)`.
    pub fn value_original_units(&self, strategy: Strategy, x: f64) -> Result<f64> {
        Ok(self.beta_a * self.value(strategy, x)?)
    }

    fn require_positive_drift(&self) -> Result<f64> {
        let d = self.scales.psi_prime_zero(Process::Y);
        if d >= 0.0 {
            return Err(Error::NotApplicable(format!(
                "single-control benchmarks need psi_Y'(0+) < 0, got {d}"
            )));
        }
        Ok(d)
    }

    /// `Gamma_S(b) = ZZ-bar(b) + psi_Y'(0+)/q`.
    pub fn gamma_singular(&self, b: f64) -> f64 {
        self.scales.family(Process::Y).zbar().eval(b) + self.scales.psi_prime_zero(Process::Y) / self.q
    }

    /// Optimal barrier `b_S` when only lump-sum dividends (at full rate) are paid.
    pub fn singular_barrier(&self) -> Result<f64> {
        let d = self.require_positive_drift()?;
        self.scales.inverse(Process::Y, Monotone::ZBar, -d / self.q)
    }

    /// `(b_S, v^S(x))` with `v^S(x) = -ZZ-bar(b_S - x) - psi_Y'(0+)/q`.
    pub fn value_singular_only(&self, x: f64) -> Result<(f64, f64)> {
        if !(x >= 0.0) {
            return Err(Error::NegativeStart(x));
        }
        let b_s = self.singular_barrier()?;
        let d = self.scales.psi_prime_zero(Process::Y);
        Ok((b_s, -self.scales.family(Process::Y).zbar().eval(b_s - x) - d / self.q))
    }

    /// `Gamma_A(a)` scaled by `e^{-Phi a}`: same sign, strictly decreasing.
    fn gamma_refract_scaled(&self, a: f64) -> f64 {
        let (q, delta) = (self.q, self.delta());
        let phi = self.scales.family(Process::X).roots.positive_root;
        delta * (-phi * a).exp() * self.zz(a) - q / phi * (1.0 + delta * phi * self.scales.ww_tilted_integral(a))
    }

    /// `Gamma_A(a) = delta ZZ(a) - (q/Phi) e^{Phi a} (1 + delta Phi int_0^a WW(y) e^{-Phi y} dy)`.
    pub fn gamma_refract(&self, a: f64) -> f64 {
        let phi = self.scales.family(Process::X).roots.positive_root;
        (phi * a).exp() * self.gamma_refract_scaled(a)
    }

    /// Optimal threshold `a_A` when only rate-capped dividends are paid; zero
    /// when `Gamma_A(0) <= 0`.
    pub fn refraction_threshold(&self) -> Result<f64> {
        self.require_positive_drift()?;
        let h = |a: f64| self.gamma_refract_scaled(a);
        if h(0.0) <= 0.0 {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while h(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > 1e6 {
                return Err(Error::BracketFailure { lo, hi });
            }
        }
        Ok(bisect(h, lo, hi))
    }

    /// `(a_A, v^A(x))`.
    pub fn value_refract_only(&self, x: f64) -> Result<(f64, f64)> {
        if !(x >= 0.0) {
            return Err(Error::NegativeStart(x));
        }
        let a_a = self.refraction_threshold()?;
        Ok((a_a, self.refract_only_at(a_a, x)))
    }

    fn refract_only_at(&self, a_a: f64, x: f64) -> f64 {
        let (q, delta) = (self.q, self.delta());
        let phi = self.scales.family(Process::X).roots.positive_root;
        let u = a_a - x;
        let e = (phi * u).exp();
        -e * delta * self.scales.ww_tilted_integral(u) + delta / q * self.zz(u) - e / phi
    }

    /// Residual of the generator identity at `x`:
    /// `(L_Y - q) v(x)` for [`Process::Y`] and `(L_X - q) v(x) + delta` for
    /// [`Process::X`], with the jump integral done in closed form. Only
    /// available for exponential jumps.
    pub fn generator_residual(&self, strategy: Strategy, x: f64, which: Process) -> Result<f64> {
        let jumps = self.model.jumps();
        if jumps.phases() != 1 {
            return Err(Error::NotApplicable(
                "closed-form jump integral needs exponential jumps".into(),
            ));
        }
        if strategy.is_liquidation() {
            return Err(Error::NotApplicable("no interior region for liquidation".into()));
        }
        let omega = -jumps.generator()[(0, 0)];
        let (a, b) = (strategy.a, strategy.b);
        let (q, delta, beta) = (self.q, self.delta(), self.beta());
        let s = &self.scales;
        let c = b - a;
        let gamma = self.gamma_big(a, b);
        let r_b = s.r_fn(c, b);

        // v(b - z) as exponential sums in z on [0, c] and [c, b].
        let zx = s.family(Process::X).z();
        let upper = zx.scaled(-gamma / (q * r_b)).sum(&s.big_r().scaled(-beta)).plus_constant(delta / q);
        let ww = s.family(Process::Y).w();
        let conv_w = expsum::convolve(ww, s.family(Process::X).w(), c);
        let conv_z = expsum::convolve(ww, zx, c);
        let lower: ExpSum = zx
            .sum(&conv_w.scaled(q * delta))
            .scaled(-gamma / (q * r_b))
            .sum(&s.family(Process::Y).z().shifted(-c).scaled(delta / q))
            .sum(&s.big_r().sum(&conv_z.scaled(delta)).scaled(-beta));

        // J(x) = int_x^inf v(y) e^{-omega y} dy, split at a and b.
        let v_b = self.value(strategy, b)?;
        let mut j = (-omega * b).exp() * (beta / (omega * omega) + v_b / omega);
        let start = x.max(a);
        if start < b {
            j += (-omega * b).exp() * upper.weighted_integral(omega, 0.0, b - start);
        }
        if x < a {
            j += (-omega * b).exp() * lower.weighted_integral(omega, c, b - x);
        }
        let v = self.value(strategy, x)?;
        let dv = self.value_derivative(strategy, x, Side::Above)?;
        let d2v = if self.model.sigma() > 0.0 {
            self.value_second_derivative(strategy, x, Side::Above)?
        } else {
            0.0
        };
        let kappa = self.model.kappa();
        let jump = kappa * (omega * (omega * x).exp() * j - v);
        let sig2 = self.model.sigma().powi(2);
        let drift = self.model.drift(which);
        let refract = if which == Process::X { delta } else { 0.0 };
        Ok(-drift * dv + 0.5 * sig2 * d2v + jump - q * v + refract)
    }
}

/// Plain bisection for a decreasing function with `f(lo) > 0 >= f(hi)`.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-layer strategy: no dividends below `a`, rate-`delta` dividends on
/// `(a, b]`, lump sums above `b`. `a = b = 0` is immediate liquidation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strategy {
    pub a: f64,
    pub b: f64,
}

impl Strategy {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let ok = a.is_finite() && b.is_finite() && ((0.0 <= a && a < b) || (a == 0.0 && b == 0.0));
        if !ok {
            return Err(Error::InvalidStrategy { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn liquidation() -> Self {
        Self { a: 0.0, b: 0.0 }
    }

    pub fn is_liquidation(&self) -> bool {
        self.b == 0.0
    }
}

/// Terms of the equivalent capital-injection problem: surplus `Y-hat`,
/// injections at rate up to `delta` costing `beta_A`, dividends at `beta_S`,
/// and payoff `rho_hat` at ruin.
#[derive(Debug, Clone)]
pub struct CapitalInjection {
    pub c_hat: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub jumps: crate::levy_model::PhaseType,
    pub delta: f64,
    pub q: f64,
    pub beta_a: f64,
    pub beta_s: f64,
    pub rho_hat: f64,
}

impl CapitalInjection {
    /// `rho_tilde = rho_hat + beta_A delta / q`.
    pub fn rho_tilde(&self) -> f64 {
        self.rho_hat + self.beta_a * self.delta / self.q
    }

    /// Inverse of [`CapitalInjection::rho_tilde`].
    pub fn rho_hat_from(rho_tilde: f64, beta_a: f64, delta: f64, q: f64) -> f64 {
        rho_tilde - beta_a * delta / q
    }

    /// The dividend problem for `Y = Y-hat + delta t`.
    pub fn transformed(&self) -> Result<Problem> {
        let model = LevyModel::new(
            self.c_hat - self.delta,
            self.sigma,
            self.kappa,
            self.jumps.clone(),
            self.delta,
        )?;
        Problem::new(model, self.q, self.beta_a, self.beta_s, self.rho_tilde())
    }

    /// Value of dividends net of injections under `strategy`, original units.
    pub fn value(&self, strategy: Strategy, x: f64) -> Result<f64> {
        let p = self.transformed()?;
        Ok(p.value_original_units(strategy, x)? - self.beta_a * self.delta / self.q)
    }
}
