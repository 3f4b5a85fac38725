//! Finite sums of polynomial-times-exponential terms on `[0, inf)`, with an
//! explicit rule for the value on the negative half-line.
//!
//! Every scale function of a phase-type jump-diffusion, together with its
//! integrals and derivatives, lives in this class. Complex exponents appear in
//! conjugate pairs, so evaluation keeps only the real part.

use num_complex::Complex64;

/// Exponents closer than this are treated as coincident.
pub const COLLISION_TOL: f64 = 1e-9;

/// `coef * x^power * exp(rate * x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coef: Complex64,
    pub rate: Complex64,
    pub power: u32,
}

impl Term {
    pub fn exp(coef: Complex64, rate: Complex64) -> Self {
        Self { coef, rate, power: 0 }
    }

    pub fn real(coef: f64, rate: f64) -> Self {
        Self::exp(Complex64::new(coef, 0.0), Complex64::new(rate, 0.0))
    }

    pub fn constant(c: f64) -> Self {
        Self::real(c, 0.0)
    }
}

/// Value rule for `x < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BelowZero {
    /// `f(x) = 0`, as for `W` and `W-bar`.
    Zero,
    /// `f(x) = 1`, as for `Z`.
    One,
    /// `f(x) = x`, as for `Z-bar`.
    Identity,
    /// `f(x) = intercept + slope * x`.
    Affine { intercept: f64, slope: f64 },
}

impl BelowZero {
    fn coefficients(self) -> (f64, f64) {
        match self {
            BelowZero::Zero => (0.0, 0.0),
            BelowZero::One => (1.0, 0.0),
            BelowZero::Identity => (0.0, 1.0),
            BelowZero::Affine { intercept, slope } => (intercept, slope),
        }
    }

    fn from_coefficients(intercept: f64, slope: f64) -> Self {
        match (intercept, slope) {
            (i, s) if i == 0.0 && s == 0.0 => BelowZero::Zero,
            (i, s) if i == 1.0 && s == 0.0 => BelowZero::One,
            (i, s) if i == 0.0 && s == 1.0 => BelowZero::Identity,
            (intercept, slope) => BelowZero::Affine { intercept, slope },
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        let (i, s) = self.coefficients();
        i + s * x
    }
}

/// Which one-sided limit to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum {
    terms: Vec<Term>,
    below_zero: BelowZero,
}

impl ExpSum {
    pub fn new(terms: Vec<Term>, below_zero: BelowZero) -> Self {
        Self { terms, below_zero }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn below_zero(&self) -> BelowZero {
        self.below_zero
    }

    /// `f(x)`, taking the right limit at `x = 0`.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_side(x, Side::Above)
    }

    pub fn eval_side(&self, x: f64, side: Side) -> f64 {
        if x < 0.0 || (x == 0.0 && side == Side::Below) {
            self.below_zero.eval(x)
        } else {
            self.eval_positive(x).re
        }
    }

    /// The analytic expression on `[0, inf)` without discarding the imaginary
    /// part; the shift by the largest growth rate keeps large `x` finite as
    /// long as the total is representable.
    pub fn eval_positive(&self, x: f64) -> Complex64 {
        let shift = self.terms.iter().map(|t| t.rate.re * x).fold(0.0, f64::max);
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let poly = if t.power == 0 { 1.0 } else { x.powi(t.power as i32) };
            acc += t.coef * poly * (t.rate * x - shift).exp();
        }
        acc * shift.exp()
    }

    pub fn derivative(&self) -> ExpSum {
        let mut terms = Vec::with_capacity(self.terms.len() * 2);
        for t in &self.terms {
            if t.rate.norm() > 0.0 {
                terms.push(Term { coef: t.coef * t.rate, rate: t.rate, power: t.power });
            }
            if t.power > 0 {
                terms.push(Term { coef: t.coef * t.power as f64, rate: t.rate, power: t.power - 1 });
            }
        }
        let (_, slope) = self.below_zero.coefficients();
        ExpSum::new(terms, BelowZero::from_coefficients(slope, 0.0))
    }

    /// `x -> int_0^x f(y) dy`. The rule below zero integrates the constant
    /// part of the old rule; a sloped rule has no affine antiderivative.
    pub fn integral(&self) -> ExpSum {
        let mut terms = Vec::with_capacity(self.terms.len() * 2);
        let mut constant = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            for (piece, at_zero) in antiderivative(*t) {
                if piece.coef != Complex64::new(0.0, 0.0) {
                    terms.push(piece);
                }
                constant -= at_zero;
            }
        }
        if constant.norm() > 0.0 {
            terms.push(Term::exp(constant, Complex64::new(0.0, 0.0)));
        }
        let (intercept, slope) = self.below_zero.coefficients();
        assert!(slope == 0.0, "integral of a sloped below-zero rule is not affine");
        ExpSum::new(terms, BelowZero::from_coefficients(0.0, intercept))
    }

    pub fn scaled(&self, k: f64) -> ExpSum {
        let terms = self.terms.iter().map(|t| Term { coef: t.coef * k, ..*t }).collect();
        let (i, s) = self.below_zero.coefficients();
        ExpSum::new(terms, BelowZero::from_coefficients(i * k, s * k))
    }

    /// Adds `c` on both branches.
    pub fn plus_constant(&self, c: f64) -> ExpSum {
        let mut terms = self.terms.clone();
        terms.push(Term::constant(c));
        let (i, s) = self.below_zero.coefficients();
        ExpSum::new(terms, BelowZero::from_coefficients(i + c, s))
    }

    pub fn sum(&self, other: &ExpSum) -> ExpSum {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        let (i1, s1) = self.below_zero.coefficients();
        let (i2, s2) = other.below_zero.coefficients();
        ExpSum::new(terms, BelowZero::from_coefficients(i1 + i2, s1 + s2))
    }

    /// Positive branch of `x -> f(x + shift)`; meaningful where `x + shift >= 0`.
    pub fn shifted(&self, shift: f64) -> ExpSum {
        let mut terms = Vec::new();
        for t in &self.terms {
            let base = t.coef * (t.rate * shift).exp();
            // (x + s)^k = sum_j C(k, j) x^j s^{k-j}
            let mut binom = 1.0;
            for j in 0..=t.power {
                if j > 0 {
                    binom *= (t.power - j + 1) as f64 / j as f64;
                }
                let c = base * binom * shift.powi((t.power - j) as i32);
                if c.norm() > 0.0 {
                    terms.push(Term { coef: c, rate: t.rate, power: j });
                }
            }
        }
        ExpSum::new(terms, BelowZero::Zero)
    }

    /// `int_0^inf e^{-theta x} f(x) dx`, requiring `theta > Re(rate)` for every term.
    pub fn laplace(&self, theta: f64) -> Option<f64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let d = Complex64::new(theta, 0.0) - t.rate;
            if d.re <= 0.0 {
                return None;
            }
            acc += t.coef * factorial(t.power) / d.powi(t.power as i32 + 1);
        }
        Some(acc.re)
    }

    /// `int_lo^hi f(x) e^{w x} dx` over the positive branch, `0 <= lo <= hi`.
    pub fn weighted_integral(&self, w: f64, lo: f64, hi: f64) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let tilted = Term { rate: t.rate + w, ..*t };
            let pieces = antiderivative(tilted);
            let at = |x: f64| {
                pieces
                    .iter()
                    .map(|(p, _)| {
                        let poly = if p.power == 0 { 1.0 } else { x.powi(p.power as i32) };
                        p.coef * poly * (p.rate * x).exp()
                    })
                    .sum::<Complex64>()
            };
            acc += at(hi) - at(lo);
        }
        acc.re
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Antiderivative of `c x^k e^{lambda x}` as terms, each paired with its value at 0.
fn antiderivative(t: Term) -> Vec<(Term, Complex64)> {
    let zero = Complex64::new(0.0, 0.0);
    if t.rate.norm() < COLLISION_TOL {
        let k = t.power + 1;
        return vec![(Term { coef: t.coef / k as f64, rate: zero, power: k }, zero)];
    }
    // int x^k e^{lx} = e^{lx} sum_{j=0}^k (-1)^j k!/(k-j)! x^{k-j} / l^{j+1}
    let mut out = Vec::with_capacity(t.power as usize + 1);
    let mut falling = 1.0;
    for j in 0..=t.power {
        if j > 0 {
            falling *= (t.power - j + 1) as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let coef = t.coef * sign * falling / t.rate.powi(j as i32 + 1);
        let power = t.power - j;
        let at_zero = if power == 0 { coef } else { zero };
        out.push((Term { coef, rate: t.rate, power }, at_zero));
    }
    out
}

/// Closed form of `int_{c}^{z} f(z - y) g(y) dy` as a function of `z >= c >= 0`,
/// where `f` and `g` are pure exponential sums (no polynomial factors).
/// Coincident exponents produce `z e^{u z}` terms.
pub fn convolve(f: &ExpSum, g: &ExpSum, c: f64) -> ExpSum {
    debug_assert!(c >= 0.0);
    let mut terms = Vec::with_capacity(2 * f.terms.len() * g.terms.len());
    for a in &f.terms {
        debug_assert_eq!(a.power, 0);
        for b in &g.terms {
            debug_assert_eq!(b.power, 0);
            let k = a.coef * b.coef;
            let d = b.rate - a.rate;
            if d.norm() < COLLISION_TOL {
                terms.push(Term { coef: k, rate: a.rate, power: 1 });
                terms.push(Term { coef: -k * c, rate: a.rate, power: 0 });
            } else {
                terms.push(Term::exp(k / d, b.rate));
                terms.push(Term::exp(-k * (d * c).exp() / d, a.rate));
            }
        }
    }
    ExpSum::new(terms, BelowZero::Zero)
}

/// Point evaluation of `int_{lower}^{z} f(z - y) g(y) dy` where `f` vanishes
/// on negatives and `g` follows its own below-zero rule (which must be
/// constant there). Returns 0 when the range is empty.
pub fn convolve_at(f: &ExpSum, g: &ExpSum, lower: f64, z: f64) -> f64 {
    if z <= lower {
        return 0.0;
    }
    let mut total = 0.0;
    let pos_lo = lower.max(0.0);
    if z > pos_lo {
        total += pair_integral(f, g.terms.iter().copied(), pos_lo, z, z);
    }
    if lower < 0.0 {
        let (k, slope) = g.below_zero.coefficients();
        assert!(slope == 0.0, "convolution against a sloped below-zero rule");
        if k != 0.0 {
            let hi = z.min(0.0);
            total += pair_integral(f, std::iter::once(Term::constant(k)), lower, hi, z);
        }
    }
    total
}

/// `int_lo^hi f(z - y) g(y) dy` for pure-exponential `f` and the given `g` terms.
fn pair_integral(f: &ExpSum, g: impl Iterator<Item = Term> + Clone, lo: f64, hi: f64, z: f64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in &f.terms {
        debug_assert_eq!(a.power, 0);
        for b in g.clone() {
            debug_assert_eq!(b.power, 0);
            let k = a.coef * b.coef;
            let d = b.rate - a.rate;
            if d.norm() < COLLISION_TOL {
                acc += k * (a.rate * z).exp() * (hi - lo);
            } else {
                let upper = (a.rate * z + d * hi).exp();
                let lower = (a.rate * z + d * lo).exp();
                acc += k * (upper - lower) / d;
            }
        }
    }
    acc.re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let n = if n % 2 == 1 { n + 1 } else { n };
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    fn sample() -> ExpSum {
        ExpSum::new(
            vec![
                Term::real(0.7, 1.3),
                Term::exp(Complex64::new(0.2, 0.1), Complex64::new(-0.5, 0.8)),
                Term::exp(Complex64::new(0.2, -0.1), Complex64::new(-0.5, -0.8)),
                Term::real(-0.4, -2.0),
            ],
            BelowZero::Zero,
        )
    }

    #[test]
    fn below_zero_rules() {
        let f = sample();
        assert_eq!(f.eval(-1.0), 0.0);
        let z = f.integral().scaled(0.3).plus_constant(1.0);
        assert_eq!(z.below_zero(), BelowZero::One);
        assert_eq!(z.eval(-3.0), 1.0);
        assert_eq!(z.integral().below_zero(), BelowZero::Identity);
        assert_eq!(z.integral().eval(-3.0), -3.0);
    }

    #[test]
    fn conjugate_pairs_are_real() {
        let f = sample();
        for x in [0.0, 1.0, 5.0] {
            let v = f.eval_positive(x);
            assert!(v.im.abs() < 1e-12 * v.re.abs() + 1e-14);
        }
    }

    #[test]
    fn integral_and_derivative_invert() {
        let f = sample();
        let big = f.integral();
        for x in [0.1, 0.9, 2.5] {
            let h = 1e-5;
            let fd = (big.eval(x + h) - big.eval(x - h)) / (2.0 * h);
            assert!((fd - f.eval(x)).abs() < 1e-8);
            let quad = simpson(|y| f.eval(y), 0.0, x, 2000);
            assert!((quad - big.eval(x)).abs() < 1e-10);
            assert!((big.derivative().eval(x) - f.eval(x)).abs() < 1e-12);
        }
        // polynomial-times-exponential terms integrate too
        let p = ExpSum::new(
            vec![Term { coef: Complex64::new(1.5, 0.0), rate: Complex64::new(-0.7, 0.0), power: 2 }],
            BelowZero::Zero,
        );
        let quad = simpson(|y| p.eval(y), 0.0, 3.0, 4000);
        assert!((p.integral().eval(3.0) - quad).abs() < 1e-10);
    }

    #[test]
    fn overflow_guard() {
        let f = ExpSum::new(vec![Term::real(1.0, 3.0), Term::real(-1.0, 2.9)], BelowZero::Zero);
        let v = f.eval(230.0);
        assert!(v.is_finite());
        let expected = (690.0f64 - 650.0).exp() * (1.0 - (-23.0f64).exp()) * 650f64.exp();
        assert!(((v - expected) / expected).abs() < 1e-12);
    }

    #[test]
    fn laplace_closed_form() {
        let f = sample();
        let theta = 2.0;
        let numeric = simpson(|x| (-theta * x).exp() * f.eval(x), 0.0, 60.0, 200_000);
        assert!((f.laplace(theta).unwrap() - numeric).abs() < 1e-9);
        assert!(f.laplace(1.0).is_none());
    }

    #[test]
    fn shifted_matches() {
        let f = sample();
        let g = f.shifted(0.75);
        for x in [0.0, 0.3, 2.0] {
            assert!((g.eval(x) - f.eval(x + 0.75)).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_integral_matches_quadrature() {
        let f = sample();
        let got = f.weighted_integral(-0.4, 0.5, 3.0);
        let quad = simpson(|x| f.eval(x) * (-0.4 * x).exp(), 0.5, 3.0, 4000);
        assert!((got - quad).abs() < 1e-11);
    }

    #[test]
    fn convolution_forms_agree() {
        let f = sample();
        let g = sample().integral().plus_constant(1.0);
        let c = 0.8;
        let sym = convolve(&f, &g, c);
        for z in [0.8, 1.5, 4.0] {
            let quad = simpson(|y| f.eval(z - y) * g.eval(y), c, z, 4000);
            assert!((convolve_at(&f, &g, c, z) - quad).abs() < 1e-10 * quad.abs().max(1.0));
            assert!((sym.eval(z) - quad).abs() < 1e-10 * quad.abs().max(1.0));
        }
        // negative lower limit picks up g's below-zero value
        let quad = simpson(|y| f.eval(1.2 - y) * g.eval(y), -0.9, 0.0, 4000)
            + simpson(|y| f.eval(1.2 - y) * g.eval(y), 0.0, 1.2, 4000);
        assert!((convolve_at(&f, &g, -0.9, 1.2) - quad).abs() < 1e-10);
        assert_eq!(convolve_at(&f, &g, 2.0, 1.0), 0.0);
    }

    #[test]
    fn collision_emits_polynomial_term() {
        let f = ExpSum::new(vec![Term::real(1.0, -0.5)], BelowZero::Zero);
        let g = ExpSum::new(vec![Term::real(2.0, -0.5)], BelowZero::Zero);
        let sym = convolve(&f, &g, 0.0);
        assert!(sym.terms().iter().any(|t| t.power == 1));
        // int_0^z e^{-(z-y)/2} 2 e^{-y/2} dy = 2 z e^{-z/2}
        for z in [0.5f64, 2.0] {
            let want = 2.0 * z * (-0.5 * z).exp();
            assert!((sym.eval(z) - want).abs() < 1e-14);
            assert!((convolve_at(&f, &g, 0.0, z) - want).abs() < 1e-14);
        }
    }
}
