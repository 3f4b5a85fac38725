//! Surplus process `Y`, its refracted counterpart `X = Y - delta t`, their
//! Laplace exponents, and the roots of `psi(s) = q`.

mod phase_type;
pub(crate) mod poly;

pub use phase_type::PhaseType;

use num_complex::Complex64;

use crate::error::{Error, Result};

const POLE_TOL: f64 = 1e-9;
const DISTINCT_TOL: f64 = 1e-6;
const MAX_BRACKET: f64 = 1e6;

/// Which of the two Levy processes a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Process {
    /// The uncontrolled surplus `Y`.
    Y,
    /// The refracted process `X = Y - delta t`.
    X,
}

/// Spectrally positive jump-diffusion
/// `Y_t = -c_Y t + sigma B_t + sum_{n <= N_t} Z_n` with phase-type jumps.
#[derive(Debug, Clone)]
pub struct LevyModel {
    c_y: f64,
    sigma: f64,
    kappa: f64,
    jumps: PhaseType,
    delta: f64,
}

impl LevyModel {
    pub fn new(c_y: f64, sigma: f64, kappa: f64, jumps: PhaseType, delta: f64) -> Result<Self> {
        for (name, v) in [("c_Y", c_y), ("sigma", sigma), ("kappa", kappa), ("delta", delta)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if sigma < 0.0 {
            return Err(Error::InvalidParameter(format!("sigma = {sigma} must be >= 0")));
        }
        if kappa <= 0.0 {
            return Err(Error::InvalidParameter(format!("kappa = {kappa} must be > 0")));
        }
        if delta <= 0.0 {
            return Err(Error::InvalidParameter(format!("delta = {delta} must be > 0")));
        }
        if sigma == 0.0 && c_y <= 0.0 {
            return Err(Error::SubordinatorPath { c_y });
        }
        Ok(Self { c_y, sigma, kappa, jumps, delta })
    }

    pub fn c_y(&self) -> f64 {
        self.c_y
    }

    pub fn c_x(&self) -> f64 {
        self.c_y + self.delta
    }

    pub fn drift(&self, which: Process) -> f64 {
        match which {
            Process::Y => self.c_y,
            Process::X => self.c_x(),
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn jumps(&self) -> &PhaseType {
        &self.jumps
    }

    pub fn mean_jump(&self) -> f64 {
        self.jumps.mean()
    }

    /// Bounded variation iff there is no Brownian part (jumps are finite activity).
    pub fn bounded_variation(&self) -> bool {
        self.sigma == 0.0
    }

    /// Same model with a different refraction rate.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.c_y, self.sigma, self.kappa, self.jumps.clone(), delta)
    }

    fn check_pole(&self, s: Complex64) -> Result<()> {
        if self.jumps.eigenvalues().iter().any(|e| (s - e).norm() < POLE_TOL) {
            return Err(Error::PoleAtTheta { theta: s.re });
        }
        Ok(())
    }

    /// Laplace exponent on the complex plane (away from the eigenvalues of `T`).
    pub fn psi_complex(&self, which: Process, s: Complex64) -> Result<Complex64> {
        self.check_pole(s)?;
        let (lst, _) = self
            .jumps
            .resolvent_moments(s, false)
            .ok_or(Error::PoleAtTheta { theta: s.re })?;
        Ok(s * self.drift(which) + s * s * (0.5 * self.sigma * self.sigma) + (lst - 1.0) * self.kappa)
    }

    pub fn psi_derivative_complex(&self, which: Process, s: Complex64) -> Result<Complex64> {
        self.check_pole(s)?;
        let (_, second) = self
            .jumps
            .resolvent_moments(s, true)
            .ok_or(Error::PoleAtTheta { theta: s.re })?;
        Ok(Complex64::new(self.drift(which), 0.0) + s * (self.sigma * self.sigma) - second * self.kappa)
    }

    /// `psi(theta)` for real `theta`.
    pub fn psi(&self, which: Process, theta: f64) -> Result<f64> {
        Ok(self.psi_complex(which, Complex64::new(theta, 0.0))?.re)
    }

    /// Exact derivative `psi'(theta)`; at `theta = 0` this is the one-sided `psi'(0+)`.
    pub fn psi_derivative(&self, which: Process, theta: f64) -> Result<f64> {
        Ok(self.psi_derivative_complex(which, Complex64::new(theta, 0.0))?.re)
    }

    /// `psi'(0+)`, i.e. minus the mean drift per unit time.
    pub fn psi_prime_zero(&self, which: Process) -> f64 {
        self.drift(which) - self.kappa * self.jumps.mean()
    }

    /// Largest root of `psi(theta) = q` (`varphi(q)` for `Y`, `Phi(q)` for `X`).
    pub fn positive_root(&self, which: Process, q: f64) -> Result<f64> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!("q = {q} must be positive")));
        }
        let f = |t: f64| self.psi(which, t).map(|v| v - q);
        let mut lo = 0.0;
        let mut hi = 1.0;
        while f(hi)? < 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > MAX_BRACKET {
                return Err(Error::NoBracket { q });
            }
        }
        // Newton from the right is monotone on a convex increasing branch;
        // bisection guards any step leaving the bracket.
        let mut x = hi;
        for _ in 0..200 {
            let fx = f(x)?;
            if fx == 0.0 {
                return Ok(x);
            }
            if fx > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.psi_derivative(which, x)?;
            let mut next = x - fx / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) || hi - lo <= 1e-15 {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }

    /// Roots of `psi(s) = q` with negative real part and their residues.
    pub fn negative_roots(&self, which: Process, q: f64) -> Result<RootSet> {
        let positive = self.positive_root(which, q)?;
        let lead_deriv = self.psi_derivative(which, positive)?;

        let all = self.cleared_roots(which, q)?;
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                if (all[i] - all[j]).norm() < DISTINCT_TOL {
                    return Err(Error::NonDistinctRoots {
                        first: format!("{}", all[i]),
                        second: format!("{}", all[j]),
                    });
                }
            }
        }
        let expected = if self.sigma > 0.0 { self.jumps.phases() + 1 } else { self.jumps.phases() };
        let negatives: Vec<Complex64> = all.into_iter().filter(|z| z.re < 0.0).collect();
        if negatives.len() != expected {
            return Err(Error::WrongRootCount { expected, found: negatives.len() });
        }
        let negatives = conjugate_close(negatives);

        let mut residues: Vec<Complex64> = Vec::with_capacity(negatives.len());
        for &z in &negatives {
            let mirrored = if z.im < 0.0 {
                negatives.iter().position(|w| *w == z.conj()).filter(|&k| k < residues.len())
            } else {
                None
            };
            let r = match mirrored {
                Some(k) => residues[k].conj(),
                None => -1.0 / self.psi_derivative_complex(which, z)?,
            };
            residues.push(r);
        }

        Ok(RootSet {
            q,
            which,
            positive_root: positive,
            negative_roots: negatives,
            residues,
            lead_coefficient: 1.0 / lead_deriv,
        })
    }

    /// Clears `psi(s) - q` to a polynomial, finds every root from the
    /// companion matrix, and polishes each with Newton steps on the rational form.
    fn cleared_roots(&self, which: Process, q: f64) -> Result<Vec<Complex64>> {
        let (char_poly, adj) = poly::leverrier_faddeev(self.jumps.generator());
        let numer = poly::adjugate_numerator(&adj, self.jumps.alpha(), self.jumps.exit());
        let quad = [
            -self.kappa - q,
            self.drift(which),
            0.5 * self.sigma * self.sigma,
        ];
        let cleared = poly::add(
            &poly::mul(&quad, &char_poly),
            &numer.iter().map(|c| c * self.kappa).collect::<Vec<_>>(),
        );
        let mut roots = poly::roots(&cleared);
        for z in roots.iter_mut() {
            *z = self.polish(which, q, *z);
        }
        Ok(roots)
    }

    fn polish(&self, which: Process, q: f64, mut z: Complex64) -> Complex64 {
        for _ in 0..2 {
            let (Ok(f), Ok(d)) = (self.psi_complex(which, z), self.psi_derivative_complex(which, z))
            else {
                return z;
            };
            let step = (f - q) / d;
            let cand = z - step;
            match self.psi_complex(which, cand) {
                Ok(fc) if (fc - q).norm() <= (f - q).norm() && cand.re.is_finite() => z = cand,
                _ => return z,
            }
        }
        z
    }
}

/// Snaps near-real roots onto the real axis and makes complex pairs exact
/// conjugates, ordered by decreasing real part with the upper root first.
fn conjugate_close(mut roots: Vec<Complex64>) -> Vec<Complex64> {
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for z in roots.iter_mut() {
        if z.im.abs() < 1e-10 * scale {
            z.im = 0.0;
        }
    }
    let mut out: Vec<Complex64> = Vec::with_capacity(roots.len());
    let mut used = vec![false; roots.len()];
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by(|&a, &b| roots[b].re.total_cmp(&roots[a].re).then(roots[b].im.total_cmp(&roots[a].im)));
    for &i in &order {
        if used[i] {
            continue;
        }
        used[i] = true;
        let z = roots[i];
        if z.im == 0.0 {
            out.push(z);
            continue;
        }
        // nearest unused root to the conjugate
        let partner = order
            .iter()
            .copied()
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (roots[a] - z.conj()).norm().total_cmp(&(roots[b] - z.conj()).norm()));
        let upper = Complex64::new(z.re, z.im.abs());
        match partner {
            Some(j) => {
                used[j] = true;
                let w = roots[j];
                let avg = Complex64::new(0.5 * (z.re + w.re), 0.5 * (z.im.abs() + w.im.abs()));
                out.push(avg);
                out.push(avg.conj());
            }
            None => out.push(upper),
        }
    }
    out
}

/// Roots of `psi(s) = q` for one process, with the coefficients of the
/// exponential-sum form of its scale function.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub q: f64,
    pub which: Process,
    /// `varphi(q)` or `Phi(q)`.
    pub positive_root: f64,
    /// The roots `-zeta_i` / `-xi_i` themselves (negative real part).
    pub negative_roots: Vec<Complex64>,
    /// `-1 / psi'(root)` for each negative root.
    pub residues: Vec<Complex64>,
    /// `1 / psi'(positive_root)`.
    pub lead_coefficient: f64,
}
