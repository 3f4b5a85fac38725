//! Scale functions of `-Y` and `-X` in closed form and the functions derived
//! from them.
//!
//! Naming follows the processes: the `Y` family holds the blackboard-bold
//! functions (`WW`, `ZZ`, ...), the `X` family the plain ones (`W`, `Z`, ...).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expsum::{self, BelowZero, ExpSum, Side, Term};
use crate::levy_model::{LevyModel, Process, RootSet};

const INVERSE_CAP: f64 = 1e6;

/// The scale function of one process with its integrals and derivatives.
#[derive(Debug, Clone)]
pub struct ScaleFamily {
    pub roots: RootSet,
    /// `W`, `W'`, `W''` (zero below 0).
    w: [ExpSum; 3],
    /// `W-bar(x) = int_0^x W`.
    wbar: ExpSum,
    /// `Z`, `Z' = qW`, `Z'' = qW'`.
    z: [ExpSum; 3],
    /// `Z-bar(x) = int_0^x Z`.
    zbar: ExpSum,
}

impl ScaleFamily {
    fn build(roots: RootSet, q: f64) -> Self {
        let mut terms = vec![Term::real(roots.lead_coefficient, roots.positive_root)];
        for (root, residue) in roots.negative_roots.iter().zip(&roots.residues) {
            terms.push(Term::exp(-residue, *root));
        }
        let w0 = ExpSum::new(terms, BelowZero::Zero);
        let w1 = w0.derivative();
        let w2 = w1.derivative();
        let wbar = w0.integral();
        let z0 = wbar.scaled(q).plus_constant(1.0);
        let z1 = w0.scaled(q);
        let z2 = w1.scaled(q);
        let zbar = z0.integral();
        Self { roots, w: [w0, w1, w2], wbar, z: [z0, z1, z2], zbar }
    }

    pub fn w(&self) -> &ExpSum {
        &self.w[0]
    }

    /// `n`-th derivative of `W`, `n <= 2`.
    pub fn w_deriv(&self, n: usize) -> &ExpSum {
        &self.w[n]
    }

    pub fn wbar(&self) -> &ExpSum {
        &self.wbar
    }

    pub fn z(&self) -> &ExpSum {
        &self.z[0]
    }

    pub fn z_deriv(&self, n: usize) -> &ExpSum {
        &self.z[n]
    }

    pub fn zbar(&self) -> &ExpSum {
        &self.zbar
    }
}

/// Monotone functions with a well-defined inverse on `[f(0), inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotone {
    Z,
    ZBar,
}

/// Scale functions of both processes at a fixed discount rate `q`.
#[derive(Debug, Clone)]
pub struct ScaleSet {
    q: f64,
    delta: f64,
    psi_x_prime_zero: f64,
    psi_y_prime_zero: f64,
    y: ScaleFamily,
    x: ScaleFamily,
    /// `R(z) = Z-bar(z) + psi_X'(0+)/q`, with `R(z) = z + psi_X'(0+)/q` below 0.
    r: ExpSum,
}

/// Boundary behaviour of a scale function at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryValues {
    pub w_zero: f64,
    pub w_prime_zero: f64,
}

impl ScaleSet {
    pub fn build(model: &LevyModel, q: f64) -> Result<Self> {
        let ry = model.negative_roots(Process::Y, q)?;
        let rx = model.negative_roots(Process::X, q)?;
        let psi_x_prime_zero = model.psi_prime_zero(Process::X);
        let y = ScaleFamily::build(ry, q);
        let x = ScaleFamily::build(rx, q);
        let r = x.zbar.plus_constant(psi_x_prime_zero / q);
        Ok(Self {
            q,
            delta: model.delta(),
            psi_x_prime_zero,
            psi_y_prime_zero: model.psi_prime_zero(Process::Y),
            y,
            x,
            r,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn psi_prime_zero(&self, which: Process) -> f64 {
        match which {
            Process::Y => self.psi_y_prime_zero,
            Process::X => self.psi_x_prime_zero,
        }
    }

    pub fn family(&self, which: Process) -> &ScaleFamily {
        match which {
            Process::Y => &self.y,
            Process::X => &self.x,
        }
    }

    /// `R(z)`.
    pub fn big_r(&self) -> &ExpSum {
        &self.r
    }

    pub fn boundary_values(&self, which: Process) -> BoundaryValues {
        let fam = self.family(which);
        BoundaryValues { w_zero: fam.w().eval(0.0), w_prime_zero: fam.w_deriv(1).eval(0.0) }
    }

    /// `r_c(z) = Z(z) + q delta int_c^z WW(z - y) W(y) dy`.
    pub fn r_fn(&self, c: f64, z: f64) -> f64 {
        self.r_deriv(c, z, 0, Side::Above)
    }

    /// `r~_c(z) = R(z) + delta int_c^z WW(z - y) Z(y) dy`.
    pub fn rt_fn(&self, c: f64, z: f64) -> f64 {
        self.rt_deriv(c, z, 0, Side::Above)
    }

    /// `n`-th derivative (`n <= 2`) of `z -> r_c(z)`, one-sided at the kinks
    /// `z = 0` and `z = c`.
    pub fn r_deriv(&self, c: f64, z: f64, n: usize, side: Side) -> f64 {
        let base = self.x.z_deriv(n).eval_side(z, side);
        base + self.q * self.delta * self.conv_deriv(&self.x.w, c, z, n, side)
    }

    pub fn rt_deriv(&self, c: f64, z: f64, n: usize, side: Side) -> f64 {
        let base = match n {
            0 => self.r.eval_side(z, side),
            k => self.x.z_deriv(k - 1).eval_side(z, side),
        };
        base + self.delta * self.conv_deriv(&self.x.z, c, z, n, side)
    }

    /// `d^n/dz^n int_c^z WW(z - y) g(y) dy` with `g` given by its derivatives.
    fn conv_deriv(&self, g: &[ExpSum; 3], c: f64, z: f64, n: usize, side: Side) -> f64 {
        let inside = z > c || (z == c && side == Side::Above);
        if !inside {
            return 0.0;
        }
        let f = &self.y.w;
        let mut acc = 0.0;
        for k in 0..n {
            acc += f[k].eval(0.0) * g[n - 1 - k].eval_side(z, side);
        }
        acc + expsum::convolve_at(&f[n], &g[0], c, z)
    }

    /// Unique `x >= 0` with `f(x) = y` for the increasing `Z` or `Z-bar`.
    pub fn inverse(&self, which: Process, kind: Monotone, y: f64) -> Result<f64> {
        let fam = self.family(which);
        let (f, df) = match kind {
            Monotone::Z => (fam.z(), fam.z_deriv(1)),
            Monotone::ZBar => (fam.zbar(), fam.z()),
        };
        // exact values at 0; the sums reproduce them only to rounding
        let f0 = match kind {
            Monotone::Z => 1.0,
            Monotone::ZBar => 0.0,
        };
        if !(y >= f0) {
            return Err(Error::OutOfRange {
                value: y,
                reason: format!("inverse needs y >= f(0) = {f0}"),
            });
        }
        if y == f0 {
            return Ok(0.0);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while f.eval(hi) < y {
            lo = hi;
            hi *= 2.0;
            if hi > INVERSE_CAP {
                return Err(Error::OutOfRange { value: y, reason: "inverse bracket exceeded".into() });
            }
        }
        // Safeguarded Newton: the bracket always shrinks.
        let mut x = 0.5 * (lo + hi);
        for _ in 0..300 {
            let fx = f.eval(x) - y;
            if fx == 0.0 {
                return Ok(x);
            }
            if fx > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = df.eval(x);
            let mut next = x - fx / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(1e-300) || hi - lo <= f64::EPSILON * hi {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }

    /// `|int_0^inf e^{-theta x} W(x) dx - 1/(psi(theta) - q)|` with the
    /// transform evaluated termwise.
    pub fn verify_laplace(&self, model: &LevyModel, which: Process, theta: f64) -> Result<f64> {
        let fam = self.family(which);
        if !(theta > fam.roots.positive_root) {
            return Err(Error::OutOfRange {
                value: theta,
                reason: format!("transform diverges for theta <= {}", fam.roots.positive_root),
            });
        }
        let lhs = fam
            .w()
            .laplace(theta)
            .ok_or(Error::OutOfRange { value: theta, reason: "transform diverges".into() })?;
        let rhs = 1.0 / (model.psi(which, theta)? - self.q);
        Ok((lhs - rhs).abs())
    }

    /// `int_0^a WW(y) e^{-Phi(q) y} dy` in closed form.
    pub fn ww_tilted_integral(&self, a: f64) -> f64 {
        self.y.w().weighted_integral(-self.x.roots.positive_root, 0.0, a.max(0.0))
    }
}

/// Imaginary residue of the raw complex scale-function sum at `x`, relative to
/// its real magnitude (conjugate-closure diagnostic).
pub fn imaginary_ratio(f: &ExpSum, x: f64) -> f64 {
    let v: Complex64 = f.eval_positive(x);
    v.im.abs() / v.re.abs().max(1e-300)
}
