use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-12;

/// Phase-type law `(m, alpha, T)`: the absorption time of a Markov chain with
/// initial distribution `alpha` and sub-generator `T`.
#[derive(Debug, Clone)]
pub struct PhaseType {
    alpha: DVector<f64>,
    generator: DMatrix<f64>,
    exit: DVector<f64>,
    mean: f64,
    eigenvalues: Vec<Complex64>,
}

impl PhaseType {
    /// Validates and builds a representation from row-major data.
    pub fn new(alpha: Vec<f64>, generator: Vec<Vec<f64>>) -> Result<Self> {
        let m = alpha.len();
        if m == 0 {
            return Err(Error::InvalidPhaseType("alpha must have at least one phase".into()));
        }
        if generator.len() != m {
            return Err(Error::InvalidPhaseType(format!(
                "T has {} rows but alpha has {} entries",
                generator.len(),
                m
            )));
        }
        for (i, row) in generator.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidPhaseType(format!(
                    "row {} of T has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    m
                )));
            }
        }
        if alpha.iter().chain(generator.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPhaseType("entries must be finite".into()));
        }
        if let Some(i) = alpha.iter().position(|&a| a < 0.0) {
            return Err(Error::InvalidPhaseType(format!("alpha[{}] is negative", i + 1)));
        }
        let total: f64 = alpha.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidPhaseType(format!("alpha sums to {total}, expected 1")));
        }

        let t = DMatrix::from_fn(m, m, |i, j| generator[i][j]);
        for i in 0..m {
            if t[(i, i)] >= 0.0 {
                return Err(Error::InvalidPhaseType(format!(
                    "diagonal entry T[{0},{0}] must be strictly negative",
                    i + 1
                )));
            }
            for j in 0..m {
                if i != j && t[(i, j)] < 0.0 {
                    return Err(Error::InvalidPhaseType(format!(
                        "off-diagonal entry T[{},{}] is negative",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let exit = -(&t * DVector::from_element(m, 1.0));
        if let Some(i) = exit.iter().position(|&e| e < -PROB_TOL) {
            return Err(Error::InvalidPhaseType(format!(
                "row {} of T has positive sum (exit rate {})",
                i + 1,
                exit[i]
            )));
        }
        // Clamp roundoff-level negatives from the row sums.
        let exit = exit.map(|e| e.max(0.0));

        let neg_t = -&t;
        let mean = match neg_t.lu().solve(&DVector::from_element(m, 1.0)) {
            Some(v) => DVector::from_vec(alpha.clone()).dot(&v),
            None => {
                return Err(Error::InvalidPhaseType(
                    "T is singular: absorption is not certain".into(),
                ))
            }
        };
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::InvalidPhaseType(format!(
                "mean jump size {mean} must be finite and positive"
            )));
        }

        let eigenvalues = t.clone().complex_eigenvalues().iter().copied().collect();
        Ok(Self { alpha: DVector::from_vec(alpha), generator: t, exit, mean, eigenvalues })
    }

    /// Exponential law with rate `omega`, as the one-phase representation.
    pub fn exponential(omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidPhaseType(format!("exponential rate {omega} must be positive")));
        }
        Self::new(vec![1.0], vec![vec![-omega]])
    }

    pub fn phases(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    /// Exit vector `t = -T 1`.
    pub fn exit(&self) -> &DVector<f64> {
        &self.exit
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Laplace-Stieltjes transform `E[e^{-s Z}] = alpha (sI - T)^{-1} t`.
    pub fn transform(&self, s: Complex64) -> Option<Complex64> {
        let (first, _) = self.resolvent_moments(s, false)?;
        Some(first)
    }

    /// Returns `alpha (sI-T)^{-1} t` and, when requested, `alpha (sI-T)^{-2} t`.
    pub(crate) fn resolvent_moments(
        &self,
        s: Complex64,
        second: bool,
    ) -> Option<(Complex64, Complex64)> {
        let m = self.phases();
        if m == 1 {
            let d = s - self.generator[(0, 0)];
            let t = self.exit[0];
            return Some((t / d, if second { t / (d * d) } else { Complex64::new(0.0, 0.0) }));
        }
        let shifted = DMatrix::from_fn(m, m, |i, j| {
            let diag = if i == j { s } else { Complex64::new(0.0, 0.0) };
            diag - self.generator[(i, j)]
        });
        let lu = shifted.lu();
        let rhs = self.exit.map(|e| Complex64::new(e, 0.0));
        let y = lu.solve(&rhs)?;
        let alpha = self.alpha.map(|a| Complex64::new(a, 0.0));
        let first = alpha.dot(&y);
        let second_val = if second { alpha.dot(&lu.solve(&y)?) } else { Complex64::new(0.0, 0.0) };
        Some((first, second_val))
    }

    /// Draws one jump size by running the underlying chain until absorption.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let m = self.phases();
        let mut state = pick(rng, self.alpha.iter().copied(), 1.0).unwrap_or(0);
        let mut total = 0.0;
        loop {
            let rate = -self.generator[(state, state)];
            let u: f64 = rng.random::<f64>();
            total += -(1.0 - u).ln() / rate;
            // Leave state: absorb with probability exit/rate, else move.
            let weights = (0..m)
                .map(|j| if j == state { self.exit[state] } else { self.generator[(state, j)] });
            match pick(rng, weights, rate) {
                Some(j) if j != state => state = j,
                _ => return total,
            }
        }
    }
}

/// Samples an index from unnormalised weights; `None` if the draw falls past
/// the end (only possible through roundoff).
fn pick<R: rand::Rng + ?Sized>(
    rng: &mut R,
    weights: impl Iterator<Item = f64>,
    total: f64,
) -> Option<usize> {
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.enumerate() {
        acc += w;
        if target < acc {
            return Some(i);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_mean() {
        let pt = PhaseType::exponential(2.0).unwrap();
        assert_eq!(pt.phases(), 1);
        assert!((pt.mean() - 0.5).abs() < 1e-15);
        assert!((pt.exit()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_alpha() {
        let err = PhaseType::new(vec![0.5, 0.4], vec![vec![-1.0, 0.0], vec![0.0, -1.0]]);
        assert!(matches!(err, Err(Error::InvalidPhaseType(_))));
        let err = PhaseType::new(vec![1.1, -0.1], vec![vec![-1.0, 0.0], vec![0.0, -1.0]]);
        assert!(matches!(err, Err(Error::InvalidPhaseType(_))));
    }

    #[test]
    fn rejects_bad_generator() {
        // positive diagonal
        assert!(PhaseType::new(vec![1.0], vec![vec![1.0]]).is_err());
        // negative off-diagonal
        assert!(PhaseType::new(vec![1.0, 0.0], vec![vec![-1.0, -0.5], vec![0.0, -1.0]]).is_err());
        // positive row sum
        assert!(PhaseType::new(vec![1.0, 0.0], vec![vec![-1.0, 2.0], vec![0.0, -1.0]]).is_err());
        // ragged
        assert!(PhaseType::new(vec![1.0, 0.0], vec![vec![-1.0], vec![0.0, -1.0]]).is_err());
        // no exit at all: absorption never happens
        assert!(PhaseType::new(vec![1.0, 0.0], vec![vec![-1.0, 1.0], vec![1.0, -1.0]]).is_err());
    }

    #[test]
    fn erlang_mean_and_transform() {
        // Erlang(2, 3): mean 2/3, transform (3/(3+s))^2.
        let pt = PhaseType::new(vec![1.0, 0.0], vec![vec![-3.0, 3.0], vec![0.0, -3.0]]).unwrap();
        assert!((pt.mean() - 2.0 / 3.0).abs() < 1e-14);
        let s = Complex64::new(0.7, 0.2);
        let expected = (Complex64::new(3.0, 0.0) / (s + 3.0)).powi(2);
        assert!((pt.transform(s).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn sample_mean_matches() {
        use rand::SeedableRng;
        let pt = PhaseType::new(vec![0.3, 0.7], vec![vec![-3.0, 1.0], vec![0.5, -2.0]]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let mean = (0..n).map(|_| pt.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - pt.mean()).abs() < 0.01, "{mean} vs {}", pt.mean());
    }
}
