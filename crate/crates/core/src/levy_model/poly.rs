//! Real polynomials in ascending-coefficient form and their complex roots.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Characteristic polynomial `det(sI - A)` and the adjugate expansion
/// `adj(sI - A) = sum_k M_k s^{m-k}` by the Leverrier-Faddeev recursion.
///
/// Returns `(char_coeffs, adjugate_terms)` where `char_coeffs` is ascending
/// (length `m + 1`, monic) and `adjugate_terms[k-1] = M_k`.
pub fn leverrier_faddeev(a: &DMatrix<f64>) -> (Vec<f64>, Vec<DMatrix<f64>>) {
    let m = a.nrows();
    let mut coeffs = vec![0.0; m + 1];
    coeffs[m] = 1.0;
    let mut terms = Vec::with_capacity(m);
    let mut prev = DMatrix::<f64>::zeros(m, m);
    for k in 1..=m {
        let mk = a * &prev + DMatrix::identity(m, m) * coeffs[m - k + 1];
        coeffs[m - k] = -(a * &mk).trace() / k as f64;
        terms.push(mk.clone());
        prev = mk;
    }
    (coeffs, terms)
}

pub fn mul(p: &[f64], r: &[f64]) -> Vec<f64> {
    if p.is_empty() || r.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; p.len() + r.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in r.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

pub fn add(p: &[f64], r: &[f64]) -> Vec<f64> {
    let n = p.len().max(r.len());
    (0..n)
        .map(|i| p.get(i).copied().unwrap_or(0.0) + r.get(i).copied().unwrap_or(0.0))
        .collect()
}

/// Drops trailing (leading-order) zero coefficients.
pub fn trim(mut p: Vec<f64>) -> Vec<f64> {
    while p.len() > 1 && p.last() == Some(&0.0) {
        p.pop();
    }
    p
}

#[cfg(test)]
pub fn eval(p: &[f64], s: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

/// All complex roots via eigenvalues of the balanced companion matrix.
pub fn roots(p: &[f64]) -> Vec<Complex64> {
    let p = trim(p.to_vec());
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = p[n];
    let mut c = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        c[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        c[(i, n - 1)] = -p[i] / lead;
    }
    balance(&mut c);
    c.complex_eigenvalues().iter().copied().collect()
}

/// Parlett-Reinsch balancing by powers of two (similarity transform, so the
/// spectrum is unchanged while the eigenvalue problem becomes better scaled).
fn balance(a: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += a[(j, i)].abs();
                    row += a[(i, j)].abs();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let sum = col + row;
            let mut f = 1.0;
            let mut g = row / RADIX;
            while col < g {
                f *= RADIX;
                col *= RADIX * RADIX;
            }
            g = row * RADIX;
            while col > g {
                f /= RADIX;
                col /= RADIX * RADIX;
            }
            if (col + row) / f < 0.95 * sum {
                converged = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= inv;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// `alpha^T M t` for each adjugate term, i.e. the numerator polynomial of the
/// rational transform `alpha (sI - T)^{-1} t`, ascending.
pub fn adjugate_numerator(
    terms: &[DMatrix<f64>],
    alpha: &DVector<f64>,
    exit: &DVector<f64>,
) -> Vec<f64> {
    let m = terms.len();
    let mut out = vec![0.0; m.max(1)];
    for (k, mk) in terms.iter().enumerate() {
        // M_{k+1} multiplies s^{m-k-1}
        out[m - k - 1] = alpha.dot(&(mk * exit));
    }
    out
}
