//! Dense eigendecomposition: balancing, complex Schur reduction and
//! triangular back-substitution for the right eigenvectors.

use nalgebra::Schur;
use num_complex::Complex64;

use super::{fix_phases, is_finite, CMat};
use crate::error::{Error, Result};

/// Eigenvalues and unit right eigenvectors of a square complex matrix.
///
/// Pairs satisfy `||m v - lambda v|| <= O(eps) ||m||` for the returned unit
/// vectors; for defective eigenvalues the extra vectors collapse onto the
/// existing eigenspace, which still satisfies the residual contract.
pub fn eig(m: &CMat) -> Result<(Vec<Complex64>, CMat)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Invalid(format!(
            "eig requires a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if !is_finite(m) {
        return Err(Error::Invalid("eig requires finite entries".into()));
    }
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    if n == 1 {
        return Ok((vec![m[(0, 0)]], CMat::identity(1, 1)));
    }

    let (scales, balanced) = balance(m);
    let max_sweeps = 100 * n.max(10);
    let schur = Schur::try_new(balanced, f64::EPSILON, max_sweeps)
        .ok_or(Error::NonConvergence(max_sweeps))?;
    let (q, t) = schur.unpack();

    let eigenvalues: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let t_norm = t.norm().max(f64::MIN_POSITIVE);
    let guard = f64::EPSILON * t_norm;

    // Back-substitute (T - lambda_k I) x = 0 with x[k] = 1, then map through
    // Q and undo the balancing similarity.
    let mut vecs = CMat::zeros(n, n);
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let lam = eigenvalues[k];
        for item in x.iter_mut() {
            *item = Complex64::new(0.0, 0.0);
        }
        x[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * x[j];
            }
            let mut denom = t[(i, i)] - lam;
            if denom.norm() < guard {
                denom = Complex64::new(guard, 0.0);
            }
            x[i] = -s / denom;
        }
        for r in 0..n {
            let mut v = Complex64::new(0.0, 0.0);
            for j in 0..=k {
                v += q[(r, j)] * x[j];
            }
            vecs[(r, k)] = v * scales[r];
        }
        let col_norm = vecs.column(k).norm();
        if col_norm > 0.0 {
            for r in 0..n {
                vecs[(r, k)] /= col_norm;
            }
        }
    }
    fix_phases(&mut vecs);
    Ok((eigenvalues, vecs))
}

/// Parlett–Reinsch balancing by radix-2 diagonal similarity.
/// Returns the diagonal scales d and D^-1 m D.
fn balance(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut scales = vec![1.0f64; n];
    let radix: f64 = 2.0;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0f64;
            let mut r = 0.0f64;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].norm();
                    r += a[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 || !c.is_finite() || !r.is_finite() {
                continue;
            }
            let mut f = 1.0f64;
            let s = c + r;
            let mut c2 = c;
            let mut r2 = r;
            while c2 < r2 / radix {
                c2 *= radix;
                r2 /= radix;
                f *= radix;
            }
            while c2 >= r2 * radix {
                c2 /= radix;
                r2 *= radix;
                f /= radix;
            }
            if (c2 + r2) < 0.95 * s && f != 1.0 {
                converged = false;
                scales[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
    (scales, a)
}
