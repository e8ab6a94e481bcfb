//! Deterministic fixtures shared by the pipeline benchmarks.

use nalgebra::DVector;

use pencilhyp_core::factorize::pencil_from_factors;
use pencilhyp_core::matcore::{to_complex, RMat, Tolerances};
use pencilhyp_core::pencil::QuadraticPencil;

fn lcg(state: &mut u64) -> f64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    ((*state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
}

/// Random monic pencil with entries in [-1, 1].
pub fn random_pencil(n: usize, seed: u64) -> QuadraticPencil {
    let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    let bt = RMat::from_fn(n, n, |_, _| lcg(&mut s));
    let ct = RMat::from_fn(n, n, |_, _| lcg(&mut s));
    QuadraticPencil::from_parts(bt, ct, DVector::from_vec(vec![1.0])).unwrap()
}

/// Diagonalizable pencil with well-separated real eigenvalues, built from a
/// chosen eigenstructure so the factorization path always succeeds.
pub fn separated_factor_pencil(n: usize, seed: u64) -> QuadraticPencil {
    let tol = Tolerances::default();
    let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(3);
    let v1 = to_complex(&(RMat::identity(n, n) + RMat::from_fn(n, n, |_, _| 0.3 * lcg(&mut s))));
    let q = to_complex(&(RMat::identity(n, n) + RMat::from_fn(n, n, |_, _| 0.3 * lcg(&mut s))));
    let d1 = DVector::from_fn(n, |i, _| 0.7 * (2 * i) as f64 - (n as f64) * 0.7 + 0.11);
    let d2 = DVector::from_fn(n, |i, _| 0.7 * (2 * i + 1) as f64 - (n as f64) * 0.7 + 0.13);
    let khat = DVector::from_vec(vec![1.0]);
    pencil_from_factors(&v1, &q, &d1, &d2, khat, &tol).expect("real separated pencil")
}
