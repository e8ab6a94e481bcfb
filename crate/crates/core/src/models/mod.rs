//! Built-in model systems: the almost-wave family, isotropic and
//! directional wave operators, squared first-order operators, and the
//! gauge-fixed electromagnetic system with its analytic eigensystem.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::matcore::{self, RMat, Tolerances};
use crate::pencil::SecondOrderSystem;

pub mod maxwell;

pub use maxwell::{
    maxwell_block_structure, maxwell_case_classify, maxwell_eigenvalues, maxwell_eigenvectors,
    maxwell_system, BlockReport, CaseReport, ConeCase, LorentzianSampler, MaxwellConfig,
    MaxwellEigensystem, MaxwellRoots, Metric4, SamplerOptions,
};

fn scalar(x: f64) -> RMat {
    RMat::from_element(1, 1, x)
}

/// (dt^2 - (a+b) dt dx + a b dx^2) phi = 0 in one spatial dimension.
/// Strictly hyperbolic for a != b, weakly hyperbolic for a = b, and the
/// standard wave equation for b = -a.
pub fn almost_wave(a: f64, b: f64) -> SecondOrderSystem {
    let coeffs = vec![
        scalar(1.0),
        scalar(-(a + b) / 2.0),
        scalar(-(a + b) / 2.0),
        scalar(a * b),
    ];
    SecondOrderSystem::new_adapted(2, 1, coeffs).expect("almost-wave coefficients are valid")
}

/// The scalar wave operator dt^2 - laplacian in `spatial_dim` dimensions.
pub fn wave(spatial_dim: usize) -> SecondOrderSystem {
    let d = spatial_dim + 1;
    let mut coeffs = vec![RMat::zeros(1, 1); d * d];
    coeffs[0] = scalar(1.0);
    for i in 1..d {
        coeffs[i * d + i] = scalar(-1.0);
    }
    SecondOrderSystem::new_adapted(d, 1, coeffs).expect("wave coefficients are valid")
}

/// dt^2 - dx^2 embedded in two spatial dimensions: the y-direction carries
/// no second-order term, so the system degenerates at khat = (0, +-1) and
/// its inverse commutator norm grows like 1/(2 |k_x|).
pub fn directional_wave() -> SecondOrderSystem {
    let d = 3;
    let mut coeffs = vec![RMat::zeros(1, 1); d * d];
    coeffs[0] = scalar(1.0);
    coeffs[d + 1] = scalar(-1.0);
    SecondOrderSystem::new_adapted(d, 1, coeffs).expect("coefficients are valid")
}

/// The second-order system obtained by applying (1 dt + B^i di) twice:
/// A = 1, first-order coefficient 2 B^i, second-order coefficient B^i B^j.
///
/// Whether the underlying first-order operator is strongly hyperbolic is
/// the caller's claim; see [`first_order_strongly_hyperbolic`].
pub fn repeated_operator(bmats: &[RMat]) -> Result<SecondOrderSystem> {
    let sd = bmats.len();
    if sd == 0 {
        return Err(Error::Invalid("need at least one spatial coefficient".into()));
    }
    let n = bmats[0].nrows();
    for m in bmats {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Invalid("all B^i must be square of equal size".into()));
        }
    }
    let d = sd + 1;
    let mut coeffs = vec![RMat::zeros(n, n); d * d];
    coeffs[0] = RMat::identity(n, n);
    for i in 1..d {
        // dt di cross terms: the constructor symmetrizes, so place the full
        // 2 B^i split across both slots.
        coeffs[i] = bmats[i - 1].clone();
        coeffs[i * d] = bmats[i - 1].clone();
        for j in 1..d {
            coeffs[i * d + j] = &bmats[i - 1] * &bmats[j - 1];
        }
    }
    SecondOrderSystem::new_adapted(d, n, coeffs)
}

/// Check that B^i khat_i is diagonalizable with real eigenvalues at each of
/// the given directions, the first-order strong-hyperbolicity precondition
/// of the squared operator.
pub fn first_order_strongly_hyperbolic(
    bmats: &[RMat],
    samples: &[DVector<f64>],
    tol: &Tolerances,
) -> Result<bool> {
    let n = bmats[0].nrows();
    for khat in samples {
        if khat.len() != bmats.len() {
            return Err(Error::Invalid("direction dimension mismatch".into()));
        }
        let mut bk = RMat::zeros(n, n);
        for (i, m) in bmats.iter().enumerate() {
            bk += m * khat[i];
        }
        let (vals, vecs) = matcore::eig(&matcore::to_complex(&bk))?;
        for v in &vals {
            if v.im.abs() > tol.imag_tol * (1.0 + v.norm()) {
                return Ok(false);
            }
        }
        let rank = matcore::numerical_rank(&vecs, tol);
        if rank < n {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_direction, HyperbolicityClass, WeakReason};
    use approx::assert_relative_eq;

    #[test]
    fn almost_wave_cases() {
        let tol = Tolerances::default();
        let k = DVector::from_vec(vec![1.0]);

        let strict = classify_direction(&almost_wave(2.0, 3.0), &k, &tol).unwrap();
        assert_eq!(strict.class, HyperbolicityClass::StrictlyHyperbolic);

        let weak = classify_direction(&almost_wave(2.0, 2.0), &k, &tol).unwrap();
        assert_eq!(
            weak.class,
            HyperbolicityClass::WeaklyHyperbolic {
                reason: WeakReason::MultiplicityGap
            }
        );
        assert_eq!(weak.spectral.alg_mult, vec![2]);
        assert_eq!(weak.spectral.geo_mult, vec![1]);
    }

    #[test]
    fn almost_wave_recovers_standard_wave() {
        let aw = almost_wave(1.0, -1.0);
        let w = wave(1);
        for a in 0..2 {
            for b in 0..2 {
                assert_relative_eq!(
                    (aw.coeff(a, b) - w.coeff(a, b)).norm(),
                    0.0,
                    epsilon = 1e-15
                );
            }
        }
    }

    #[test]
    fn repeated_scalar_operator_is_almost_wave() {
        // (dt - a dx)^2 corresponds to B = -a.
        let a = 1.7;
        let sys = repeated_operator(&[scalar(-a)]).unwrap();
        let aw = almost_wave(a, a);
        for p in 0..2 {
            for q in 0..2 {
                assert_relative_eq!(
                    (sys.coeff(p, q) - aw.coeff(p, q)).norm(),
                    0.0,
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn repeated_operator_halves_geometric_multiplicity() {
        let tol = Tolerances::default();
        // B with a repeated eigenvalue: the squared system still has
        // s = q / 2 at every root.
        let b = RMat::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 5.0]);
        let sys = repeated_operator(&[b]).unwrap();
        let v = classify_direction(&sys, &DVector::from_vec(vec![1.0]), &tol).unwrap();
        assert_eq!(
            v.class,
            HyperbolicityClass::WeaklyHyperbolic {
                reason: WeakReason::MultiplicityGap
            }
        );
        for (q, s) in v.spectral.alg_mult.iter().zip(&v.spectral.geo_mult) {
            assert_eq!(*s * 2, *q);
        }
    }

    #[test]
    fn first_order_check_distinguishes() {
        let tol = Tolerances::default();
        let samples = vec![DVector::from_vec(vec![1.0]), DVector::from_vec(vec![-1.0])];
        let diag = vec![RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0])];
        assert!(first_order_strongly_hyperbolic(&diag, &samples, &tol).unwrap());
        let jordan = vec![RMat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])];
        assert!(!first_order_strongly_hyperbolic(&jordan, &samples, &tol).unwrap());
        let rotation = vec![RMat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])];
        assert!(!first_order_strongly_hyperbolic(&rotation, &samples, &tol).unwrap());
    }
}
