//! Hyperbolicity analysis of fully second-order PDE systems through their
//! quadratic matrix pencils.
//!
//! Given the constant-coefficient principal part of a second-order system
//! and a foliation covector, the crate builds, per spatial direction, the
//! monic quadratic pencil S(lambda) and its 2N x 2N companion pencil
//! M(lambda), computes eigenvalues with algebraic and geometric
//! multiplicities, decides strict/strong/weak hyperbolicity over sampled
//! directions, and constructs the explicit diagonalization of M together
//! with the factorization of S into two first-order pencils.

pub mod classify;
pub mod eigenstruct;
pub mod error;
pub mod factorize;
pub mod matcore;
pub mod models;
pub mod pencil;

pub use classify::{
    classify_direction, classify_system, sample_directions, uniformity_scan, DirectionVerdict,
    HyperbolicityClass, SampleScheme, ScanConfig, SphereReport, UniformityNorms, WeakReason,
};
pub use eigenstruct::{kernel_correspondence, reality_check, spectrum, SpectralData};
pub use error::{Error, Result};
pub use factorize::{
    b_zero_path, build_factors, build_p, factorize_pencil, select_eigenbasis,
    verify_factorization, verify_p, PencilFactorization,
};
pub use matcore::{cluster, det_poly, eig, kernel_basis, numerical_rank, CMat, Poly, RMat, Tolerances};
pub use pencil::{
    build_companion, build_from_ft2s, build_quadratic, decompose, det_identity_residual,
    CompanionPencil, QuadraticPencil, SecondOrderSystem,
};

/// Sign convention recorded in every report: perturbations are
/// exp(lambda t + khat . x), so the reported eigenvalues are the values of
/// lambda at which det S(lambda) vanishes for the chosen unit direction.
pub const CONVENTION_NOTE: &str = "perturbation ansatz exp(lambda*t + khat.x); reported \
eigenvalues are the roots of det S(lambda) per unit spatial direction khat, with the same \
foliation covector n used for both the pencil and any closed-form cross-checks";
