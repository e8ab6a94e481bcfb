use num_complex::Complex64;

/// Errors produced by the pencil analysis pipeline.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("eigenvalue iteration failed to converge within {0} sweeps")]
    NonConvergence(usize),

    #[error("matrix is numerically singular (smallest/largest singular value = {0:.3e})")]
    Singular(f64),

    #[error(
        "interpolated determinant is not a polynomial of degree <= {degree}: \
         holdout residual {residual:.3e} exceeds tolerance"
    )]
    DegreeExceeded { degree: usize, residual: f64 },

    #[error(
        "system is not fully second order: the time-time coefficient block is \
         numerically singular (singular value ratio {0:.3e})"
    )]
    NotFullySecondOrder(f64),

    #[error("the first-order-in-time coupling matrix A2 is numerically singular")]
    SingularGauge,

    #[error(
        "kernel dimensions of the companion and quadratic pencils differ: \
         dim ker M = {m_dim}, dim ker S = {s_dim}"
    )]
    CorrespondenceViolation { m_dim: usize, s_dim: usize },

    #[error(
        "eigenvalue {eigenvalue:.6} is defective: geometric multiplicity {geometric} \
         < algebraic multiplicity {algebraic}"
    )]
    Defective {
        eigenvalue: f64,
        geometric: usize,
        algebraic: usize,
    },

    #[error(
        "no eigenvector partition satisfies both determinant conditions \
         ({tried} partitions tried)"
    )]
    NoAdmissiblePartition { tried: usize },

    #[error("zero characteristic speed: eigenvalue {0:.3e} of -A^-1 C is not bounded away from zero")]
    ZeroSpeed(f64),

    #[error("non-real characteristic speeds: -A^-1 C has eigenvalue {0}")]
    ComplexSpeeds(Complex64),

    #[error("non-real eigenvalue {0} where a real spectrum is required")]
    NonRealEigenvalue(Complex64),

    #[error("a quadratic-formula discriminant is negative ({0:.3e}): configuration is not Lorentzian along this direction")]
    ComplexRoots(f64),

    #[error("no deterministic direction scheme for {0} spatial dimensions; use the random scheme")]
    UnsupportedDimension(usize),

    #[error("degenerate-case condition not satisfied: {0}")]
    UnsatisfiedCaseCondition(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
