//! Second-order systems and their directional pencils.
//!
//! A system is the constant-coefficient principal part N^{ab} (d x d array
//! of N x N real matrices, symmetrized over the derivative indices) plus a
//! foliation covector n_a. Per unit spatial direction khat this module
//! builds the monic quadratic pencil S(lambda) = lambda^2 1 + lambda A^-1 B
//! + A^-1 C and its first-order companion M(lambda).

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{self, det_poly, to_complex, CMat, RMat, Tolerances};

/// Constant-coefficient principal part of a fully second-order system.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderSystem {
    dim: usize,
    components: usize,
    /// d*d matrices, index a*d + b, symmetrized over (a, b).
    coeffs: Vec<RMat>,
    n_cov: DVector<f64>,
}

impl SecondOrderSystem {
    /// Build from the raw coefficient array. Only the part of the array
    /// symmetric in the two derivative indices acts on the solution, so the
    /// coefficients are symmetrized here once and for all.
    pub fn new(dim: usize, components: usize, coeffs: Vec<RMat>, n_cov: DVector<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Invalid(format!(
                "need at least one time and one spatial dimension, got d={dim}"
            )));
        }
        if components == 0 {
            return Err(Error::Invalid("component count must be positive".into()));
        }
        if coeffs.len() != dim * dim {
            return Err(Error::Invalid(format!(
                "expected {} coefficient matrices, got {}",
                dim * dim,
                coeffs.len()
            )));
        }
        for (idx, m) in coeffs.iter().enumerate() {
            if m.nrows() != components || m.ncols() != components {
                return Err(Error::Invalid(format!(
                    "coefficient {} has shape {}x{}, expected {components}x{components}",
                    idx,
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::Invalid(format!("coefficient {idx} has non-finite entries")));
            }
        }
        if n_cov.len() != dim {
            return Err(Error::Invalid(format!(
                "foliation covector has length {}, expected {dim}",
                n_cov.len()
            )));
        }
        if n_cov.iter().any(|x| !x.is_finite()) || n_cov.norm() == 0.0 {
            return Err(Error::Invalid("foliation covector must be finite and nonzero".into()));
        }
        let mut sym = vec![RMat::zeros(components, components); dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                let half = (&coeffs[a * dim + b] + &coeffs[b * dim + a]) * 0.5;
                sym[a * dim + b] = half;
            }
        }
        Ok(Self {
            dim,
            components,
            coeffs: sym,
            n_cov,
        })
    }

    /// Same, with the foliation covector adapted to the time coordinate.
    pub fn new_adapted(dim: usize, components: usize, coeffs: Vec<RMat>) -> Result<Self> {
        let mut n = DVector::zeros(dim);
        n[0] = 1.0;
        Self::new(dim, components, coeffs, n)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spatial_dim(&self) -> usize {
        self.dim - 1
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeff(&self, a: usize, b: usize) -> &RMat {
        &self.coeffs[a * self.dim + b]
    }

    pub fn foliation(&self) -> &DVector<f64> {
        &self.n_cov
    }

    /// Largest coefficient norm, the natural scale for residual checks.
    pub fn scale(&self) -> f64 {
        self.coeffs
            .iter()
            .map(matcore::spectral_norm_r)
            .fold(0.0, f64::max)
            .max(1.0)
    }

    /// Contraction N^{ab} l_a l_b for a full spacetime covector l.
    pub fn contract(&self, l: &DVector<Complex64>) -> CMat {
        let mut out = CMat::zeros(self.components, self.components);
        for a in 0..self.dim {
            for b in 0..self.dim {
                let w = l[a] * l[b];
                if w.norm() == 0.0 {
                    continue;
                }
                let m = self.coeff(a, b);
                for r in 0..self.components {
                    for c in 0..self.components {
                        out[(r, c)] += w * m[(r, c)];
                    }
                }
            }
        }
        out
    }

    /// The time-time block A = N^{ab} n_a n_b.
    pub fn normal_block(&self) -> RMat {
        let mut a_mat = RMat::zeros(self.components, self.components);
        for a in 0..self.dim {
            for b in 0..self.dim {
                let w = self.n_cov[a] * self.n_cov[b];
                if w != 0.0 {
                    a_mat += self.coeff(a, b) * w;
                }
            }
        }
        a_mat
    }

    /// Multiply every coefficient by a scalar (used by scaling-invariance checks).
    pub fn scaled(&self, factor: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|m| m * factor).collect();
        Self {
            dim: self.dim,
            components: self.components,
            coeffs,
            n_cov: self.n_cov.clone(),
        }
    }
}

/// Monic directional pencil S(lambda) = lambda^2 1 + lambda bt + ct.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticPencil {
    components: usize,
    /// A^-1 B
    bt: RMat,
    /// A^-1 C
    ct: RMat,
    khat: DVector<f64>,
}

impl QuadraticPencil {
    pub fn from_parts(bt: RMat, ct: RMat, khat: DVector<f64>) -> Result<Self> {
        let n = bt.nrows();
        if bt.ncols() != n || ct.nrows() != n || ct.ncols() != n {
            return Err(Error::Invalid("pencil blocks must be square and equally sized".into()));
        }
        let k_norm = khat.norm();
        if !k_norm.is_finite() || (k_norm - 1.0).abs() > 1e-8 {
            return Err(Error::Invalid(format!(
                "pencil direction must be unit in the Euclidean product, |khat| = {k_norm}"
            )));
        }
        Ok(Self {
            components: n,
            bt,
            ct,
            khat,
        })
    }

    pub fn size(&self) -> usize {
        self.components
    }

    pub fn bt(&self) -> &RMat {
        &self.bt
    }

    pub fn ct(&self) -> &RMat {
        &self.ct
    }

    pub fn khat(&self) -> &DVector<f64> {
        &self.khat
    }

    pub fn eval(&self, lambda: Complex64) -> CMat {
        let n = self.components;
        let mut m = to_complex(&self.ct);
        for r in 0..n {
            for c in 0..n {
                m[(r, c)] += lambda * self.bt[(r, c)];
            }
            m[(r, r)] += lambda * lambda;
        }
        m
    }

    pub fn eval_real(&self, lambda: f64) -> RMat {
        let n = self.components;
        let mut m = self.ct.clone();
        m += &self.bt * lambda;
        for r in 0..n {
            m[(r, r)] += lambda * lambda;
        }
        m
    }

    /// d/dlambda S(lambda) = 2 lambda 1 + bt.
    pub fn eval_deriv(&self, lambda: Complex64) -> CMat {
        let n = self.components;
        let mut m = to_complex(&self.bt);
        for r in 0..n {
            m[(r, r)] += 2.0 * lambda;
        }
        m
    }

    /// Natural magnitude of S(lambda); rank cutoffs for evaluated pencils
    /// are floored at this scale.
    pub fn scale_at(&self, lambda: Complex64) -> f64 {
        let a = lambda.norm();
        1.0 + a * a + a * matcore::spectral_norm_r(&self.bt) + matcore::spectral_norm_r(&self.ct)
    }
}

/// First-order companion pencil M(lambda) = lambda 1 + m0.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionPencil {
    m0: RMat,
}

impl CompanionPencil {
    pub fn matrix(&self) -> &RMat {
        &self.m0
    }

    pub fn size(&self) -> usize {
        self.m0.nrows()
    }

    pub fn eval(&self, lambda: Complex64) -> CMat {
        let mut m = to_complex(&self.m0);
        for r in 0..m.nrows() {
            m[(r, r)] += lambda;
        }
        m
    }

    pub fn eval_real(&self, lambda: f64) -> RMat {
        let mut m = self.m0.clone();
        for r in 0..m.nrows() {
            m[(r, r)] += lambda;
        }
        m
    }
}

fn check_khat(system_spatial: usize, khat: &DVector<f64>) -> Result<()> {
    if khat.len() != system_spatial {
        return Err(Error::Invalid(format!(
            "direction has {} components, expected {system_spatial}",
            khat.len()
        )));
    }
    let norm = khat.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Invalid(format!(
            "direction must be unit in the Euclidean product, |khat| = {norm}"
        )));
    }
    Ok(())
}

/// Foliate the system against a unit spatial direction:
/// A = N^{ab} n_a n_b, B = 2 N^{ib} n_b khat_i (spatial i), C = N^{ij} khat_i khat_j.
pub fn decompose(
    system: &SecondOrderSystem,
    khat: &DVector<f64>,
    tol: &Tolerances,
) -> Result<(RMat, RMat, RMat)> {
    check_khat(system.spatial_dim(), khat)?;
    let n = system.components();
    let d = system.dim();
    let a_mat = system.normal_block();

    let sv_ratio = {
        let ac = to_complex(&a_mat);
        let max = matcore::spectral_norm(&ac);
        if max == 0.0 {
            0.0
        } else {
            matcore::smallest_singular_value(&ac) / max
        }
    };
    if sv_ratio <= tol.rank_tol {
        return Err(Error::NotFullySecondOrder(sv_ratio));
    }

    let mut b_mat = RMat::zeros(n, n);
    for i in 1..d {
        for b in 0..d {
            let w = 2.0 * system.foliation()[b] * khat[i - 1];
            if w != 0.0 {
                b_mat += system.coeff(i, b) * w;
            }
        }
    }
    let mut c_mat = RMat::zeros(n, n);
    for i in 1..d {
        for j in 1..d {
            let w = khat[i - 1] * khat[j - 1];
            if w != 0.0 {
                c_mat += system.coeff(i, j) * w;
            }
        }
    }
    Ok((a_mat, b_mat, c_mat))
}

/// Build the monic quadratic pencil for one direction.
pub fn build_quadratic(
    system: &SecondOrderSystem,
    khat: &DVector<f64>,
    tol: &Tolerances,
) -> Result<QuadraticPencil> {
    let (a_mat, b_mat, c_mat) = decompose(system, khat, tol)?;
    let a_inv = matcore::inverse_r(&a_mat, tol).map_err(|_| {
        Error::NotFullySecondOrder(0.0)
    })?;
    QuadraticPencil::from_parts(&a_inv * b_mat, &a_inv * c_mat, khat.clone())
}

/// Companion linearization M(lambda) = lambda 1 + [[0, -1], [ct, bt]].
pub fn build_companion(p: &QuadraticPencil) -> CompanionPencil {
    let n = p.size();
    let mut m0 = RMat::zeros(2 * n, 2 * n);
    for r in 0..n {
        m0[(r, n + r)] = -1.0;
    }
    for r in 0..n {
        for c in 0..n {
            m0[(n + r, c)] = p.ct[(r, c)];
            m0[(n + r, n + c)] = p.bt[(r, c)];
        }
    }
    CompanionPencil { m0 }
}

/// Build the monic quadratic pencil of a first-order-in-time,
/// second-order-in-space system
///   dt v = A1^i di v + A2 w,  dt w = B1^{ij} di dj v + B2^i di w,
/// contracted against one unit direction:
///   S(lambda) = lambda^2 1 - (A1 + A2 B2 A2^-1) khat lambda
///               + (A2 B2 A2^-1 A1 - A2 B1) khat khat.
pub fn build_from_ft2s(
    a1: &[RMat],
    a2: &RMat,
    b1: &[RMat],
    b2: &[RMat],
    khat: &DVector<f64>,
    tol: &Tolerances,
) -> Result<QuadraticPencil> {
    let sd = khat.len();
    check_khat(sd, khat)?;
    if a1.len() != sd || b2.len() != sd || b1.len() != sd * sd {
        return Err(Error::Invalid(format!(
            "expected {sd} A1 matrices, {sd} B2 matrices and {} B1 matrices",
            sd * sd
        )));
    }
    let n = a2.nrows();
    let a2_inv = matcore::inverse_r(a2, tol).map_err(|_| Error::SingularGauge)?;

    let mut a1k = RMat::zeros(n, n);
    let mut b2k = RMat::zeros(n, n);
    for i in 0..sd {
        a1k += &a1[i] * khat[i];
        b2k += &b2[i] * khat[i];
    }
    let mut b1kk = RMat::zeros(n, n);
    for i in 0..sd {
        for j in 0..sd {
            let w = khat[i] * khat[j];
            if w != 0.0 {
                b1kk += &b1[i * sd + j] * w;
            }
        }
    }
    let conj = a2 * &b2k * &a2_inv;
    let bt = -(&a1k + &conj);
    let ct = &conj * &a1k - a2 * &b1kk;
    QuadraticPencil::from_parts(bt, ct, khat.clone())
}

/// Maximum coefficient-wise difference between det M(lambda) and
/// det S(lambda), both recovered as degree-2N polynomials.
pub fn det_identity_residual(p: &QuadraticPencil, tol: &Tolerances) -> Result<f64> {
    let n = p.size();
    let companion = build_companion(p);
    let det_m = det_poly(|lam| companion.eval(lam), 2 * n, tol)?;
    let det_s = det_poly(|lam| p.eval(lam), 2 * n, tol)?;
    Ok(det_m.max_coeff_diff(&det_s))
}
