//! Eigenvalues, multiplicities and kernel bases of the quadratic pencil,
//! plus the kernel correspondence between S(lambda) and its companion.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{self, CMat, Tolerances};
use crate::pencil::{build_companion, QuadraticPencil};

/// Distinct eigenvalues of a pencil with their algebraic and geometric
/// multiplicities and per-eigenvalue kernel bases of S(sigma).
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Distinct representatives, sorted by (re, im).
    pub eigenvalues: Vec<Complex64>,
    /// Algebraic multiplicities q_i (companion cluster sizes), sum = 2N.
    pub alg_mult: Vec<usize>,
    /// Geometric multiplicities s_i = dim ker S(sigma_i).
    pub geo_mult: Vec<usize>,
    /// Orthonormal kernel basis of S(sigma_i), one N x s_i matrix each.
    pub kernels: Vec<CMat>,
    /// Smallest distance between distinct representatives.
    pub min_gap: Option<f64>,
}

impl SpectralData {
    pub fn distinct_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn total_algebraic(&self) -> usize {
        self.alg_mult.iter().sum()
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.alg_mult
            .iter()
            .zip(&self.geo_mult)
            .all(|(q, s)| q == s)
    }

    /// Largest |Im sigma_i| over the representatives.
    pub fn max_imag(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }

    /// Real parts of the representatives, in stored order.
    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }
}

/// Compute the full spectral data of a quadratic pencil.
///
/// Eigenvalues come from the companion matrix (as the spectrum of -m0),
/// algebraic multiplicities from single-linkage clustering, geometric
/// multiplicities and kernels from the SVD of S at each representative.
pub fn spectrum(p: &QuadraticPencil, tol: &Tolerances) -> Result<SpectralData> {
    let n = p.size();
    let companion = build_companion(p);
    let neg_m0 = matcore::to_complex(&(-companion.matrix()));
    let (raw, _) = matcore::eig(&neg_m0)?;
    let clusters = matcore::cluster(&raw, tol);

    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut alg_mult = Vec::with_capacity(clusters.len());
    let mut geo_mult = Vec::with_capacity(clusters.len());
    let mut kernels = Vec::with_capacity(clusters.len());

    for c in &clusters {
        let mut rep = c.representative;
        if c.size() == 1 {
            rep = polish_simple(p, rep, tol);
        }
        let s_rep = p.eval(rep);
        let scale = p.scale_at(rep);
        let mut kernel = matcore::kernel_basis_scaled(&s_rep, scale, tol);
        if kernel.ncols() == 0 {
            // The representative approximates a root of det S, so the
            // smallest singular direction is the kernel at working accuracy.
            kernel = smallest_singular_vector(&s_rep);
        }
        let mut s_i = kernel.ncols();
        if s_i > c.size() {
            // Rank ambiguity right at the tolerance; the algebraic count is
            // the reliable side, keep the best-aligned kernel columns.
            s_i = c.size();
            kernel = kernel.columns(0, s_i).clone_owned();
        }
        debug_assert!(s_i >= 1);
        eigenvalues.push(rep);
        alg_mult.push(c.size());
        geo_mult.push(s_i);
        kernels.push(kernel);
    }

    debug_assert_eq!(alg_mult.iter().sum::<usize>(), 2 * n);

    let mut min_gap = None;
    for i in 0..eigenvalues.len() {
        for j in (i + 1)..eigenvalues.len() {
            let d = (eigenvalues[i] - eigenvalues[j]).norm();
            min_gap = Some(min_gap.map_or(d, |g: f64| g.min(d)));
        }
    }

    Ok(SpectralData {
        eigenvalues,
        alg_mult,
        geo_mult,
        kernels,
        min_gap,
    })
}

/// One or two Gauss-Newton steps on ||S(sigma) v|| for a simple eigenvalue;
/// leaves clustered (possibly defective) representatives untouched.
fn polish_simple(p: &QuadraticPencil, mut sigma: Complex64, tol: &Tolerances) -> Complex64 {
    for _ in 0..2 {
        let s = p.eval(sigma);
        let v = smallest_singular_vector(&s);
        if v.ncols() == 0 {
            return sigma;
        }
        let v = v.column(0).clone_owned();
        let r = &s * &v;
        let w = p.eval_deriv(sigma) * &v;
        let denom = w.dotc(&w).re;
        if denom <= f64::MIN_POSITIVE {
            return sigma;
        }
        let delta = -w.dotc(&r) / denom;
        if !delta.re.is_finite() || !delta.im.is_finite() {
            return sigma;
        }
        // A polish step should nudge, not jump: reject moves larger than
        // the clustering radius, they indicate a stalled direction.
        if delta.norm() > tol.cluster_tol.max(1e-12 * (1.0 + sigma.norm())) {
            return sigma;
        }
        sigma += delta;
    }
    sigma
}

fn smallest_singular_vector(m: &CMat) -> CMat {
    let n = m.ncols();
    let svd = m
        .clone()
        .try_svd(false, true, f64::EPSILON, 0)
        .expect("svd of finite matrix");
    let vt = svd.v_t.expect("requested V^T");
    let mut idx = 0usize;
    let mut min = f64::INFINITY;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < min {
            min = s;
            idx = i;
        }
    }
    let mut out = CMat::zeros(n, 1);
    for j in 0..n {
        out[(j, 0)] = vt[(idx, j)].conj();
    }
    out
}

/// Check that every representative is real up to `imag_tol * (1 + |sigma|)`.
/// Returns the flag and the largest offending imaginary part.
pub fn reality_check(sd: &SpectralData, tol: &Tolerances) -> (bool, f64) {
    let mut max_imag = 0.0f64;
    let mut ok = true;
    for z in &sd.eigenvalues {
        let im = z.im.abs();
        max_imag = max_imag.max(im);
        if im > tol.imag_tol * (1.0 + z.norm()) {
            ok = false;
        }
    }
    (ok, max_imag)
}

/// Report of the kernel correspondence between M(sigma) and S(sigma).
#[derive(Debug, Clone)]
pub struct CorrespondenceReport {
    pub m_kernel_dim: usize,
    pub s_kernel_dim: usize,
    /// Worst deviation of an M-kernel vector from the stacked form [v; sigma v].
    pub max_stack_residual: f64,
    /// Worst ||S(sigma) v|| over the extracted top blocks, relative to scale.
    pub max_s_residual: f64,
}

/// Verify dim ker M(sigma) = dim ker S(sigma) and that every kernel vector
/// of M(sigma) is of the stacked form [v; sigma v] with S(sigma) v = 0.
pub fn kernel_correspondence(
    p: &QuadraticPencil,
    sigma: Complex64,
    tol: &Tolerances,
) -> Result<CorrespondenceReport> {
    let n = p.size();
    let companion = build_companion(p);
    let m_eval = companion.eval(sigma);
    let m_scale = 1.0 + sigma.norm() + matcore::spectral_norm_r(companion.matrix());
    let m_kernel = matcore::kernel_basis_scaled(&m_eval, m_scale, tol);

    let s_eval = p.eval(sigma);
    let s_scale = p.scale_at(sigma);
    let s_kernel = matcore::kernel_basis_scaled(&s_eval, s_scale, tol);

    let (m_dim, s_dim) = (m_kernel.ncols(), s_kernel.ncols());
    if m_dim != s_dim {
        return Err(Error::CorrespondenceViolation {
            m_dim,
            s_dim,
        });
    }

    let mut max_stack = 0.0f64;
    let mut max_s = 0.0f64;
    for c in 0..m_dim {
        let u = m_kernel.column(c);
        let top = u.rows(0, n).clone_owned();
        let bottom = u.rows(n, n).clone_owned();
        let stack_resid = (&bottom - &top * sigma).norm();
        max_stack = max_stack.max(stack_resid);
        let s_resid = (&s_eval * &top).norm() / s_scale;
        max_s = max_s.max(s_resid);
    }
    Ok(CorrespondenceReport {
        m_kernel_dim: m_dim,
        s_kernel_dim: s_dim,
        max_stack_residual: max_stack,
        max_s_residual: max_s,
    })
}
