//! Dense complex linear-algebra kernels shared by every other module:
//! eigendecomposition, numerical rank, kernel bases, norms, matrix inverses,
//! eigenvalue clustering and determinant interpolation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

mod eig;
mod poly;

pub use eig::eig;
pub use poly::{det_poly, Poly};

/// Dense complex matrix, row-major semantics at the API boundary.
pub type CMat = DMatrix<Complex64>;
/// Dense real matrix.
pub type RMat = DMatrix<f64>;

/// Numerical tolerances threaded through the whole pipeline.
///
/// `cond_cap` is the alarm threshold on the diagonalization norms; the
/// remaining fields control rank decisions, eigenvalue grouping, the
/// allowed imaginary part of a "real" eigenvalue and matrix-identity
/// residual bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative singular-value cutoff for rank decisions.
    pub rank_tol: f64,
    /// Absolute radius for single-linkage eigenvalue grouping.
    pub cluster_tol: f64,
    /// Allowed imaginary part relative to `1 + |lambda|`.
    pub imag_tol: f64,
    /// Bound on matrix-equation residuals, relative to the natural scale.
    pub residual_tol: f64,
    /// Threshold above which a diagonalization norm counts as a blow-up.
    pub cond_cap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_tol: 1e-9,
            cluster_tol: 1e-6,
            imag_tol: 1e-8,
            residual_tol: 1e-8,
            cond_cap: 1e8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rank_tol", self.rank_tol),
            ("cluster_tol", self.cluster_tol),
            ("imag_tol", self.imag_tol),
            ("residual_tol", self.residual_tol),
            ("cond_cap", self.cond_cap),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Invalid(format!(
                    "tolerance {name} must be strictly positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn max_imag_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn singular_values(m: &CMat) -> DVector<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DVector::zeros(0);
    }
    m.clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .map(|svd| svd.singular_values)
        // SVD of a finite matrix essentially cannot fail; fall back to a
        // crude norm bound rather than panicking deep in a scan.
        .unwrap_or_else(|| DVector::from_element(1, m.norm()))
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).iter().copied().fold(0.0, f64::max)
}

pub fn spectral_norm_r(m: &RMat) -> f64 {
    spectral_norm(&to_complex(m))
}

/// Number of singular values above `rank_tol` times the largest one.
pub fn numerical_rank(m: &CMat, tol: &Tolerances) -> usize {
    let sv = singular_values(m);
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol.rank_tol * max).count()
}

/// Orthonormal basis of the (numerical) kernel, as matrix columns.
///
/// The cutoff is relative to the largest singular value; full-rank input
/// yields a matrix with zero columns.
pub fn kernel_basis(m: &CMat, tol: &Tolerances) -> CMat {
    kernel_basis_scaled(m, 0.0, tol)
}

/// Kernel basis with the singular-value cutoff floored at `rank_tol * scale`.
///
/// Pencil evaluations S(sigma) can be tiny in norm while the pencil itself
/// has unit scale; the floor keeps the rank decision pinned to the pencil
/// scale instead of the evaluated matrix.
pub fn kernel_basis_scaled(m: &CMat, scale: f64, tol: &Tolerances) -> CMat {
    let n = m.ncols();
    if m.nrows() == 0 || n == 0 {
        return CMat::zeros(n, 0);
    }
    let svd = m
        .clone()
        .try_svd(false, true, f64::EPSILON, 0)
        .expect("svd of finite matrix");
    let sv = &svd.singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let cutoff = tol.rank_tol * max.max(scale);
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    let vt = svd.v_t.expect("requested V^T");
    let mut basis = CMat::zeros(n, n - rank);
    for (out_col, row) in (rank..vt.nrows()).enumerate() {
        for j in 0..n {
            basis[(j, out_col)] = vt[(row, j)].conj();
        }
    }
    // Rows of V^T past the stored ones (nrows < n happens for wide SVDs of
    // square input only when rank deficient in exact arithmetic; nalgebra
    // always returns n rows for square m, so this loop covers everything.)
    debug_assert_eq!(vt.nrows(), n);
    fix_phases(&mut basis);
    basis
}

/// Rotate each column so its largest-magnitude entry is real and positive.
/// Makes SVD- and Schur-derived bases reproducible and real for real input.
pub(crate) fn fix_phases(m: &mut CMat) {
    for c in 0..m.ncols() {
        let mut best = 0usize;
        let mut best_norm = -1.0f64;
        for r in 0..m.nrows() {
            let nrm = m[(r, c)].norm();
            if nrm > best_norm * (1.0 + 1e-12) {
                best_norm = nrm;
                best = r;
            }
        }
        if best_norm <= 0.0 {
            continue;
        }
        let pivot = m[(best, c)];
        let phase = pivot / pivot.norm();
        for r in 0..m.nrows() {
            m[(r, c)] /= phase;
        }
    }
}

/// Matrix inverse guarded by a rank check.
pub fn inverse(m: &CMat, tol: &Tolerances) -> Result<CMat> {
    if m.nrows() != m.ncols() {
        return Err(Error::Invalid(format!(
            "inverse requires a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let sv = singular_values(m);
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min <= tol.rank_tol * max {
        return Err(Error::Singular(if max == 0.0 { 0.0 } else { min / max }));
    }
    m.clone()
        .try_inverse()
        .ok_or(Error::Singular(min / max))
}

pub fn inverse_r(m: &RMat, tol: &Tolerances) -> Result<RMat> {
    inverse(&to_complex(m), tol).map(|inv| real_part(&inv))
}

/// Spectral condition number; infinite for singular input.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = singular_values(m);
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn smallest_singular_value(m: &CMat) -> f64 {
    singular_values(m).iter().copied().fold(f64::INFINITY, f64::min)
}

/// One group produced by [`cluster`].
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Arithmetic mean of the member values.
    pub representative: Complex64,
    /// Indices into the original input, ascending.
    pub members: Vec<usize>,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Single-linkage clustering of complex values at radius `cluster_tol`.
///
/// The result is independent of input order: values are sorted by
/// (real, imaginary) before linking and groups are reported sorted by
/// their representative.
pub fn cluster(values: &[Complex64], tol: &Tolerances) -> Vec<Cluster> {
    let k = values.len();
    if k == 0 {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        (values[a].re, values[a].im)
            .partial_cmp(&(values[b].re, values[b].im))
            .expect("finite eigenvalues")
    });

    // Union-find over the sorted sequence.
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for ai in 0..k {
        for bi in (ai + 1)..k {
            let (a, b) = (order[ai], order[bi]);
            // Values are sorted by real part; once the real gap alone
            // exceeds the radius no later value can link to `a`.
            if values[b].re - values[a].re > tol.cluster_tol {
                break;
            }
            if (values[a] - values[b]).norm() <= tol.cluster_tol {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }

    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..k {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    let mut clusters: Vec<Cluster> = groups
        .into_values()
        .map(|mut members| {
            members.sort_unstable();
            let sum: Complex64 = members.iter().map(|&i| values[i]).sum();
            Cluster {
                representative: sum / members.len() as f64,
                members,
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        (a.representative.re, a.representative.im)
            .partial_cmp(&(b.representative.re, b.representative.im))
            .expect("finite representatives")
    });
    clusters
}

/// Deterministic low-discrepancy probe points in [-2.5, 2.5], used wherever
/// an identity is spot-checked "at a handful of lambda values".
pub fn probe_points(count: usize) -> Vec<f64> {
    const PHI: f64 = 0.618_033_988_749_894_9;
    (0..count)
        .map(|j| {
            let t = ((j as f64 + 1.0) * PHI).fract();
            -2.5 + 5.0 * t
        })
        .collect()
}
