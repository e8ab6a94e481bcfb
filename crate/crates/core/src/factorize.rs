//! Construction of the diagonalizing data (V1, Q, D1, D2), the 2N x 2N
//! transformation P, and the factorization of the quadratic pencil into two
//! diagonalizable first-order pencils S(lambda) = (lambda 1 - A2)(lambda 1 - A1).

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{self, CMat, Tolerances};
use crate::pencil::{build_companion, QuadraticPencil};
use crate::eigenstruct::SpectralData;

/// Complete factorization data for one direction.
#[derive(Debug, Clone)]
pub struct PencilFactorization {
    pub v1: CMat,
    pub q: CMat,
    /// Eigenvalues assigned to the V1 columns.
    pub d1: DVector<f64>,
    /// Eigenvalues assigned to the V1 Q columns.
    pub d2: DVector<f64>,
    pub a1: CMat,
    pub a2: CMat,
    /// V2 = V1 (D1 Q - Q D2), the eigenbasis of A2.
    pub v2: CMat,
    /// P = [[V1, V1 Q], [V1 D1, V1 Q D2]].
    pub p: CMat,
    /// Named relative residuals of all verified identities.
    pub residuals: BTreeMap<String, f64>,
}

impl PencilFactorization {
    pub fn commutator(&self) -> CMat {
        commutator(&self.q, &self.d1, &self.d2)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }
}

/// D1 Q - Q D2 for diagonal D1, D2.
fn commutator(q: &CMat, d1: &DVector<f64>, d2: &DVector<f64>) -> CMat {
    let mut g = q.clone();
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            g[(i, j)] *= d1[i] - d2[j];
        }
    }
    g
}

fn diag_c(d: &DVector<f64>) -> CMat {
    CMat::from_fn(d.len(), d.len(), |i, j| {
        if i == j {
            Complex64::new(d[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Solve X V = W for X (i.e. X = W V^-1) through one LU of V^T.
fn right_divide(w: &CMat, v: &CMat) -> Result<CMat> {
    let lu = v.transpose().lu();
    lu.solve(&w.transpose())
        .map(|xt| xt.transpose())
        .ok_or(Error::Singular(0.0))
}

/// Select N eigenvectors forming an invertible V1 and express the remaining
/// N as V1 Q, assigning eigenvalues to D1 and D2.
///
/// Candidates are ranked by pivoted orthogonalization; partitions are tried
/// in lexicographic order over that ranking until both determinant
/// conditions (V1 invertible, D1 Q - Q D2 invertible) hold numerically.
pub fn select_eigenbasis(
    sd: &SpectralData,
    tol: &Tolerances,
) -> Result<(CMat, CMat, DVector<f64>, DVector<f64>)> {
    for ((&q_i, &s_i), rep) in sd.alg_mult.iter().zip(&sd.geo_mult).zip(&sd.eigenvalues) {
        if s_i < q_i {
            return Err(Error::Defective {
                eigenvalue: rep.re,
                geometric: s_i,
                algebraic: q_i,
            });
        }
        if rep.im.abs() > tol.imag_tol * (1.0 + rep.norm()) {
            return Err(Error::NonRealEigenvalue(*rep));
        }
    }

    let n = sd.kernels.first().map(|k| k.nrows()).unwrap_or(0);
    let total: usize = sd.geo_mult.iter().sum();
    if total != 2 * n {
        return Err(Error::Invalid(format!(
            "expected {} eigenvectors for a factorization, found {total}",
            2 * n
        )));
    }

    // Flatten (eigenvalue, kernel column) candidates, eigenvalues in
    // descending order: greedy selection then assigns the fastest speed to
    // the first D1 slot, matching the usual display order.
    let mut cand_vals = Vec::with_capacity(2 * n);
    let mut cand_vecs: Vec<DVector<Complex64>> = Vec::with_capacity(2 * n);
    for (rep, kernel) in sd.eigenvalues.iter().zip(&sd.kernels).rev() {
        for c in 0..kernel.ncols() {
            cand_vals.push(rep.re);
            cand_vecs.push(kernel.column(c).clone_owned());
        }
    }

    let ranking = pivot_ranking(&cand_vecs);
    let cap = match n {
        0..=4 => binomial(2 * n, n),
        5..=8 => 500,
        _ => 100,
    };

    let mut tried = 0usize;
    for combo in Combinations::new(2 * n, n) {
        if tried >= cap {
            break;
        }
        tried += 1;
        let selected: Vec<usize> = combo.iter().map(|&pos| ranking[pos]).collect();
        let complement: Vec<usize> = (0..2 * n)
            .filter(|pos| !combo.contains(pos))
            .map(|pos| ranking[pos])
            .collect();

        let v1 = gather(&cand_vecs, &selected, n);
        let sv_max = matcore::spectral_norm(&v1);
        let sv_min = matcore::smallest_singular_value(&v1);
        if !sv_min.is_finite() || sv_min <= tol.rank_tol * sv_max.max(1.0) {
            continue;
        }
        let w = gather(&cand_vecs, &complement, n);
        let Some(q) = v1.clone().lu().solve(&w) else {
            continue;
        };
        let d1 = DVector::from_iterator(n, selected.iter().map(|&i| cand_vals[i]));
        let d2 = DVector::from_iterator(n, complement.iter().map(|&i| cand_vals[i]));
        let g = commutator(&q, &d1, &d2);
        let g_max = matcore::spectral_norm(&g);
        let g_min = matcore::smallest_singular_value(&g);
        if !g_min.is_finite() || g_min <= tol.rank_tol * g_max.max(1.0) {
            continue;
        }
        return Ok((v1, q, d1, d2));
    }
    Err(Error::NoAdmissiblePartition { tried })
}

fn gather(vecs: &[DVector<Complex64>], indices: &[usize], n: usize) -> CMat {
    let mut out = CMat::zeros(n, indices.len());
    for (col, &idx) in indices.iter().enumerate() {
        out.set_column(col, &vecs[idx]);
    }
    out
}

/// Rank all candidates by pivoted modified Gram-Schmidt: at each step pick
/// the vector with the largest residual against the span chosen so far.
fn pivot_ranking(cands: &[DVector<Complex64>]) -> Vec<usize> {
    let m = cands.len();
    let mut residuals: Vec<DVector<Complex64>> = cands.to_vec();
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut ranking = Vec::with_capacity(m);
    while !remaining.is_empty() {
        let (pick_pos, _) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &i)| (pos, residuals[i].norm()))
            .fold((0usize, -1.0f64), |best, (pos, nrm)| {
                if nrm > best.1 + 1e-14 {
                    (pos, nrm)
                } else {
                    best
                }
            });
        let idx = remaining.remove(pick_pos);
        ranking.push(idx);
        let norm = residuals[idx].norm();
        if norm > 1e-300 {
            let e = &residuals[idx] / Complex64::new(norm, 0.0);
            for &j in &remaining {
                let proj = e.dotc(&residuals[j]);
                let updated = &residuals[j] - &e * proj;
                residuals[j] = updated;
            }
        }
    }
    ranking
}

fn binomial(m: usize, k: usize) -> usize {
    let k = k.min(m - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (m - i) / (i + 1);
    }
    acc
}

/// Lexicographic k-combinations of 0..m.
struct Combinations {
    m: usize,
    k: usize,
    state: Option<Vec<usize>>,
}

impl Combinations {
    fn new(m: usize, k: usize) -> Self {
        let state = if k <= m {
            Some((0..k).collect())
        } else {
            None
        };
        Self { m, k, state }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.state.clone()?;
        // advance
        let mut next = current.clone();
        let mut i = self.k;
        loop {
            if i == 0 {
                self.state = None;
                break;
            }
            i -= 1;
            if next[i] < self.m - self.k + i {
                next[i] += 1;
                for j in (i + 1)..self.k {
                    next[j] = next[j - 1] + 1;
                }
                self.state = Some(next);
                break;
            }
        }
        Some(current)
    }
}

/// A1 = V1 D1 V1^-1 and A2 = V2 D2 V2^-1 with V2 = V1 (D1 Q - Q D2).
pub fn build_factors(
    v1: &CMat,
    q: &CMat,
    d1: &DVector<f64>,
    d2: &DVector<f64>,
    _tol: &Tolerances,
) -> Result<(CMat, CMat)> {
    let a1 = right_divide(&(v1 * diag_c(d1)), v1)?;
    let v2 = v1 * commutator(q, d1, d2);
    let a2 = right_divide(&(&v2 * diag_c(d2)), &v2)?;
    Ok((a1, a2))
}

/// P = [[V1, V1 Q], [V1 D1, V1 Q D2]].
pub fn build_p(v1: &CMat, q: &CMat, d1: &DVector<f64>, d2: &DVector<f64>) -> CMat {
    let n = v1.nrows();
    let v1q = v1 * q;
    let top_left = v1.clone();
    let bottom_left = v1 * diag_c(d1);
    let bottom_right = &v1q * diag_c(d2);
    let mut p = CMat::zeros(2 * n, 2 * n);
    p.view_mut((0, 0), (n, n)).copy_from(&top_left);
    p.view_mut((0, n), (n, n)).copy_from(&v1q);
    p.view_mut((n, 0), (n, n)).copy_from(&bottom_left);
    p.view_mut((n, n), (n, n)).copy_from(&bottom_right);
    p
}

/// Verify M(lambda) P = P blockdiag(lambda 1 - D1, lambda 1 - D2) at probe
/// points plus the determinant identity det P = det(V1)^2 det(Q D2 - D1 Q).
/// Returns the worst relative residual.
pub fn verify_p(pencil: &QuadraticPencil, f: &PencilFactorization) -> f64 {
    let n = pencil.size();
    let companion = build_companion(pencil);
    let p_norm = matcore::spectral_norm(&f.p).max(1.0);
    let mut worst = 0.0f64;
    for lam in matcore::probe_points(5) {
        let lam_c = Complex64::new(lam, 0.0);
        let lhs = companion.eval(lam_c) * &f.p;
        let mut block = CMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            block[(i, i)] = lam_c - f.d1[i];
            block[(n + i, n + i)] = lam_c - f.d2[i];
        }
        let rhs = &f.p * block;
        let scale = (1.0 + lam.abs() + matcore::spectral_norm_r(companion.matrix())) * p_norm;
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    let det_p = f.p.determinant();
    let det_v1 = f.v1.determinant();
    // det P = det(V1)^2 det(QD2 - D1Q); the right factor is (-1)^N times
    // det(D1 Q - Q D2).
    let minus_g = -f.commutator();
    let det_expect = det_v1 * det_v1 * minus_g.determinant();
    worst.max((det_p - det_expect).norm() / (1.0 + det_p.norm()))
}

/// Residuals of the factorization identities:
/// A^-1 C = A2 A1, A^-1 B = -(A1 + A2), S(lambda) = (lambda-A2)(lambda-A1)
/// at probe points, and the eigenpair relations for the columns of V1, V1 Q.
pub fn verify_factorization(
    pencil: &QuadraticPencil,
    f: &PencilFactorization,
    _tol: &Tolerances,
) -> BTreeMap<String, f64> {
    let n = pencil.size();
    let bt = matcore::to_complex(pencil.bt());
    let ct = matcore::to_complex(pencil.ct());
    let mut residuals = BTreeMap::new();

    let ac = (&ct - &f.a2 * &f.a1).norm() / (1.0 + ct.norm());
    residuals.insert("ac_identity".to_string(), ac);
    let ab = (&bt + &f.a1 + &f.a2).norm() / (1.0 + bt.norm());
    residuals.insert("ab_identity".to_string(), ab);

    let mut worst_eval = 0.0f64;
    for lam in matcore::probe_points(5) {
        let lam_c = Complex64::new(lam, 0.0);
        let mut left = -f.a2.clone();
        let mut right = -f.a1.clone();
        for i in 0..n {
            left[(i, i)] += lam_c;
            right[(i, i)] += lam_c;
        }
        let resid = (pencil.eval(lam_c) - left * right).norm() / pencil.scale_at(lam_c);
        worst_eval = worst_eval.max(resid);
    }
    residuals.insert("pencil_eval".to_string(), worst_eval);

    let v1q = &f.v1 * &f.q;
    let mut worst_pair = 0.0f64;
    for i in 0..n {
        let lam = Complex64::new(f.d1[i], 0.0);
        let r1 = (pencil.eval(lam) * f.v1.column(i)).norm()
            / (pencil.scale_at(lam) * f.v1.column(i).norm().max(f64::MIN_POSITIVE));
        let rho = Complex64::new(f.d2[i], 0.0);
        let r2 = (pencil.eval(rho) * v1q.column(i)).norm()
            / (pencil.scale_at(rho) * v1q.column(i).norm().max(f64::MIN_POSITIVE));
        worst_pair = worst_pair.max(r1).max(r2);
    }
    residuals.insert("eigenpairs".to_string(), worst_pair);
    residuals
}

/// General-path factorization: select an eigenbasis partition, build the
/// factors and P, and record all verification residuals.
pub fn factorize_pencil(
    pencil: &QuadraticPencil,
    sd: &SpectralData,
    tol: &Tolerances,
) -> Result<PencilFactorization> {
    let bt_norm = matcore::spectral_norm_r(pencil.bt());
    let b_zero_scale = 1.0 + matcore::spectral_norm_r(pencil.ct());
    if bt_norm <= tol.residual_tol * b_zero_scale {
        if let Ok(f) = b_zero_path(pencil, tol) {
            return Ok(f);
        }
        // fall through to the general path on failure
    }
    let (v1, q, d1, d2) = select_eigenbasis(sd, tol)?;
    assemble(pencil, v1, q, d1, d2, tol)
}

fn assemble(
    pencil: &QuadraticPencil,
    v1: CMat,
    q: CMat,
    d1: DVector<f64>,
    d2: DVector<f64>,
    tol: &Tolerances,
) -> Result<PencilFactorization> {
    let (a1, a2) = build_factors(&v1, &q, &d1, &d2, tol)?;
    let v2 = &v1 * commutator(&q, &d1, &d2);
    let p = build_p(&v1, &q, &d1, &d2);
    let mut f = PencilFactorization {
        v1,
        q,
        d1,
        d2,
        a1,
        a2,
        v2,
        p,
        residuals: BTreeMap::new(),
    };
    f.residuals = verify_factorization(pencil, &f, tol);
    f.residuals.insert("p_identity".to_string(), verify_p(pencil, &f));
    Ok(f)
}

/// Special path for B = 0: diagonalize -A^-1 C = V1 D1^2 V1^-1 and return
/// Q = 1, D2 = -D1, A1 = -A2 = V1 D1 V1^-1.
///
/// Requires the eigenvalues of -A^-1 C to be real and strictly positive;
/// a vanishing eigenvalue makes D1 Q - Q D2 = 2 D1 singular.
pub fn b_zero_path(pencil: &QuadraticPencil, tol: &Tolerances) -> Result<PencilFactorization> {
    let n = pencil.size();
    let bt_norm = matcore::spectral_norm_r(pencil.bt());
    let scale = 1.0 + matcore::spectral_norm_r(pencil.ct());
    if bt_norm > tol.residual_tol * scale {
        return Err(Error::Invalid(format!(
            "the B = 0 path needs a vanishing first-order coefficient, got |A^-1 B| = {bt_norm:.3e}"
        )));
    }
    let neg_ct = matcore::to_complex(&(-pencil.ct()));
    let (vals, vecs) = matcore::eig(&neg_ct)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        vals[b]
            .re
            .partial_cmp(&vals[a].re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut d1 = DVector::zeros(n);
    let mut v1 = CMat::zeros(n, n);
    for (col, &idx) in order.iter().enumerate() {
        let mu = vals[idx];
        if mu.im.abs() > tol.imag_tol * (1.0 + mu.norm()) {
            return Err(Error::ComplexSpeeds(mu));
        }
        if mu.re <= tol.residual_tol * scale {
            return Err(Error::ZeroSpeed(mu.re));
        }
        d1[col] = mu.re.sqrt();
        v1.set_column(col, &vecs.column(idx));
    }
    let d2 = -d1.clone();
    let q = CMat::identity(n, n);
    assemble(pencil, v1, q, d1, d2, tol)
}

/// Rebuild the monic pencil determined by a factorization choice; the
/// inverse of the recovery pipeline, used as a round-trip oracle.
pub fn pencil_from_factors(
    v1: &CMat,
    q: &CMat,
    d1: &DVector<f64>,
    d2: &DVector<f64>,
    khat: DVector<f64>,
    tol: &Tolerances,
) -> Result<QuadraticPencil> {
    let (a1, a2) = build_factors(v1, q, d1, d2, tol)?;
    let bt = -(&a1 + &a2);
    let ct = &a2 * &a1;
    let max_imag = matcore::max_imag_norm(&bt).max(matcore::max_imag_norm(&ct));
    if max_imag > 1e-10 * (1.0 + matcore::spectral_norm(&ct)) {
        return Err(Error::Invalid(format!(
            "factor data does not define a real pencil (imaginary residue {max_imag:.3e})"
        )));
    }
    QuadraticPencil::from_parts(matcore::real_part(&bt), matcore::real_part(&ct), khat)
}
