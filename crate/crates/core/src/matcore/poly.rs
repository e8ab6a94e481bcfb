//! Complex polynomials in one variable and determinant recovery for matrix
//! pencils by sample-and-interpolate.

use num_complex::Complex64;

use super::{CMat, Tolerances};
use crate::error::{Error, Result};

/// Polynomial with coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Construct from ascending coefficients, trimming trailing entries that
    /// are negligible against the largest coefficient.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            coeffs.push(Complex64::new(0.0, 0.0));
            for k in (0..coeffs.len() - 1).rev() {
                let c = coeffs[k];
                coeffs[k + 1] += c;
                coeffs[k] = -r * c;
            }
        }
        Poly { coeffs }
    }

    fn trim(&mut self) {
        let scale = self.max_coeff_norm().max(1.0);
        while let Some(last) = self.coeffs.last() {
            if last.norm() <= f64::EPSILON * scale && self.coeffs.len() > 1 {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        if self.coeffs.len() == 1 && self.coeffs[0].norm() == 0.0 {
            self.coeffs.clear();
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient-wise difference, comparing up to the longer length.
    pub fn max_coeff_diff(&self, other: &Poly) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }

    /// Synthetic division by (x - root). Returns the quotient when the
    /// remainder is negligible at the polynomial scale.
    pub fn deflate(&self, root: Complex64, tol: &Tolerances) -> Option<Poly> {
        if self.coeffs.len() < 2 {
            return None;
        }
        let n = self.coeffs.len();
        let mut quot = vec![Complex64::new(0.0, 0.0); n - 1];
        let mut carry = self.coeffs[n - 1];
        for k in (0..n - 1).rev() {
            quot[k] = carry;
            carry = self.coeffs[k] + carry * root;
        }
        let scale = self.max_coeff_norm().max(1.0) * (1.0 + root.norm()).powi(self.degree() as i32);
        if carry.norm() <= tol.residual_tol * scale {
            Some(Poly { coeffs: quot })
        } else {
            None
        }
    }

    /// Multiplicity of `root` found by repeated deflation.
    pub fn root_multiplicity(&self, root: Complex64, tol: &Tolerances) -> usize {
        let mut mult = 0;
        let mut cur = self.clone();
        while let Some(next) = cur.deflate(root, tol) {
            mult += 1;
            cur = next;
            if cur.coeffs.len() <= 1 {
                break;
            }
        }
        mult
    }
}

/// Recover det(pencil(lambda)) as a polynomial of degree at most
/// `degree_bound` by sampling the determinant at Chebyshev points and
/// interpolating, then verify against holdout points.
pub fn det_poly<F>(pencil_eval: F, degree_bound: usize, tol: &Tolerances) -> Result<Poly>
where
    F: Fn(Complex64) -> CMat,
{
    let m = degree_bound;
    let nodes = chebyshev_nodes(m + 1);
    let samples: Vec<Complex64> = nodes
        .iter()
        .map(|&x| det(&pencil_eval(Complex64::new(x, 0.0))))
        .collect();

    // Newton divided differences over the real nodes.
    let mut dd = samples.clone();
    for level in 1..=m {
        for k in (level..=m).rev() {
            let denom = nodes[k] - nodes[k - level];
            dd[k] = (dd[k] - dd[k - 1]) / denom;
        }
    }
    // Expand the Newton form into monomial coefficients.
    let mut poly = Poly::zero();
    let mut basis = Poly::one();
    for k in 0..=m {
        let term: Vec<Complex64> = basis.coeffs().iter().map(|&c| c * dd[k]).collect();
        poly = add(&poly, &Poly { coeffs: term });
        if k < m {
            basis = basis.mul(&Poly {
                coeffs: vec![Complex64::new(-nodes[k], 0.0), Complex64::new(1.0, 0.0)],
            });
        }
    }

    // Holdout verification at shifted Chebyshev points.
    let holdout = holdout_points(m.max(1));
    let mut scale = samples.iter().map(|s| s.norm()).fold(1.0, f64::max);
    let mut worst = 0.0f64;
    for &x in &holdout {
        let z = Complex64::new(x, 0.0);
        let expected = det(&pencil_eval(z));
        scale = scale.max(expected.norm());
        let got = poly.eval(z);
        worst = worst.max((expected - got).norm());
    }
    if worst > tol.residual_tol * scale {
        return Err(Error::DegreeExceeded {
            degree: degree_bound,
            residual: worst / scale,
        });
    }
    Ok(Poly::from_coeffs(poly.coeffs))
}

fn add(a: &Poly, b: &Poly) -> Poly {
    let len = a.coeffs.len().max(b.coeffs.len());
    let coeffs = (0..len).map(|k| a.coeff(k) + b.coeff(k)).collect();
    Poly { coeffs }
}

fn det(m: &CMat) -> Complex64 {
    debug_assert_eq!(m.nrows(), m.ncols());
    m.determinant()
}

fn chebyshev_nodes(count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.5];
    }
    (0..count)
        .map(|j| 2.0 * (std::f64::consts::PI * j as f64 / (count - 1) as f64).cos())
        .collect()
}

fn holdout_points(degree: usize) -> Vec<f64> {
    let count = degree.clamp(3, 9);
    (0..count)
        .map(|j| 2.0 * (std::f64::consts::PI * (j as f64 + 0.5) / count as f64).cos())
        .collect()
}
