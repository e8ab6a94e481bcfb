//! Per-direction hyperbolicity verdicts, unit-sphere direction sampling and
//! the aggregate scan with uniformity diagnostics.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eigenstruct::{reality_check, spectrum, SpectralData};
use crate::factorize::{factorize_pencil, PencilFactorization};
use crate::matcore::{self, Tolerances};
use crate::pencil::{build_quadratic, SecondOrderSystem};

/// Why a system is only weakly hyperbolic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakReason {
    /// Some eigenvalue has geometric multiplicity below its algebraic one.
    MultiplicityGap,
    /// The diagonalization norms are unbounded over the direction sphere.
    UniformityBlowup,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HyperbolicityClass {
    NonHyperbolic { max_imag: f64 },
    WeaklyHyperbolic { reason: WeakReason },
    StronglyHyperbolic,
    StrictlyHyperbolic,
}

impl HyperbolicityClass {
    /// Ordering rank: NonHyperbolic < Weak < Strong < Strict.
    pub fn rank(&self) -> u8 {
        match self {
            HyperbolicityClass::NonHyperbolic { .. } => 0,
            HyperbolicityClass::WeaklyHyperbolic { .. } => 1,
            HyperbolicityClass::StronglyHyperbolic => 2,
            HyperbolicityClass::StrictlyHyperbolic => 3,
        }
    }

    pub fn is_strong_or_strict(&self) -> bool {
        self.rank() >= 2
    }

    pub fn label(&self) -> &'static str {
        match self {
            HyperbolicityClass::NonHyperbolic { .. } => "non-hyperbolic",
            HyperbolicityClass::WeaklyHyperbolic {
                reason: WeakReason::MultiplicityGap,
            } => "weakly-hyperbolic(multiplicity-gap)",
            HyperbolicityClass::WeaklyHyperbolic {
                reason: WeakReason::UniformityBlowup,
            } => "weakly-hyperbolic(uniformity-blowup)",
            HyperbolicityClass::StronglyHyperbolic => "strongly-hyperbolic",
            HyperbolicityClass::StrictlyHyperbolic => "strictly-hyperbolic",
        }
    }
}

/// The five norms controlling the uniformity condition: bounds on
/// ||V1||, ||Q||, ||Q D2 - D1 Q|| certify ||P||; bounds on ||V1^-1|| and
/// ||(Q D2 - D1 Q)^-1|| certify ||P^-1||.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformityNorms {
    pub v1: f64,
    pub q: f64,
    pub commutator: f64,
    pub v1_inv: f64,
    pub commutator_inv: f64,
}

impl UniformityNorms {
    pub fn from_factorization(f: &PencilFactorization, tol: &Tolerances) -> Self {
        let g = f.commutator();
        let v1_inv = matcore::inverse(&f.v1, tol)
            .map(|inv| matcore::spectral_norm(&inv))
            .unwrap_or(f64::INFINITY);
        let commutator_inv = matcore::inverse(&g, tol)
            .map(|inv| matcore::spectral_norm(&inv))
            .unwrap_or(f64::INFINITY);
        Self {
            v1: matcore::spectral_norm(&f.v1),
            q: matcore::spectral_norm(&f.q),
            commutator: matcore::spectral_norm(&g),
            v1_inv,
            commutator_inv,
        }
    }

    pub fn max(&self) -> f64 {
        self.v1
            .max(self.q)
            .max(self.commutator)
            .max(self.v1_inv)
            .max(self.commutator_inv)
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.v1, self.q, self.commutator, self.v1_inv, self.commutator_inv]
    }
}

pub const NORM_NAMES: [&str; 5] = ["v1", "q", "commutator", "v1_inv", "commutator_inv"];

/// Classification of one unit direction.
#[derive(Debug, Clone)]
pub struct DirectionVerdict {
    pub khat: Vec<f64>,
    pub class: HyperbolicityClass,
    pub spectral: SpectralData,
    /// Smallest separation between distinct eigenvalues.
    pub gap: Option<f64>,
    /// Gap below ten clustering radii: the dichotomy is numerically tight here.
    pub marginal: bool,
    /// Present when the direction is strong and the factorization succeeded.
    pub uniformity: Option<UniformityNorms>,
    /// Recorded when the factorization failed despite a strong verdict.
    pub factorization_error: Option<String>,
}

/// Apply the per-direction definition: real eigenvalues, then equal
/// algebraic/geometric multiplicities; strict additionally needs all
/// multiplicities equal to one. Uniformity norms are recorded for strong
/// directions but do not gate the per-direction class.
pub fn classify_direction(
    system: &SecondOrderSystem,
    khat: &DVector<f64>,
    tol: &Tolerances,
) -> Result<DirectionVerdict> {
    let pencil = build_quadratic(system, khat, tol)?;
    let spectral = spectrum(&pencil, tol)?;
    let gap = spectral.min_gap;
    let marginal = gap.is_some_and(|g| g < 10.0 * tol.cluster_tol);
    let khat_vec: Vec<f64> = khat.iter().copied().collect();

    let (real_ok, max_imag) = reality_check(&spectral, tol);
    if !real_ok {
        return Ok(DirectionVerdict {
            khat: khat_vec,
            class: HyperbolicityClass::NonHyperbolic { max_imag },
            spectral,
            gap,
            marginal,
            uniformity: None,
            factorization_error: None,
        });
    }

    let gap_in_multiplicity = spectral
        .alg_mult
        .iter()
        .zip(&spectral.geo_mult)
        .any(|(q, s)| s < q);
    if gap_in_multiplicity {
        return Ok(DirectionVerdict {
            khat: khat_vec,
            class: HyperbolicityClass::WeaklyHyperbolic {
                reason: WeakReason::MultiplicityGap,
            },
            spectral,
            gap,
            marginal,
            uniformity: None,
            factorization_error: None,
        });
    }

    let class = if spectral.alg_mult.iter().all(|&q| q == 1) {
        HyperbolicityClass::StrictlyHyperbolic
    } else {
        HyperbolicityClass::StronglyHyperbolic
    };

    let (uniformity, factorization_error) = match factorize_pencil(&pencil, &spectral, tol) {
        Ok(f) => (Some(UniformityNorms::from_factorization(&f, tol)), None),
        Err(e) => (None, Some(e.to_string())),
    };

    Ok(DirectionVerdict {
        khat: khat_vec,
        class,
        spectral,
        gap,
        marginal,
        uniformity,
        factorization_error,
    })
}

/// Deterministic direction-sampling schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleScheme {
    /// Per-dimension default: axis pair, uniform angles, Fibonacci lattice.
    Auto,
    /// Equally spaced angles on the circle (2 spatial dimensions).
    UniformAngles,
    /// Fibonacci lattice on the 2-sphere (3 spatial dimensions).
    Fibonacci,
    /// Seeded Gaussian directions, any dimension.
    Random { seed: u64 },
}

/// Unit directions for a scan. One spatial dimension always yields {+1, -1};
/// dimensions above three need the explicit random scheme.
pub fn sample_directions(
    spatial_dim: usize,
    count: usize,
    scheme: SampleScheme,
) -> Result<Vec<DVector<f64>>> {
    if spatial_dim == 0 {
        return Err(Error::Invalid("need at least one spatial dimension".into()));
    }
    if spatial_dim == 1 {
        return Ok(vec![
            DVector::from_vec(vec![1.0]),
            DVector::from_vec(vec![-1.0]),
        ]);
    }
    if count == 0 {
        return Err(Error::Invalid("sample count must be positive".into()));
    }
    match (scheme, spatial_dim) {
        (SampleScheme::Auto, 2) | (SampleScheme::UniformAngles, 2) => Ok((0..count)
            .map(|j| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
                DVector::from_vec(vec![theta.cos(), theta.sin()])
            })
            .collect()),
        (SampleScheme::Auto, 3) | (SampleScheme::Fibonacci, 3) => Ok((0..count)
            .map(|i| {
                let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
                let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let theta = 2.0 * std::f64::consts::PI * i as f64 / golden;
                DVector::from_vec(vec![r * theta.cos(), r * theta.sin(), z])
            })
            .collect()),
        (SampleScheme::Random { seed }, dim) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let mut v = DVector::from_fn(dim, |_, _| {
                    // Box-Muller from two uniforms.
                    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                    let u2: f64 = rng.gen_range(0.0..1.0);
                    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
                });
                let norm = v.norm();
                if norm > 1e-6 {
                    v /= norm;
                    out.push(v);
                }
            }
            Ok(out)
        }
        (SampleScheme::UniformAngles, d) | (SampleScheme::Fibonacci, d) | (SampleScheme::Auto, d) => {
            Err(Error::UnsupportedDimension(d))
        }
    }
}

/// Worst value of one uniformity norm over the scan and where it occurred.
#[derive(Debug, Clone)]
pub struct WorstNorm {
    pub value: f64,
    pub at: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct WorstNorms {
    pub v1: WorstNorm,
    pub q: WorstNorm,
    pub commutator: WorstNorm,
    pub v1_inv: WorstNorm,
    pub commutator_inv: WorstNorm,
}

impl WorstNorms {
    fn empty() -> Self {
        let zero = WorstNorm {
            value: 0.0,
            at: Vec::new(),
        };
        Self {
            v1: zero.clone(),
            q: zero.clone(),
            commutator: zero.clone(),
            v1_inv: zero.clone(),
            commutator_inv: zero,
        }
    }

    fn update(&mut self, norms: &UniformityNorms, at: &[f64]) {
        let slots = [
            (&mut self.v1, norms.v1),
            (&mut self.q, norms.q),
            (&mut self.commutator, norms.commutator),
            (&mut self.v1_inv, norms.v1_inv),
            (&mut self.commutator_inv, norms.commutator_inv),
        ];
        for (slot, value) in slots {
            if value > slot.value {
                slot.value = value;
                slot.at = at.to_vec();
            }
        }
    }

    pub fn max(&self) -> f64 {
        self.v1
            .value
            .max(self.q.value)
            .max(self.commutator.value)
            .max(self.v1_inv.value)
            .max(self.commutator_inv.value)
    }

    pub fn as_array(&self) -> [&WorstNorm; 5] {
        [
            &self.v1,
            &self.q,
            &self.commutator,
            &self.v1_inv,
            &self.commutator_inv,
        ]
    }
}

/// Aggregate classification over a direction sample.
#[derive(Debug, Clone)]
pub struct SphereReport {
    pub sample_count: usize,
    pub verdicts: Vec<DirectionVerdict>,
    /// Directions where the pipeline itself failed, with the error text.
    pub failures: Vec<(Vec<f64>, String)>,
    pub worst_norms: WorstNorms,
    pub aggregate: HyperbolicityClass,
    /// Worst-norm growth factor observed under 4x sample refinement, when
    /// the refinement check ran.
    pub refinement_growth: Option<f64>,
    pub convention_note: &'static str,
}

impl SphereReport {
    pub fn exit_code(&self) -> i32 {
        match self.aggregate {
            HyperbolicityClass::StrictlyHyperbolic | HyperbolicityClass::StronglyHyperbolic => 0,
            HyperbolicityClass::WeaklyHyperbolic { .. } => 2,
            HyperbolicityClass::NonHyperbolic { .. } => 3,
        }
    }
}

/// Run `classify_direction` over every sample and reduce. Per-direction
/// failures are recorded, never raised. A norm above `cond_cap` degrades a
/// strong aggregate to weakly hyperbolic with a uniformity reason.
pub fn uniformity_scan(
    system: &SecondOrderSystem,
    samples: &[DVector<f64>],
    tol: &Tolerances,
) -> SphereReport {
    let outcomes: Vec<Result<DirectionVerdict>> = samples
        .par_iter()
        .map(|khat| classify_direction(system, khat, tol))
        .collect();

    let mut verdicts = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for (khat, outcome) in samples.iter().zip(outcomes) {
        match outcome {
            Ok(v) => verdicts.push(v),
            Err(e) => failures.push((khat.iter().copied().collect(), e.to_string())),
        }
    }

    let mut worst = WorstNorms::empty();
    let mut aggregate = HyperbolicityClass::StrictlyHyperbolic;
    let mut saw_factorization_failure = false;
    for v in &verdicts {
        if v.class.rank() < aggregate.rank() {
            aggregate = v.class.clone();
        }
        if let Some(norms) = &v.uniformity {
            worst.update(norms, &v.khat);
        }
        if v.class.is_strong_or_strict() && v.uniformity.is_none() {
            saw_factorization_failure = true;
        }
    }
    if verdicts.is_empty() {
        aggregate = HyperbolicityClass::NonHyperbolic { max_imag: f64::NAN };
    }

    if aggregate.is_strong_or_strict() && (worst.max() > tol.cond_cap || saw_factorization_failure)
    {
        aggregate = HyperbolicityClass::WeaklyHyperbolic {
            reason: WeakReason::UniformityBlowup,
        };
    }

    SphereReport {
        sample_count: samples.len(),
        verdicts,
        failures,
        worst_norms: worst,
        aggregate,
        refinement_growth: None,
        convention_note: crate::CONVENTION_NOTE,
    }
}

/// Scan configuration for [`classify_system`].
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub samples: usize,
    pub scheme: SampleScheme,
    /// Explicit directions override the sampling scheme entirely.
    pub explicit: Option<Vec<Vec<f64>>>,
    /// Re-scan at 4x the sample count and flag norm growth >= 10x as a
    /// uniformity blow-up. The sampled maxima are a heuristic, not a
    /// certificate, and refinement is the cheap second data point.
    pub refine_check: bool,
    pub tol: Tolerances,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            samples: 64,
            scheme: SampleScheme::Auto,
            explicit: None,
            refine_check: false,
            tol: Tolerances::default(),
        }
    }
}

/// Sample the direction sphere and classify the system.
pub fn classify_system(system: &SecondOrderSystem, cfg: &ScanConfig) -> Result<SphereReport> {
    cfg.tol.validate()?;
    let samples: Vec<DVector<f64>> = match &cfg.explicit {
        Some(list) => {
            let mut out = Vec::with_capacity(list.len());
            for raw in list {
                let v = DVector::from_vec(raw.clone());
                let norm = v.norm();
                if !(norm.is_finite() && norm > 0.0) {
                    return Err(Error::Invalid("explicit direction must be nonzero".into()));
                }
                out.push(v / norm);
            }
            out
        }
        None => sample_directions(system.spatial_dim(), cfg.samples, cfg.scheme)?,
    };
    let mut report = uniformity_scan(system, &samples, &cfg.tol);

    if cfg.refine_check && cfg.explicit.is_none() && report.aggregate.is_strong_or_strict() {
        let refined_samples =
            sample_directions(system.spatial_dim(), cfg.samples * 4, cfg.scheme)?;
        let refined = uniformity_scan(system, &refined_samples, &cfg.tol);
        let base = report.worst_norms.max().max(1e-300);
        let growth = refined.worst_norms.max() / base;
        report.refinement_growth = Some(growth);
        // Refinement never upgrades the verdict.
        if refined.aggregate.rank() < report.aggregate.rank() {
            report.aggregate = refined.aggregate.clone();
        }
        if report.aggregate.is_strong_or_strict()
            && (growth >= 10.0 || refined.worst_norms.max() > cfg.tol.cond_cap)
        {
            report.aggregate = HyperbolicityClass::WeaklyHyperbolic {
                reason: WeakReason::UniformityBlowup,
            };
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::RMat;
    use crate::models;
    use approx::assert_relative_eq;

    #[test]
    fn almost_wave_strict_vs_weak() {
        let tol = Tolerances::default();
        let strict = models::almost_wave(2.0, 3.0);
        let v = classify_direction(&strict, &DVector::from_vec(vec![1.0]), &tol).unwrap();
        assert_eq!(v.class, HyperbolicityClass::StrictlyHyperbolic);

        let weak = models::almost_wave(2.0, 2.0);
        let v = classify_direction(&weak, &DVector::from_vec(vec![1.0]), &tol).unwrap();
        assert_eq!(
            v.class,
            HyperbolicityClass::WeaklyHyperbolic {
                reason: WeakReason::MultiplicityGap
            }
        );
        assert_eq!(v.spectral.alg_mult, vec![2]);
        assert_eq!(v.spectral.geo_mult, vec![1]);
    }

    #[test]
    fn repeated_operator_direction_is_weak() {
        let tol = Tolerances::default();
        let b = RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let sys = models::repeated_operator(&[b]).unwrap();
        let v = classify_direction(&sys, &DVector::from_vec(vec![1.0]), &tol).unwrap();
        assert_eq!(
            v.class,
            HyperbolicityClass::WeaklyHyperbolic {
                reason: WeakReason::MultiplicityGap
            }
        );
        // Eigenvalues -1 and -2, each q=2, s=1.
        assert_eq!(v.spectral.alg_mult, vec![2, 2]);
        assert_eq!(v.spectral.geo_mult, vec![1, 1]);
    }

    #[test]
    fn direction_samples_match_schemes() {
        let one = sample_directions(1, 10, SampleScheme::Auto).unwrap();
        assert_eq!(one.len(), 2);
        assert_relative_eq!(one[0][0], 1.0);
        assert_relative_eq!(one[1][0], -1.0);

        let four = sample_directions(2, 4, SampleScheme::Auto).unwrap();
        assert_eq!(four.len(), 4);
        assert_relative_eq!(four[0][0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(four[1][1], 1.0, epsilon = 1e-15);
        for v in &four {
            assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-14);
        }

        let fib = sample_directions(3, 1000, SampleScheme::Auto).unwrap();
        assert_eq!(fib.len(), 1000);
        for v in &fib {
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }

        assert!(matches!(
            sample_directions(4, 8, SampleScheme::Auto),
            Err(Error::UnsupportedDimension(4))
        ));
        let random = sample_directions(4, 8, SampleScheme::Random { seed: 3 }).unwrap();
        assert_eq!(random.len(), 8);
        for v in &random {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wave_scan_is_isotropic() {
        let sys = models::wave(2);
        let cfg = ScanConfig {
            samples: 64,
            ..Default::default()
        };
        let report = classify_system(&sys, &cfg).unwrap();
        assert!(report.aggregate.is_strong_or_strict());
        assert!(report.worst_norms.max() < 10.0);
        // identical verdicts across directions
        let first = report.verdicts[0].class.clone();
        for v in &report.verdicts {
            assert_eq!(v.class, first);
            let n = v.uniformity.as_ref().unwrap();
            assert_relative_eq!(n.commutator_inv, 0.5, epsilon = 1e-9);
        }
    }

    #[test]
    fn anisotropic_b_zero_blowup() {
        // dt^2 - dx^2 in two spatial dimensions: strong away from khat =
        // (0, +-1), with ||(QD2 - D1Q)^-1|| = 1/(2 |k_x|).
        let sys = models::directional_wave();
        let tol = Tolerances::default();
        let at = |x: f64, y: f64| DVector::from_vec(vec![x, y]);

        let v = classify_direction(&sys, &at(1.0, 0.0), &tol).unwrap();
        assert_eq!(v.class, HyperbolicityClass::StrictlyHyperbolic);
        let norms = v.uniformity.unwrap();
        assert_relative_eq!(norms.commutator_inv, 0.5, epsilon = 1e-9);

        let half = (0.5_f64).sqrt();
        let v = classify_direction(&sys, &at(half, half), &tol).unwrap();
        let norms = v.uniformity.unwrap();
        assert_relative_eq!(norms.commutator_inv, 1.0 / (2.0 * half), epsilon = 1e-8);

        // exactly degenerate direction
        let v = classify_direction(&sys, &at(0.0, 1.0), &tol).unwrap();
        assert_eq!(
            v.class,
            HyperbolicityClass::WeaklyHyperbolic {
                reason: WeakReason::MultiplicityGap
            }
        );
        assert_eq!(v.spectral.alg_mult, vec![2]);
        assert_eq!(v.spectral.geo_mult, vec![1]);
    }

    #[test]
    fn refinement_never_upgrades() {
        let sys = models::almost_wave(2.0, 2.0);
        let coarse = classify_system(
            &sys,
            &ScanConfig {
                samples: 2,
                ..Default::default()
            },
        )
        .unwrap();
        let fine = classify_system(
            &sys,
            &ScanConfig {
                samples: 8,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(fine.aggregate.rank() <= coarse.aggregate.rank());
    }

    #[test]
    fn scaling_leaves_verdicts_unchanged() {
        let tol = Tolerances::default();
        let sys = models::almost_wave(2.0, 3.0);
        let scaled = sys.scaled(37.5);
        let k = DVector::from_vec(vec![1.0]);
        let a = classify_direction(&sys, &k, &tol).unwrap();
        let b = classify_direction(&scaled, &k, &tol).unwrap();
        assert_eq!(a.class, b.class);
        for (x, y) in a
            .spectral
            .eigenvalues
            .iter()
            .zip(&b.spectral.eigenvalues)
        {
            assert_relative_eq!(x.re, y.re, epsilon = 1e-9);
        }
    }
}
