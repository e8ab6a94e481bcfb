//! Built-in regression suite: the worked examples with known verdicts,
//! runnable from the shipped binary. Prints one line per check.

use nalgebra::{DVector, Vector4};

use pencilhyp_core::classify::{
    classify_direction, classify_system, HyperbolicityClass, ScanConfig, WeakReason,
};
use pencilhyp_core::eigenstruct::spectrum;
use pencilhyp_core::factorize::factorize_pencil;
use pencilhyp_core::matcore::{RMat, Tolerances};
use pencilhyp_core::models::{
    self, maxwell_block_structure, maxwell_system, ConeCase, MaxwellConfig, Metric4,
};
use pencilhyp_core::pencil::{build_quadratic, det_identity_residual};

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, run: impl FnOnce() -> Result<(), String>) -> Outcome {
    match run() {
        Ok(()) => Outcome {
            name,
            pass: true,
            detail: String::new(),
        },
        Err(detail) => Outcome {
            name,
            pass: false,
            detail,
        },
    }
}

fn expect(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

pub fn run() -> anyhow::Result<i32> {
    let tol = Tolerances::default();
    let k1 = DVector::from_vec(vec![1.0]);

    let outcomes = vec![
        check("almost-wave (2,3) strictly hyperbolic", || {
            let v = classify_direction(&models::almost_wave(2.0, 3.0), &k1, &tol)
                .map_err(|e| e.to_string())?;
            expect(
                v.class == HyperbolicityClass::StrictlyHyperbolic,
                format!("got {}", v.class.label()),
            )
        }),
        check("almost-wave (2,2) weakly hyperbolic with q=2, s=1", || {
            let v = classify_direction(&models::almost_wave(2.0, 2.0), &k1, &tol)
                .map_err(|e| e.to_string())?;
            expect(
                v.class
                    == HyperbolicityClass::WeaklyHyperbolic {
                        reason: WeakReason::MultiplicityGap,
                    }
                    && v.spectral.alg_mult == vec![2]
                    && v.spectral.geo_mult == vec![1],
                format!("got {} q={:?} s={:?}", v.class.label(), v.spectral.alg_mult, v.spectral.geo_mult),
            )
        }),
        check("wave equation factorizes with unit speeds", || {
            let sys = models::wave(2);
            let report = classify_system(
                &sys,
                &ScanConfig {
                    samples: 32,
                    ..Default::default()
                },
            )
            .map_err(|e| e.to_string())?;
            expect(
                report.aggregate.is_strong_or_strict() && report.worst_norms.max() < 10.0,
                format!("aggregate {}", report.aggregate.label()),
            )
        }),
        check("squared transport operator is weakly hyperbolic", || {
            let b = RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
            let sys = models::repeated_operator(&[b]).map_err(|e| e.to_string())?;
            let v = classify_direction(&sys, &k1, &tol).map_err(|e| e.to_string())?;
            expect(
                matches!(v.class, HyperbolicityClass::WeaklyHyperbolic { .. }),
                format!("got {}", v.class.label()),
            )
        }),
        check("determinant identity on the almost-wave pencil", || {
            let p = build_quadratic(&models::almost_wave(2.0, 3.0), &k1, &tol)
                .map_err(|e| e.to_string())?;
            let r = det_identity_residual(&p, &tol).map_err(|e| e.to_string())?;
            expect(r < 1e-8, format!("residual {r:.3e}"))
        }),
        check("isotropic electromagnetic configuration is strong", || {
            let sys = maxwell_system(&MaxwellConfig::minkowski()).map_err(|e| e.to_string())?;
            let khat = DVector::from_vec(vec![1.0, 0.0, 0.0]);
            let v = classify_direction(&sys, &khat, &tol).map_err(|e| e.to_string())?;
            expect(
                v.class == HyperbolicityClass::StronglyHyperbolic
                    && v.spectral.alg_mult == vec![4, 4]
                    && v.spectral.geo_mult == vec![4, 4],
                format!("got {} q={:?}", v.class.label(), v.spectral.alg_mult),
            )
        }),
        check("separated-cones configuration is strong", || {
            let cfg = MaxwellConfig::new(
                Metric4::minkowski(),
                Metric4::diag(-1.0, 0.25, 0.25, 0.25),
                Metric4::diag(-1.0, 4.0, 4.0, 4.0),
                Vector4::new(1.0, 0.0, 0.0, 0.0),
            )
            .map_err(|e| e.to_string())?;
            let sys = maxwell_system(&cfg).map_err(|e| e.to_string())?;
            let report = classify_system(
                &sys,
                &ScanConfig {
                    samples: 16,
                    ..Default::default()
                },
            )
            .map_err(|e| e.to_string())?;
            expect(
                report.aggregate.is_strong_or_strict(),
                format!("aggregate {}", report.aggregate.label()),
            )
        }),
        check("shared extension/gauge cones: weak but factorizable", || {
            let cfg = MaxwellConfig::new(
                Metric4::minkowski(),
                Metric4::diag(-1.0, 4.0, 1.0, 1.0),
                Metric4::diag(-1.0, 4.0, 1.0, 1.0),
                Vector4::new(1.0, 0.0, 0.0, 0.0),
            )
            .map_err(|e| e.to_string())?;
            let khat = DVector::from_vec(vec![1.0, 0.0, 0.0]);
            let sys = maxwell_system(&cfg).map_err(|e| e.to_string())?;
            let v = classify_direction(&sys, &khat, &tol).map_err(|e| e.to_string())?;
            let block = maxwell_block_structure(&cfg, &khat, &tol).map_err(|e| e.to_string())?;
            expect(
                matches!(v.class, HyperbolicityClass::WeaklyHyperbolic { .. })
                    && block.case == ConeCase::Case4
                    && block.defective
                    && block.product_residual < 1e-8
                    && block.commutator_det.is_some_and(|d| d < 1e-8),
                format!(
                    "class {} case {} defective {} product {:.2e}",
                    v.class.label(),
                    block.case.label(),
                    block.defective,
                    block.product_residual
                ),
            )
        }),
        check("degenerate extension signature is weak at the degenerate direction", || {
            let cfg = MaxwellConfig::new(
                Metric4::minkowski(),
                Metric4::diag(-1.0, 1.0, 1.0, 0.0),
                Metric4::minkowski(),
                Vector4::new(1.0, 0.0, 0.0, 0.0),
            )
            .map_err(|e| e.to_string())?;
            let sys = maxwell_system(&cfg).map_err(|e| e.to_string())?;
            let kz = DVector::from_vec(vec![0.0, 0.0, 1.0]);
            let v = classify_direction(&sys, &kz, &tol).map_err(|e| e.to_string())?;
            expect(
                matches!(
                    v.class,
                    HyperbolicityClass::WeaklyHyperbolic {
                        reason: WeakReason::MultiplicityGap
                    }
                ),
                format!("got {}", v.class.label()),
            )
        }),
        check("degenerate direction of dt^2 - dx^2 detected", || {
            let sys = models::directional_wave();
            let v = classify_direction(&sys, &DVector::from_vec(vec![0.0, 1.0]), &tol)
                .map_err(|e| e.to_string())?;
            expect(
                matches!(v.class, HyperbolicityClass::WeaklyHyperbolic { .. }),
                format!("got {}", v.class.label()),
            )
        }),
        check("factorization residuals at machine accuracy", || {
            let p = build_quadratic(&models::almost_wave(2.0, 3.0), &k1, &tol)
                .map_err(|e| e.to_string())?;
            let sd = spectrum(&p, &tol).map_err(|e| e.to_string())?;
            let f = factorize_pencil(&p, &sd, &tol).map_err(|e| e.to_string())?;
            expect(
                f.max_residual() < 1e-9,
                format!("max residual {:.3e}", f.max_residual()),
            )
        }),
    ];

    let mut failed = 0usize;
    for o in &outcomes {
        if o.pass {
            println!("selftest: {:<62} PASS", o.name);
        } else {
            failed += 1;
            println!("selftest: {:<62} FAIL ({})", o.name, o.detail);
        }
    }
    println!(
        "selftest: {} of {} checks passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    Ok(if failed == 0 { 0 } else { 1 })
}
