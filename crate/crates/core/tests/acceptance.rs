//! Acceptance suite: one test per release criterion, each printing a
//! PASS line on success. Run with
//! `cargo test -p pencilhyp-core --test acceptance -- --nocapture`.

use nalgebra::{DVector, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pencilhyp_core::classify::{
    classify_direction, classify_system, sample_directions, HyperbolicityClass, SampleScheme,
    ScanConfig, WeakReason,
};
use pencilhyp_core::eigenstruct::{kernel_correspondence, spectrum};
use pencilhyp_core::error::Error;
use pencilhyp_core::factorize::{
    b_zero_path, factorize_pencil, pencil_from_factors, select_eigenbasis, verify_p,
};
use pencilhyp_core::matcore::{self, det_poly, Poly, RMat, Tolerances};
use pencilhyp_core::models::{
    self, maxwell_block_structure, maxwell_case_classify, maxwell_eigenvalues, maxwell_system,
    ConeCase, LorentzianSampler, MaxwellConfig, Metric4,
};
use pencilhyp_core::pencil::{
    build_companion, build_quadratic, det_identity_residual, QuadraticPencil, SecondOrderSystem,
};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn unit(v: Vec<f64>) -> DVector<f64> {
    let v = DVector::from_vec(v);
    let n = v.norm();
    v / n
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.3 {
            return v / n;
        }
    }
}

fn random_system(rng: &mut ChaCha8Rng, d: usize, n: usize) -> SecondOrderSystem {
    loop {
        let mut coeffs = Vec::with_capacity(d * d);
        for idx in 0..d * d {
            let mut m = RMat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            if idx == 0 {
                m += RMat::identity(n, n) * 2.5;
            }
            coeffs.push(m);
        }
        // occasionally tilt the foliation covector off the time axis
        let mut ncov = DVector::zeros(d);
        ncov[0] = 1.0;
        if rng.gen_bool(0.25) {
            for i in 1..d {
                ncov[i] = rng.gen_range(-0.2..0.2);
            }
        }
        if let Ok(sys) = SecondOrderSystem::new(d, n, coeffs, ncov) {
            let a = matcore::to_complex(&sys.normal_block());
            if matcore::smallest_singular_value(&a) > 0.2 * matcore::spectral_norm(&a) {
                return sys;
            }
        }
    }
}

#[test]
fn criterion_1_determinant_identity() {
    let tol = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0_01);
    for i in 0..100 {
        let d = 2 + i % 3; // up to 4
        let n = 1 + i % 6; // up to 6
        let sys = random_system(&mut rng, d, n);
        let khat = random_unit(&mut rng, d - 1);
        let p = build_quadratic(&sys, &khat, &tol).expect("pencil");
        let resid = det_identity_residual(&p, &tol).expect("interpolation");
        let scale = 1.0
            + det_poly(|lam| p.eval(lam), 2 * n, &tol)
                .expect("det S")
                .max_coeff_norm();
        assert!(
            resid <= 1e-8 * scale,
            "system {i}: residual {resid:.3e} vs scale {scale:.3e}"
        );
    }
    println!("acceptance 1 (determinant identity det M = det S, 100 random systems): PASS");
}

#[test]
fn criterion_2_kernel_correspondence() {
    let tol = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0_02);
    for i in 0..200 {
        let n = 1 + i % 6;
        let p = QuadraticPencil::from_parts(
            RMat::from_fn(n, n, |_, _| rng.gen_range(-2.0..2.0)),
            RMat::from_fn(n, n, |_, _| rng.gen_range(-2.0..2.0)),
            DVector::from_vec(vec![1.0]),
        )
        .unwrap();
        let sd = spectrum(&p, &tol).expect("spectrum");
        for rep in &sd.eigenvalues {
            let report = kernel_correspondence(&p, *rep, &tol)
                .unwrap_or_else(|e| panic!("pencil {i} at {rep}: {e}"));
            assert_eq!(report.m_kernel_dim, report.s_kernel_dim, "pencil {i} at {rep}");
            assert!(
                report.max_stack_residual <= 1e-8 * (1.0 + rep.norm()),
                "pencil {i} at {rep}: stacked residual {:.3e}",
                report.max_stack_residual
            );
        }
    }
    println!("acceptance 2 (kernel correspondence dim ker M = dim ker S, 200 random pencils): PASS");
}

#[test]
fn criterion_3_almost_wave_regression() {
    let tol = tol();
    let k = unit(vec![1.0]);

    let strict = models::almost_wave(2.0, 3.0);
    let v = classify_direction(&strict, &k, &tol).unwrap();
    assert_eq!(v.class, HyperbolicityClass::StrictlyHyperbolic);
    let eig = v.spectral.real_eigenvalues();
    assert!((eig[0] - 2.0).abs() <= 1e-10, "eigenvalue {}", eig[0]);
    assert!((eig[1] - 3.0).abs() <= 1e-10, "eigenvalue {}", eig[1]);

    let p = build_quadratic(&strict, &k, &tol).unwrap();
    let sd = spectrum(&p, &tol).unwrap();
    let f = factorize_pencil(&p, &sd, &tol).unwrap();
    assert!((f.v1[(0, 0)] - Complex64::new(1.0, 0.0)).norm() <= 1e-10);
    assert!((f.q[(0, 0)] - Complex64::new(1.0, 0.0)).norm() <= 1e-10);
    let commutator = f.commutator();
    assert!(
        (commutator[(0, 0)].norm() - 1.0).abs() <= 1e-9,
        "|D1 Q - Q D2| = {}",
        commutator[(0, 0)].norm()
    );

    let weak = models::almost_wave(2.0, 2.0);
    let v = classify_direction(&weak, &k, &tol).unwrap();
    assert_eq!(
        v.class,
        HyperbolicityClass::WeaklyHyperbolic {
            reason: WeakReason::MultiplicityGap
        }
    );
    assert_eq!(v.spectral.alg_mult, vec![2]);
    assert_eq!(v.spectral.geo_mult, vec![1]);
    assert!((v.spectral.eigenvalues[0].re - 2.0).abs() <= 1e-10);
    assert!(v.spectral.eigenvalues[0].im.abs() <= 1e-10);

    println!("acceptance 3 (almost-wave regression, strict (2,3) and weak (2,2)): PASS");
}

#[test]
fn criterion_4_squared_operators_are_weak() {
    let tol = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0_04);
    for i in 0..50 {
        let spatial = 1 + i % 3;
        let n = 2 + i % 3;
        // B^i = V diag(real) V^-1 with a shared moderate-conditioning frame:
        // simultaneously diagonalizable, hence strongly hyperbolic at first
        // order in every direction.
        let v = {
            let gauss = RMat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let q = gauss.qr().q();
            let scales = RMat::from_diagonal(&DVector::from_fn(n, |j, _| {
                (10.0f64).powf(rng.gen_range(0.0..1.2) * j as f64 / n.max(2) as f64)
            }));
            q * scales
        };
        let v_inv = v.clone().try_inverse().unwrap();
        let bmats: Vec<RMat> = (0..spatial)
            .map(|_| {
                let lam = RMat::from_diagonal(&DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0)));
                &v * lam * &v_inv
            })
            .collect();
        assert!(models::first_order_strongly_hyperbolic(
            &bmats,
            &sample_directions(spatial, 8, scheme_for(spatial)).unwrap(),
            &tol
        )
        .unwrap());

        let sys = models::repeated_operator(&bmats).unwrap();
        let dirs = sample_directions(spatial, 8, scheme_for(spatial)).unwrap();
        for khat in &dirs {
            let verdict = classify_direction(&sys, khat, &tol)
                .unwrap_or_else(|e| panic!("symbol {i}: {e}"));
            assert_eq!(
                verdict.class,
                HyperbolicityClass::WeaklyHyperbolic {
                    reason: WeakReason::MultiplicityGap
                },
                "symbol {i} direction {khat:?}"
            );
            // first-order eigenvalues along this direction
            let mut bk = RMat::zeros(n, n);
            for (s, m) in bmats.iter().enumerate() {
                bk += m * khat[s];
            }
            let (mu, _) = matcore::eig(&matcore::to_complex(&bk)).unwrap();
            let mut distinct = true;
            for a in 0..n {
                for b in (a + 1)..n {
                    if (mu[a] - mu[b]).norm() < 1e-3 {
                        distinct = false;
                    }
                }
            }
            if distinct {
                for (q, s) in verdict
                    .spectral
                    .alg_mult
                    .iter()
                    .zip(&verdict.spectral.geo_mult)
                {
                    assert_eq!(*s * 2, *q, "symbol {i}: s != q/2");
                }
                let p = build_quadratic(&sys, khat, &tol).unwrap();
                let sd = spectrum(&p, &tol).unwrap();
                assert!(
                    matches!(
                        factorize_pencil(&p, &sd, &tol),
                        Err(Error::Defective { .. })
                    ),
                    "symbol {i}: factorization should be defective"
                );
            }
        }
    }
    println!("acceptance 4 (squared strongly hyperbolic operators are weak, 50 random symbols): PASS");
}

fn scheme_for(spatial: usize) -> SampleScheme {
    if spatial <= 3 {
        SampleScheme::Auto
    } else {
        SampleScheme::Random { seed: 1 }
    }
}

#[test]
fn criterion_5_factorization_round_trip() {
    let tol = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0_05);
    let mut built = 0usize;
    while built < 100 {
        let n = 2 + built % 5; // up to 6
        // V1, Q with condition number <= 1e3.
        let make = |rng: &mut ChaCha8Rng, max_exp: f64| {
            let gauss = RMat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let q = gauss.qr().q();
            let gauss2 = RMat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let q2 = gauss2.qr().q();
            let sv = RMat::from_diagonal(&DVector::from_fn(n, |j, _| {
                (10.0f64).powf(-max_exp * j as f64 / (n - 1).max(1) as f64)
            }));
            q * sv * q2
        };
        let exp = rng.gen_range(0.0..3.0);
        let v1 = matcore::to_complex(&make(&mut rng, exp));
        let q_exp = rng.gen_range(0.0..1.5);
        let q = matcore::to_complex(&make(&mut rng, q_exp));

        // separated eigenvalues
        let mut vals: Vec<f64> = Vec::new();
        while vals.len() < 2 * n {
            let x: f64 = rng.gen_range(-3.0..3.0);
            if vals.iter().all(|v| (v - x).abs() > 0.25) {
                vals.push(x);
            }
        }
        let d1 = DVector::from_iterator(n, vals[..n].iter().copied());
        let d2 = DVector::from_iterator(n, vals[n..].iter().copied());
        let g = {
            let mut g = q.clone();
            for i in 0..n {
                for j in 0..n {
                    g[(i, j)] *= d1[i] - d2[j];
                }
            }
            g
        };
        if matcore::smallest_singular_value(&g) < 0.05 {
            continue;
        }
        built += 1;

        let khat = DVector::from_vec(vec![1.0]);
        let p = pencil_from_factors(&v1, &q, &d1, &d2, khat, &tol).expect("real pencil");
        let sd = spectrum(&p, &tol).expect("spectrum");
        let f = factorize_pencil(&p, &sd, &tol)
            .unwrap_or_else(|e| panic!("instance {built}: {e}"));
        let ct = matcore::to_complex(p.ct());
        let bt = matcore::to_complex(p.bt());
        let r_ac = (&ct - &f.a2 * &f.a1).norm() / (1.0 + ct.norm());
        let r_ab = (&bt + &f.a1 + &f.a2).norm() / (1.0 + bt.norm());
        assert!(r_ac <= 1e-6, "instance {built}: A2 A1 residual {r_ac:.3e}");
        assert!(r_ab <= 1e-6, "instance {built}: A1 + A2 residual {r_ab:.3e}");
        let p_resid = verify_p(&p, &f);
        assert!(p_resid <= 1e-6, "instance {built}: P identity residual {p_resid:.3e}");
    }
    println!("acceptance 5 (factorization round-trip over 100 random eigenstructures): PASS");
}

#[test]
fn criterion_6_b_zero_criterion() {
    let tol = tol();

    // Positive diagonal -A^-1 C: strong with Q = 1, D2 = -D1.
    let k1 = unit(vec![1.0]);
    let distinct = QuadraticPencil::from_parts(
        RMat::zeros(2, 2),
        RMat::from_row_slice(2, 2, &[-4.0, 0.0, 0.0, -9.0]),
        k1.clone(),
    )
    .unwrap();
    let sd = spectrum(&distinct, &tol).unwrap();
    assert!(sd.is_diagonalizable());
    let f = b_zero_path(&distinct, &tol).unwrap();
    let n = f.q.nrows();
    let q_dev = (&f.q - pencilhyp_core::CMat::identity(n, n)).norm();
    assert!(q_dev <= 1e-9, "Q deviation {q_dev:.3e}");
    assert!((&f.d1 + &f.d2).norm() <= 1e-9, "D2 != -D1");
    assert!(f.max_residual() <= 1e-8);

    // With a repeated speed the verdict is strong, not strict.
    let repeated = {
        let mut coeffs = vec![RMat::zeros(3, 3); 4];
        coeffs[0] = RMat::identity(3, 3);
        coeffs[3] = -RMat::from_diagonal(&DVector::from_vec(vec![4.0, 4.0, 9.0]));
        SecondOrderSystem::new_adapted(2, 3, coeffs).unwrap()
    };
    let v = classify_direction(&repeated, &k1, &tol).unwrap();
    assert_eq!(v.class, HyperbolicityClass::StronglyHyperbolic);

    // dt^2 - dx^2 in two spatial dimensions.
    let sys = models::directional_wave();
    let at_degenerate = classify_direction(&sys, &unit(vec![0.0, 1.0]), &tol).unwrap();
    assert_eq!(
        at_degenerate.class,
        HyperbolicityClass::WeaklyHyperbolic {
            reason: WeakReason::MultiplicityGap
        }
    );
    assert_eq!(at_degenerate.spectral.alg_mult, vec![2]);
    assert_eq!(at_degenerate.spectral.geo_mult, vec![1]);

    let report = classify_system(
        &sys,
        &ScanConfig {
            samples: 64,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(matches!(
        report.aggregate,
        HyperbolicityClass::WeaklyHyperbolic { .. }
    ));
    let mut checked = 0usize;
    for v in &report.verdicts {
        if !v.class.is_strong_or_strict() {
            continue;
        }
        let kx = v.khat[0].abs();
        let expect = 1.0 / (2.0 * kx);
        let got = v.uniformity.as_ref().expect("norms recorded").commutator_inv;
        assert!(
            (got - expect).abs() <= 0.05 * expect,
            "norm {got:.6e} vs closed form {expect:.6e} at khat = {:?}",
            v.khat
        );
        checked += 1;
    }
    assert!(checked >= 60, "only {checked} strong directions checked");

    println!("acceptance 6 (B = 0 criterion and 1/(2 k_x) uniformity blow-up): PASS");
}

#[test]
fn criterion_7_maxwell_analytic_vs_numeric() {
    let tol = tol();
    let dirs = sample_directions(3, 16, SampleScheme::Auto).unwrap();
    let mut sampler = LorentzianSampler::new(0xD0_07, models::SamplerOptions::default());
    for i in 0..200 {
        let cfg = sampler.sample_separated(&dirs, 1e-3);
        let sys = maxwell_system(&cfg).unwrap_or_else(|e| panic!("config {i}: {e}"));
        for khat in &dirs {
            let pencil = build_quadratic(&sys, khat, &tol).unwrap();
            let sd = spectrum(&pencil, &tol).unwrap();
            let mut numeric: Vec<f64> = Vec::new();
            for (rep, q) in sd.eigenvalues.iter().zip(&sd.alg_mult) {
                for _ in 0..*q {
                    numeric.push(rep.re);
                }
            }
            numeric.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let roots = maxwell_eigenvalues(&cfg, khat).unwrap();
            let mut analytic = roots.with_multiplicity();
            analytic.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert_eq!(numeric.len(), 8, "config {i}");
            for (x, y) in numeric.iter().zip(&analytic) {
                assert!(
                    (x - y).abs() <= 1e-8,
                    "config {i} direction {khat:?}: numeric {x} vs analytic {y}"
                );
            }
            // degree-8 determinant product
            let det = det_poly(|lam| pencil.eval(lam), 8, &tol).unwrap();
            let product = Poly::from_roots(
                &analytic
                    .iter()
                    .map(|&r| Complex64::new(r, 0.0))
                    .collect::<Vec<_>>(),
            );
            let diff = det.max_coeff_diff(&product);
            let scale = 1.0 + product.max_coeff_norm();
            assert!(
                diff <= 1e-7 * scale,
                "config {i}: determinant product residual {:.3e}",
                diff / scale
            );
        }
    }
    println!("acceptance 7 (electromagnetic closed forms vs companion spectra, 200 configs x 16 directions): PASS");
}

#[test]
fn criterion_8_maxwell_cases() {
    let tol = tol();
    let khat = unit(vec![1.0, 0.0, 0.0]);

    // All-Minkowski: strong with q = s = 4 at +-1.
    let mink = MaxwellConfig::minkowski();
    let sys = maxwell_system(&mink).unwrap();
    let v = classify_direction(&sys, &khat, &tol).unwrap();
    assert_eq!(v.class, HyperbolicityClass::StronglyHyperbolic);
    assert_eq!(v.spectral.alg_mult, vec![4, 4]);
    assert_eq!(v.spectral.geo_mult, vec![4, 4]);
    let eig = v.spectral.real_eigenvalues();
    assert!((eig[0] + 1.0).abs() <= 1e-8 && (eig[1] - 1.0).abs() <= 1e-8);

    // Separated cones: strong with pattern {2,2,1,1,1,1} in every direction.
    let case1 = MaxwellConfig::new(
        Metric4::minkowski(),
        Metric4::diag(-1.0, 0.25, 0.25, 0.25),
        Metric4::diag(-1.0, 4.0, 4.0, 4.0),
        Vector4::new(1.0, 0.0, 0.0, 0.0),
    )
    .unwrap();
    let sys1 = maxwell_system(&case1).unwrap();
    let dirs = sample_directions(3, 16, SampleScheme::Auto).unwrap();
    let cases = maxwell_case_classify(&case1, &dirs, &tol).unwrap();
    assert!(cases.consistent);
    assert_eq!(cases.count(ConeCase::Case1), dirs.len());
    for khat in &dirs {
        let v = classify_direction(&sys1, khat, &tol).unwrap();
        assert!(v.class.is_strong_or_strict());
        let mut pattern: Vec<(usize, usize)> = v
            .spectral
            .alg_mult
            .iter()
            .zip(&v.spectral.geo_mult)
            .map(|(&q, &s)| (q, s))
            .collect();
        pattern.sort_unstable();
        assert_eq!(pattern, vec![(1, 1), (1, 1), (1, 1), (1, 1), (2, 2), (2, 2)]);
    }

    // Shared extension/gauge cones: weak, yet the analytic product form
    // survives with a singular commutator.
    let case4 = MaxwellConfig::new(
        Metric4::minkowski(),
        Metric4::diag(-1.0, 4.0, 1.0, 1.0),
        Metric4::diag(-1.0, 4.0, 1.0, 1.0),
        Vector4::new(1.0, 0.0, 0.0, 0.0),
    )
    .unwrap();
    let sys4 = maxwell_system(&case4).unwrap();
    let v = classify_direction(&sys4, &khat, &tol).unwrap();
    assert_eq!(
        v.class,
        HyperbolicityClass::WeaklyHyperbolic {
            reason: WeakReason::MultiplicityGap
        }
    );
    let mut found_shared = false;
    for (rep, (q, s)) in v
        .spectral
        .eigenvalues
        .iter()
        .zip(v.spectral.alg_mult.iter().zip(&v.spectral.geo_mult))
    {
        if (rep.re.abs() - 2.0).abs() < 1e-6 {
            assert_eq!((*q, *s), (2, 1));
            found_shared = true;
        }
    }
    assert!(found_shared);
    let block = maxwell_block_structure(&case4, &khat, &tol).unwrap();
    assert_eq!(block.case, ConeCase::Case4);
    assert!(block.defective);
    assert!(
        block.product_residual <= 1e-8,
        "product residual {:.3e}",
        block.product_residual
    );
    assert!(
        block.commutator_det.unwrap() <= 1e-8,
        "commutator determinant {:.3e}",
        block.commutator_det.unwrap()
    );
    // the numeric selection agrees that no partition exists
    let p4 = build_quadratic(&sys4, &khat, &tol).unwrap();
    let sd4 = spectrum(&p4, &tol).unwrap();
    assert!(matches!(
        select_eigenbasis(&sd4, &tol),
        Err(Error::Defective { .. })
    ));

    println!("acceptance 8 (electromagnetic cases: isotropic, separated cones, shared cones): PASS");
}

#[test]
fn criterion_9_degenerate_signature_probe() {
    let tol = tol();
    let cfg = MaxwellConfig::new(
        Metric4::minkowski(),
        Metric4::diag(-1.0, 1.0, 1.0, 0.0),
        Metric4::minkowski(),
        Vector4::new(1.0, 0.0, 0.0, 0.0),
    )
    .unwrap();
    let sys = maxwell_system(&cfg).unwrap();
    let kz = unit(vec![0.0, 0.0, 1.0]);
    let v = classify_direction(&sys, &kz, &tol).unwrap();
    assert_eq!(
        v.class,
        HyperbolicityClass::WeaklyHyperbolic {
            reason: WeakReason::MultiplicityGap
        }
    );
    let zero_idx = v
        .spectral
        .eigenvalues
        .iter()
        .position(|z| z.norm() < 1e-6)
        .expect("degenerate zero root");
    assert_eq!(v.spectral.alg_mult[zero_idx], 2);
    assert_eq!(v.spectral.geo_mult[zero_idx], 1);

    // Away from the degenerate direction the same system is strong.
    let kx = unit(vec![1.0, 0.0, 0.0]);
    let v = classify_direction(&sys, &kx, &tol).unwrap();
    assert!(v.class.is_strong_or_strict());

    println!("acceptance 9 (degenerate-signature extension metric is weak at the degenerate direction): PASS");
}

#[test]
fn companion_layout_smoke() {
    // Keeps the acceptance suite self-contained: the companion layout the
    // criteria rely on.
    let p = QuadraticPencil::from_parts(
        RMat::from_element(1, 1, -5.0),
        RMat::from_element(1, 1, 6.0),
        DVector::from_vec(vec![1.0]),
    )
    .unwrap();
    let m0 = build_companion(&p).matrix().clone();
    assert_eq!(
        (m0[(0, 0)], m0[(0, 1)], m0[(1, 0)], m0[(1, 1)]),
        (0.0, -1.0, 6.0, -5.0)
    );
}
