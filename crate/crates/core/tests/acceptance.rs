//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Criteria:
//!   1. fixture pass          — all named candidates verify end to end
//!   2. separability solver   — FX4 closed form, FX5 obstruction
//!   3. group degeneration    — B = ℂ, E = 1⊗1 for every group fixture
//!   4. modular suite         — KMS/group law/GNS on random weights
//!   5. weight compatibility  — ν((ψ⊗id)Δx) = ψ(x) and the μ/φ twin
//!   6. randomized sweep      — seeded random groupoids through both models
//!   7. negative controls     — six injected defects, expected check ids
//!   8. inequality suite      — Cauchy–Schwarz and |ω| bounds, 200 samples

use std::time::Instant;

use qgl_core::algebra::{kron_acc, random_element, tensor_algebra, BlockAlgebra};
use qgl_core::fixtures;
use qgl_core::groupoid::{random_groupoid, validate_groupoid, GroupoidWire};
use qgl_core::linalg::cx;
use qgl_core::models::{convolution_algebra_model, function_algebra_model};
use qgl_core::qgroupoid::{
    check_weight_compatibility, verify_quantum_groupoid, Comultiplication, QuantumGroupoidData,
};
use qgl_core::report::VerificationReport;
use qgl_core::sepid::{
    check_sepid_properties, solve_separability_idempotent, verify_separability, SolveError,
};
use qgl_core::weights::{
    check_kms, functional_abs_checks, generalized_cauchy_schwarz_check, gns_checks, Functional,
    Weight,
};
use qgl_core::RunSettings;
use rand::{Rng, SeedableRng};

const TOL: f64 = 1e-9;

fn settings() -> RunSettings {
    RunSettings::with_tolerance(TOL)
}

fn assert_report_passes(name: &str, report: &VerificationReport) {
    for c in &report.checks {
        assert!(
            c.pass && c.residual <= TOL,
            "{name}: check {} failed with residual {:.3e} [{}] {:?}",
            c.id,
            c.residual,
            c.anchor,
            c.detail
        );
    }
    assert!(report.verdict);
}

fn pass(criterion: &str) {
    println!("acceptance {criterion}: PASS");
}

#[test]
fn criterion_1_fixture_pass() {
    let start = Instant::now();
    let settings = settings();
    let fixtures: Vec<(String, QuantumGroupoidData)> = vec![
        (
            "FX1 pair function n=2".into(),
            fixtures::fx1_pair_function(2),
        ),
        (
            "FX1 pair function n=3".into(),
            fixtures::fx1_pair_function(3),
        ),
        (
            "FX1 pair function n=4".into(),
            fixtures::fx1_pair_function(4),
        ),
        (
            "FX2 matrix conv n=2".into(),
            fixtures::fx2_matrix_convolution(2),
        ),
        (
            "FX2 matrix conv n=3".into(),
            fixtures::fx2_matrix_convolution(3),
        ),
        (
            "FX2 matrix conv n=4".into(),
            fixtures::fx2_matrix_convolution(4),
        ),
        ("FX3 Z2 function".into(), fixtures::fx3_cyclic_function(2)),
        ("FX3 Z3 function".into(), fixtures::fx3_cyclic_function(3)),
        ("union function".into(), fixtures::disjoint_union_function()),
        (
            "union convolution".into(),
            fixtures::disjoint_union_convolution(),
        ),
    ];
    for (name, qg) in &fixtures {
        let report = verify_quantum_groupoid(qg, &settings);
        assert_report_passes(name, &report);
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 30,
        "fixture suite took {elapsed:?}, budget is 30 s"
    );
    pass("criterion 1 (fixture pass)");
}

#[test]
fn criterion_2_separability_solver() {
    let settings = settings();

    let (b, c, r, nu) = fixtures::fx4_base();
    let e = solve_separability_idempotent(&b, &c, &r, &nu, TOL).expect("FX4 solves");
    let mut expected = tensor_algebra(&b, &c).zero();
    for i in 0..2 {
        for j in 0..2 {
            kron_acc(
                &mut expected,
                cx(0.5, 0.0),
                &b.basis_unit(0, i, j),
                &c.basis_unit(0, i, j),
            );
        }
    }
    assert!(
        e.distance(&expected) <= 1e-10,
        "FX4 idempotent is (1/2)Σ e_ij⊗e_ij"
    );
    let outcome = verify_separability(&b, &c, &r, &nu, Some(&expected), &settings);
    let triple = outcome.triple.expect("FX4 triple");
    for ch in &outcome.checks {
        assert!(ch.pass, "FX4 {ch:?}");
    }
    let props = check_sepid_properties(&triple, &settings);
    assert_eq!(props.len(), 12);
    for ch in &props {
        assert!(ch.pass && ch.residual <= TOL, "FX4 property {ch:?}");
    }

    let (b, c, r, nu) = fixtures::fx5_base();
    match solve_separability_idempotent(&b, &c, &r, &nu, TOL) {
        Err(SolveError::NoSolution { idempotency, .. }) => {
            assert!(
                (idempotency - 0.25).abs() <= 1e-10,
                "FX5 candidate has ‖E²−E‖ = {idempotency}, expected 0.25"
            );
        }
        other => panic!("FX5 must yield NoSolution, got {other:?}"),
    }
    pass("criterion 2 (separability solver)");
}

#[test]
fn criterion_3_quantum_group_degeneration() {
    let settings = settings();
    let groups: Vec<(String, QuantumGroupoidData)> = vec![
        ("Z2 function".into(), fixtures::fx3_cyclic_function(2)),
        ("Z3 function".into(), fixtures::fx3_cyclic_function(3)),
        ("Z2 convolution".into(), fixtures::fx3_cyclic_convolution(2)),
        ("Z3 convolution".into(), fixtures::fx3_cyclic_convolution(3)),
    ];
    for (name, qg) in &groups {
        assert_eq!(qg.base_b.total_dim(), 1, "{name}: B = ℂ");
        let unit = qg.delta.target().unit();
        assert!(
            qg.e.rel_distance(&unit) <= 1e-12,
            "{name}: E = 1⊗1 (residual {:.3e})",
            qg.e.rel_distance(&unit)
        );
        let report = verify_quantum_groupoid(qg, &settings);
        assert_report_passes(name, &report);
    }
    pass("criterion 3 (quantum group degeneration)");
}

#[test]
fn criterion_4_modular_suite() {
    let settings = settings();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x4d6f64);
    let dims_pool: Vec<Vec<usize>> = vec![
        vec![1],
        vec![2],
        vec![3],
        vec![4],
        vec![2, 2],
        vec![1, 2],
        vec![3, 2],
        vec![1, 1, 2],
        vec![2, 2, 3],
        vec![4, 2, 1],
    ];
    for trial in 0..50 {
        let dims = &dims_pool[rng.random_range(0..dims_pool.len())];
        let alg = BlockAlgebra::new(dims).unwrap();
        assert!(alg.total_dim() <= 25);
        // random positive invertible density: X†X + εI
        let x = random_element(&alg, &mut rng);
        let density = x.adjoint().mul(&x).add(&alg.unit().scale(cx(0.3, 0.0)));
        let w = Weight::new(alg.clone(), density).unwrap();

        for c in check_kms(&format!("rand{trial}"), &w, &settings) {
            assert!(c.pass && c.residual <= TOL, "trial {trial}: {c:?}");
        }
        for c in gns_checks(&format!("rand{trial}"), &w, &settings) {
            assert!(c.pass && c.residual <= TOL, "trial {trial}: {c:?}");
        }
        // group law σ_z∘σ_w = σ_{z+w} at complex parameters
        let probes = [cx(0.4, 0.3), cx(-0.7, 0.2), cx(0.0, -0.5)];
        let y = random_element(&alg, &mut rng);
        for &z1 in &probes {
            for &z2 in &probes {
                let lhs = w.modular(z1, &w.modular(z2, &y));
                let rhs = w.modular(z1 + z2, &y);
                assert!(
                    lhs.rel_distance(&rhs) <= TOL,
                    "trial {trial}: group law residual {:.3e}",
                    lhs.rel_distance(&rhs)
                );
            }
        }
    }
    pass("criterion 4 (modular suite: 50 random weights)");
}

#[test]
fn criterion_5_weight_compatibility_identities() {
    let settings = settings();
    let fixtures: Vec<(String, QuantumGroupoidData)> = vec![
        ("FX1 n=2".into(), fixtures::fx1_pair_function(2)),
        ("FX1 n=3".into(), fixtures::fx1_pair_function(3)),
        ("FX2 n=2".into(), fixtures::fx2_matrix_convolution(2)),
        ("FX2 n=3".into(), fixtures::fx2_matrix_convolution(3)),
        ("FX3 m=2".into(), fixtures::fx3_cyclic_function(2)),
        ("FX3 m=3".into(), fixtures::fx3_cyclic_function(3)),
        ("union fn".into(), fixtures::disjoint_union_function()),
        ("union conv".into(), fixtures::disjoint_union_convolution()),
    ];
    for (name, qg) in &fixtures {
        let outcome = verify_separability(
            &qg.base_b,
            &qg.base_c,
            &qg.r,
            &qg.nu,
            Some(&qg.e_base),
            &settings,
        );
        let triple = outcome.triple.expect("triple");
        let checks = check_weight_compatibility(qg, Some(&triple), &settings);
        for c in checks.iter().filter(|c| c.id.starts_with("compat.")) {
            assert!(c.pass && c.residual <= TOL, "{name}: {c:?}");
        }
    }
    pass("criterion 5 (ν((ψ⊗id)Δx) = ψ(x) and μ((id⊗φ)Δx) = φ(x))");
}

#[test]
fn criterion_6_randomized_sweep() {
    let settings = settings();
    // parameter sets keep every groupoid at ≤ 30 elements with supported
    // (cyclic) isotropy
    let params: [(usize, usize, &[usize]); 5] = [
        (2, 2, &[1, 2, 3]),
        (1, 3, &[1, 2]),
        (2, 3, &[1]),
        (1, 2, &[2, 3]),
        (3, 2, &[1]),
    ];
    let mut count = 0usize;
    for seed in 0..25u64 {
        let (ncomp, maxobj, orders) = params[(seed as usize) % params.len()];
        let g = random_groupoid(ncomp, maxobj, orders, seed);
        assert!(g.len() <= 30, "seed {seed}: {} elements", g.len());
        assert!(validate_groupoid(&g).verdict, "seed {seed}");

        for (model_name, qg) in [
            (
                "function",
                function_algebra_model(&g).expect("function model"),
            ),
            (
                "convolution",
                convolution_algebra_model(&g).expect("convolution model"),
            ),
        ] {
            let report = verify_quantum_groupoid(&qg, &settings);
            if !report.verdict {
                for c in report.failing() {
                    println!(
                        "seed {seed} {model_name}: FAIL {} [{}] residual {:.3e}",
                        c.id, c.anchor, c.residual
                    );
                }
            }
            assert!(report.verdict, "seed {seed} {model_name} model");
        }
        count += 1;
    }
    assert!(count >= 25);
    pass("criterion 6 (randomized sweep: 25 groupoids, both models)");
}

#[test]
fn criterion_7_negative_controls() {
    let settings = settings();

    // (1) corrupted Δ: dropping a basis image breaks fullness
    {
        let qg = fixtures::fx2_matrix_convolution(2);
        let mut images: Vec<_> = qg.a.basis().iter().map(|u| qg.delta.apply(u)).collect();
        images[0] = qg.delta.target().zero();
        let delta = Comultiplication::from_images(&qg.a, &images).unwrap();
        let bad = QuantumGroupoidData { delta, ..qg };
        let report = verify_quantum_groupoid(&bad, &settings);
        assert!(!report.verdict);
        assert!(
            !report.find("comult.fullness.slice_right").unwrap().pass,
            "corrupted Δ must fail fullness"
        );
    }

    // (2) wrong E: 1⊗1 in the matrix model breaks the density condition
    {
        let qg = fixtures::fx2_matrix_convolution(2);
        let bad = QuantumGroupoidData {
            e: qg.delta.target().unit(),
            ..qg
        };
        let report = verify_quantum_groupoid(&bad, &settings);
        assert!(!report.verdict);
        assert!(!report.find("canonical.density.left").unwrap().pass);
    }

    // (3) wrong φ: an off-diagonal density breaks left invariance. (A
    //     weighted diagonal trace stays a valid Haar weight on the matrix
    //     model — Haar weights are not unique over a nontrivial base — so
    //     the no-false-positive direction is asserted alongside.)
    {
        let qg = fixtures::fx2_matrix_convolution(2);
        let mut density = qg.a.unit();
        density.block_mut(0)[(0, 1)] = cx(0.5, 0.0);
        density.block_mut(0)[(1, 0)] = cx(0.5, 0.0);
        let bad = QuantumGroupoidData {
            phi: Weight::new(qg.a.clone(), density).unwrap(),
            ..qg.clone()
        };
        let report = verify_quantum_groupoid(&bad, &settings);
        assert!(!report.verdict);
        assert!(!report.find("invariance.left.membership").unwrap().pass);

        let mut diag = qg.a.zero();
        diag.block_mut(0)[(0, 0)] = cx(2.0, 0.0);
        diag.block_mut(0)[(1, 1)] = cx(1.0, 0.0);
        let mut diag2 = qg.a.zero();
        diag2.block_mut(0)[(0, 0)] = cx(1.0, 0.0);
        diag2.block_mut(0)[(1, 1)] = cx(3.0, 0.0);
        let still_valid = QuantumGroupoidData {
            psi: Weight::new(qg.a.clone(), diag).unwrap(),
            phi: Weight::new(qg.a.clone(), diag2).unwrap(),
            ..qg
        };
        let report = verify_quantum_groupoid(&still_valid, &settings);
        assert!(
            report.verdict,
            "weighted traces are still invariant Haar weights on M_n: no false positive"
        );

        // on the function model a non-uniform fiber weight genuinely breaks
        // invariance
        let qg = fixtures::fx1_pair_function(2);
        let mut w = vec![1.0; qg.a.num_blocks()];
        w[1] = 2.0;
        let bad = QuantumGroupoidData {
            psi: Weight::diagonal(&qg.a, &w).unwrap(),
            ..qg
        };
        let report = verify_quantum_groupoid(&bad, &settings);
        assert!(!report.verdict);
        let membership = report.find("invariance.right.membership").unwrap();
        let nu_psi = report.find("compat.nu_psi").unwrap();
        assert!(!membership.pass || !nu_psi.pass);
    }

    // (4) broken R: the identity map is not anti-multiplicative on M_2
    {
        let (b, c, _r, nu) = fixtures::fx4_base();
        let r_bad = qgl_core::linmap::LinearMap::identity(&b);
        let outcome = verify_separability(&b, &c, &r_bad, &nu, None, &settings);
        let report = VerificationReport::from_checks(outcome.checks);
        assert!(!report.verdict);
        let bad = report.find("sepid.r.mult").unwrap();
        assert!(!bad.pass && bad.residual >= 0.1);
    }

    // (5) broken associativity: witnessed by validate_groupoid
    {
        let g = qgl_core::groupoid::connected_groupoid(2, 2, "x");
        let mut wire = GroupoidWire::from(&g);
        for entry in wire.mult.iter_mut() {
            if entry[0] == "x0>1.h0" && entry[1] == "x1>1.h0" {
                entry[2] = "x0>1.h1".to_string();
            }
        }
        let g2 = qgl_core::groupoid::FiniteGroupoid::try_from(wire).unwrap();
        let report = validate_groupoid(&g2);
        assert!(!report.verdict);
        assert!(!report.find("groupoid.associativity").unwrap().pass);
    }

    // (6) non-counting ν: rejected by the constructor with a diagnostic, and
    //     a hand-assembled candidate fails at the separability solve
    {
        let g = qgl_core::groupoid::pair_groupoid(2);
        match qgl_core::models::function_algebra_model_with_nu(&g, &[1.0, 2.0]) {
            Err(qgl_core::error::Error::NonCountingBaseWeight(msg)) => {
                assert!(msg.contains("forces"), "{msg}");
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        let report = verify_quantum_groupoid(&fixtures::fx5_assembly(), &settings);
        assert!(!report.verdict);
        assert!(!report.find("sepid.solve").unwrap().pass);
    }

    pass("criterion 7 (negative controls: six defects, expected check ids)");
}

#[test]
fn criterion_8_inequality_suite() {
    let settings = settings();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x1e9);
    let m2 = BlockAlgebra::matrix(2);
    let alg = BlockAlgebra::new(&[2, 1]).unwrap();
    let t2 = tensor_algebra(&m2, &alg);

    // generalized Cauchy–Schwarz: 200 random instances
    for trial in 0..200 {
        let x = random_element(&t2, &mut rng);
        let y = random_element(&t2, &mut rng);
        let d = random_element(&m2, &mut rng);
        let density = d.adjoint().mul(&d).add(&m2.unit().scale(cx(0.2, 0.0)));
        let w = Weight::new(m2.clone(), density).unwrap();
        let check = generalized_cauchy_schwarz_check(&w, &x, &y, 1e-10).unwrap();
        assert!(
            check.pass,
            "trial {trial}: PSD residual {:.3e}",
            check.residual
        );
    }

    // |ω| bound: 200 random functionals, basis plus random probes each
    let mut abs_settings = settings.clone();
    abs_settings.samples = 8;
    abs_settings.tolerance = 1e-10;
    for trial in 0..200 {
        let omega = Functional::new(alg.clone(), random_element(&alg, &mut rng)).unwrap();
        for c in functional_abs_checks(&format!("rand{trial}"), &omega, &abs_settings) {
            assert!(c.pass, "trial {trial}: {c:?}");
        }
    }
    pass("criterion 8 (inequality suite: 200 random instances each)");
}
