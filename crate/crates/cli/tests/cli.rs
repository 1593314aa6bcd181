//! End-to-end tests of the command-line surface: exit codes, report schema,
//! determinism of builds, and the tolerance environment override.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qgl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qgl"))
}

fn run(args: &[&str]) -> Output {
    qgl().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qgl-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("tmp dir");
    dir.join(name)
}

fn write_pair_groupoid(path: &Path, n: usize) {
    let g = qgl_core::groupoid::pair_groupoid(n);
    std::fs::write(path, g.to_json()).expect("write groupoid");
}

#[test]
fn validate_accepts_pair_groupoid() {
    let path = tmp("pair3.json");
    write_pair_groupoid(&path, 3);
    let out = run(&["validate-groupoid", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
}

#[test]
fn validate_rejects_missing_inverse_with_diagnostic() {
    let g = qgl_core::groupoid::cyclic_group(3);
    let mut wire: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
    wire.as_object_mut()
        .unwrap()
        .get_mut("inverse")
        .unwrap()
        .as_object_mut()
        .unwrap()
        .remove("g1");
    let path = tmp("missing_inverse.json");
    std::fs::write(&path, serde_json::to_string(&wire).unwrap()).unwrap();
    let out = run(&["validate-groupoid", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("g1"),
        "diagnostic names the element: {stderr}"
    );
}

#[test]
fn validate_flags_broken_associativity() {
    let g = qgl_core::groupoid::connected_groupoid(2, 2, "x");
    let mut wire = qgl_core::groupoid::GroupoidWire::from(&g);
    for entry in wire.mult.iter_mut() {
        if entry[0] == "x0>1.h0" && entry[1] == "x1>1.h0" {
            entry[2] = "x0>1.h1".to_string();
        }
    }
    let path = tmp("broken_assoc.json");
    std::fs::write(&path, serde_json::to_string(&wire).unwrap()).unwrap();
    let report_path = tmp("assoc_report.json");
    let out = run(&[
        "validate-groupoid",
        path.to_str().unwrap(),
        "--report",
        report_path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["schema"], "qgl-report-1");
    let assoc = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "groupoid.associativity")
        .unwrap();
    assert_eq!(assoc["pass"], false);
    assert!(assoc["detail"].as_str().unwrap().contains("x0>1.h0"));
}

#[test]
fn build_is_deterministic_and_checks_clean() {
    let path = tmp("pair2.json");
    write_pair_groupoid(&path, 2);
    let out1 = tmp("built1.json");
    let out2 = tmp("built2.json");
    for (target, model) in [(&out1, "function"), (&out2, "function")] {
        let out = run(&[
            "build",
            path.to_str().unwrap(),
            "--model",
            model,
            "-o",
            target.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{out:?}");
    }
    let bytes1 = std::fs::read(&out1).unwrap();
    let bytes2 = std::fs::read(&out2).unwrap();
    assert_eq!(bytes1, bytes2, "byte-identical builds for fixed input");

    let report_path = tmp("check_report.json");
    let out = run(&[
        "check",
        out1.to_str().unwrap(),
        "--report",
        report_path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["schema"], "qgl-report-1");
    assert_eq!(report["verdict"], true);
    for check in report["checks"].as_array().unwrap() {
        for key in ["id", "anchor", "residual", "tolerance", "pass"] {
            assert!(check.get(key).is_some(), "check carries `{key}`");
        }
        assert!(
            !check["anchor"].as_str().unwrap().is_empty(),
            "every check carries its anchor"
        );
    }
}

#[test]
fn build_matches_golden_file() {
    // pins the candidate wire format: a rebuild of the shipped two-point
    // function model must be byte-identical to the committed golden file
    let groupoid_path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/pair2.json")
        .canonicalize()
        .unwrap();
    let golden_path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/pair2_function.json");
    let built = tmp("golden_rebuild.json");
    let out = run(&[
        "build",
        groupoid_path.to_str().unwrap(),
        "--model",
        "function",
        "-o",
        built.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let rebuilt = std::fs::read_to_string(&built).unwrap();
    let golden = std::fs::read_to_string(&golden_path).unwrap();
    assert_eq!(rebuilt, golden, "wire format drifted from the golden file");
}

#[test]
fn build_convolution_model_round_trips() {
    let path = tmp("pair3b.json");
    write_pair_groupoid(&path, 3);
    let built = tmp("built_conv.json");
    let out = run(&[
        "build",
        path.to_str().unwrap(),
        "--model",
        "convolution",
        "-o",
        built.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["check", built.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
}

#[test]
fn nonabelian_isotropy_exits_3() {
    // S_3 as a one-object groupoid
    let perms: Vec<Vec<usize>> = vec![
        vec![0, 1, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![1, 0, 2],
        vec![0, 2, 1],
        vec![2, 1, 0],
    ];
    let compose =
        |p: &Vec<usize>, q: &Vec<usize>| -> Vec<usize> { (0..3).map(|k| p[q[k]]).collect() };
    let name = |p: &Vec<usize>| format!("s{}{}{}", p[0], p[1], p[2]);
    let mut source = std::collections::BTreeMap::new();
    let mut target = std::collections::BTreeMap::new();
    let mut inverse = std::collections::BTreeMap::new();
    let mut mult = Vec::new();
    for p in &perms {
        source.insert(name(p), name(&perms[0]));
        target.insert(name(p), name(&perms[0]));
        let mut inv = vec![0; 3];
        for k in 0..3 {
            inv[p[k]] = k;
        }
        inverse.insert(name(p), name(&inv));
        for q in &perms {
            mult.push([name(p), name(q), name(&compose(p, q))]);
        }
    }
    let wire = qgl_core::groupoid::GroupoidWire {
        elements: perms.iter().map(name).collect(),
        units: vec![name(&perms[0])],
        source,
        target,
        mult,
        inverse,
    };
    let path = tmp("s3.json");
    std::fs::write(&path, serde_json::to_string(&wire).unwrap()).unwrap();
    let out = run(&[
        "build",
        path.to_str().unwrap(),
        "--model",
        "convolution",
        "-o",
        tmp("s3_out.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn check_exits_1_on_failing_candidate() {
    // the two-point function model with the base weight corrupted to (1, 2)
    // must fail at the separability solve
    let qg = qgl_core::fixtures::fx5_assembly();
    let path = tmp("fx5.json");
    std::fs::write(&path, qgl_core::wire::qgd_to_json(&qg)).unwrap();
    let report_path = tmp("fx5_report.json");
    let out = run(&[
        "check",
        path.to_str().unwrap(),
        "--report",
        report_path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["verdict"], false);
    let solve = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "sepid.solve")
        .expect("failing check id sepid.solve present");
    assert_eq!(solve["pass"], false);
}

#[test]
fn check_rejects_truncated_file() {
    let path = tmp("pair2c.json");
    write_pair_groupoid(&path, 2);
    let built = tmp("built_trunc.json");
    run(&[
        "build",
        path.to_str().unwrap(),
        "--model",
        "function",
        "-o",
        built.to_str().unwrap(),
    ]);
    let full = std::fs::read_to_string(&built).unwrap();
    let truncated_path = tmp("truncated.json");
    std::fs::write(&truncated_path, &full[..full.len() / 2]).unwrap();
    let out = run(&["check", truncated_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn demos_cover_fixtures_and_exit_codes() {
    assert_eq!(
        run(&["demo", "pair-groupoid", "--n", "3"]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["demo", "matrix-base", "--n", "2"]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["demo", "cyclic-group", "--n", "2"]).status.code(),
        Some(0)
    );
    assert_eq!(run(&["demo", "disjoint-union"]).status.code(), Some(0));

    let out = run(&["demo", "bad-weights"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("no separability idempotent"),
        "NoSolution explanation on stderr: {stderr}"
    );

    assert_eq!(run(&["demo", "no-such-demo"]).status.code(), Some(4));
}

#[test]
fn env_tolerance_override_applies() {
    let report_path = tmp("tol_report.json");
    let out = qgl()
        .env("QGL_TOL", "1e-3")
        .args([
            "demo",
            "cyclic-group",
            "--n",
            "2",
            "--report",
            report_path.to_str().unwrap(),
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    let tol = report["checks"][0]["tolerance"].as_f64().unwrap();
    assert!((tol - 1e-3).abs() < 1e-12, "QGL_TOL overrides the default");

    let out = qgl()
        .env("QGL_TOL", "banana")
        .args(["demo", "cyclic-group"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_ids_are_stable_across_runs() {
    let path = tmp("pair2d.json");
    write_pair_groupoid(&path, 2);
    let built = tmp("built_stable.json");
    run(&[
        "build",
        path.to_str().unwrap(),
        "--model",
        "function",
        "-o",
        built.to_str().unwrap(),
    ]);
    let ids = |raw: &str| -> Vec<String> {
        let v: serde_json::Value = serde_json::from_str(raw).unwrap();
        v["checks"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["id"].as_str().unwrap().to_string())
            .collect()
    };
    let r1 = tmp("stable1.json");
    let r2 = tmp("stable2.json");
    for r in [&r1, &r2] {
        let out = run(&[
            "check",
            built.to_str().unwrap(),
            "--report",
            r.to_str().unwrap(),
            "--format",
            "json",
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(
        ids(&std::fs::read_to_string(&r1).unwrap()),
        ids(&std::fs::read_to_string(&r2).unwrap())
    );
}
