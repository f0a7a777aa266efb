//! End-to-end runs of the binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn shellkit(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shellkit"));
    cmd.args(args).env_remove("SHELLKIT_THREADS");
    if let Some(t) = threads {
        cmd.env("SHELLKIT_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run_example(verb: &str, config: &str, out: &Path) -> (i32, Value) {
    let o = shellkit(
        &[
            verb,
            "--config",
            example(config).to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        Some("2"),
    );
    let report = std::fs::read_to_string(out.join("report.json")).expect("report written");
    (o.status.code().unwrap(), serde_json::from_str(&report).unwrap())
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn invalid_configs_exit_2_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown_key.json", r#"{"trails": 10}"#),
        ("syntax.json", r#"{"trials": "#),
        ("missing_model.json", r#"{"trials": 10}"#),
        (
            "bad_poisson.json",
            r#"{"model": {"family": "pietraszkiewicz", "params": {"E": 1, "nu": 0.7, "h": 0.1}}}"#,
        ),
        (
            "verb_mismatch.json",
            r#"{"verb": "spectrum", "model": {"family": "drill_free", "params": {"E": 1, "nu": 0.3, "h": 0.1}}}"#,
        ),
    ];
    for (name, text) in cases {
        let cfg = tmp.path().join(name);
        std::fs::write(&cfg, text).unwrap();
        let out = tmp.path().join(format!("{name}.out"));
        let o = shellkit(
            &[
                "check-invariance",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ],
            None,
        );
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(!out.exists(), "{name} wrote outputs");
    }
    let cfg = tmp.path().join("ok.json");
    std::fs::write(
        &cfg,
        r#"{"model": {"family": "drill_free", "params": {"E": 1, "nu": 0.3, "h": 0.1}}}"#,
    )
    .unwrap();
    let out = tmp.path().join("threads.out");
    let o = shellkit(
        &[
            "spectrum",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        Some("zero"),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let o = shellkit(
        &["spectrum", "--config", cfg.to_str().unwrap(), "--tol-scale", "0"],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn drill_free_invariance_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, report) = run_example("check-invariance", "check-invariance.json", tmp.path());
    assert_eq!(code, 0);
    assert_eq!(report["schema"], "shellkit-report/1");
    let c = check(&report, "psi_deviatoric_invariance_analytic");
    assert!(c["passed"].as_bool().unwrap());
    assert!(c["measured"].as_f64().unwrap() <= 1e-10);
    assert!(tmp.path().join("invariance.csv").exists());
}

#[test]
fn drilling_stiffness_is_detected() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, report) = run_example("check-invariance", "negative-control.json", tmp.path());
    assert_eq!(code, 0);
    assert!(
        check(&report, "general_drilling_detected")["measured"]
            .as_f64()
            .unwrap()
            >= 0.95
    );
}

#[test]
fn quadratic_drill_free_spectrum_has_four_zeros() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, report) = run_example("spectrum", "spectrum.json", tmp.path());
    assert_eq!(code, 0);
    assert_eq!(check(&report, "zero_eigenvalues")["measured"].as_f64(), Some(4.0));
    let csv = std::fs::read_to_string(tmp.path().join("eigenvalues.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("index,eigenvalue,v0"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn integrals_report_the_drift_ratio_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, report) = run_example("check-integrals", "check-integrals.json", tmp.path());
    assert_eq!(code, 1);
    assert!(check(&report, "first_integral_drift")["passed"].as_bool().unwrap());
    assert!(check(&report, "return_error")["passed"].as_bool().unwrap());
    let ratio = check(&report, "drift_ratio");
    assert!(!ratio["passed"].as_bool().unwrap());
    assert!((ratio["measured"].as_f64().unwrap() - 32.0).abs() < 1.0);
}

#[test]
fn remaining_examples_pass() {
    for (verb, config) in [
        ("geometry", "geometry.json"),
        ("measures", "measures.json"),
        ("energy", "energy.json"),
        ("linearize", "linearize.json"),
        ("minimize", "minimize.json"),
    ] {
        let tmp = tempfile::tempdir().unwrap();
        let (code, report) = run_example(verb, config, tmp.path());
        assert_eq!(code, 0, "{verb}: {report}");
        assert!(report["passed"].as_bool().unwrap());
        for artifact in report["artifacts"].as_array().unwrap() {
            let path = tmp.path().join(artifact.as_str().unwrap());
            let text = std::fs::read_to_string(&path).unwrap();
            assert!(!text.is_empty(), "{}", path.display());
        }
    }
}

#[test]
fn seed_and_tol_scale_are_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let o = shellkit(
        &[
            "spectrum",
            "--config",
            example("spectrum.json").to_str().unwrap(),
            "--out",
            tmp.path().to_str().unwrap(),
            "--seed",
            "77",
            "--tol-scale",
            "2",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 77);
    assert_eq!(report["tol_scale"], 2.0);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")));
}
