use std::fs;
use std::path::Path;
use std::process::Command;

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cone-spde"))
        .args(args)
        .env("CONE_SPDE_THREADS", "1")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = cli(&["check", "--preset", "heat-positive", "--out", s(dir.path())]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("NO VIOLATION FOUND"));

    let (code, out, _) = cli(&["check", "--preset", "heat-positive-badvol", "--out", s(dir.path())]);
    assert_eq!(code, 2);
    assert!(out.contains("VIOLATED") && out.contains("Volatility"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("check.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "violated");
    assert!(report["config_hash"].is_string());
}

#[test]
fn malformed_config_is_exit_one_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\"preset\": \"heat-positive\",\n \"sim\": {\"dt\": -1}}").unwrap();
    let (code, _, err) = cli(&["check", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(code, 1);
    assert!(err.contains("sim") && err.contains("dt"), "{err}");

    fs::write(&cfg, "{\"space\": {\"dim\": 2},\n \"oops\": }").unwrap();
    let (code, _, err) = cli(&["simulate", "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");

    let (code, _, _) = cli(&["check", "--out", s(dir.path())]);
    assert_eq!(code, 1);
    let (code, _, _) = cli(&["frobnicate", "--out", s(dir.path())]);
    assert_eq!(code, 1);
}

#[test]
fn single_path_writes_trajectory_reproducibly() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let (code, _, err) = cli(&[
            "simulate", "--preset", "heat-positive", "--paths", "1", "--seed", "17", "--dt", "0.01", "--out", s(d.path()),
        ]);
        assert_eq!(code, 0, "{err}");
    }
    let ta = fs::read(a.path().join("trajectory.csv")).unwrap();
    assert_eq!(ta, fs::read(b.path().join("trajectory.csv")).unwrap());
    let text = String::from_utf8(ta).unwrap();
    assert_eq!(text.lines().count(), 102);
    assert!(text.starts_with("t,r_0,r_1"));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.path().join("manifest.json")).unwrap()).unwrap();
    let files: Vec<&str> = manifest["outputs"].as_array().unwrap().iter().map(|o| o["file"].as_str().unwrap()).collect();
    assert!(files.contains(&"paths.csv") && files.contains(&"trajectory.csv"));
    assert_eq!(manifest["config"]["noise"]["seed"], 17);
}

#[test]
fn appendix_selector() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = cli(&["appendix", "--preset", "heat-positive", "--suite", "phi", "--out", s(dir.path())]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("dead zone"));
    let (code, _, _) = cli(&["appendix", "--preset", "heat-positive", "--suite", "nope", "--out", s(dir.path())]);
    assert_eq!(code, 1);

    // an affine column with an offset has a Stratonovich correction that
    // leaves the face, so the rho suite reports a counterexample
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"space": {"dim": 2}, "semigroup": {"rates": [1, 2]},
            "coefficients": {"drift": {"family": "zero"},
                             "vol": [{"family": "affine", "matrix": [[1, 0], [0, 1]], "offset": [1, 0]}]},
            "noise": {}, "sim": {"dt": 0.01, "horizon": 1, "paths": 1}}"#,
    )
    .unwrap();
    let (code, out, _) = cli(&["appendix", "--config", s(&cfg), "--suite", "rho", "--out", s(dir.path())]);
    assert_eq!(code, 2, "{out}");
    assert!(out.contains("FAILED rho") && out.contains("face 0"), "{out}");
}

#[test]
fn verify_reports_disagreement_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = cli(&[
        "verify", "--preset", "heat-positive-adversarial", "--paths", "20", "--dt", "0.01", "--out", s(dir.path()),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("NO VIOLATION FOUND") && out.contains("agreement: false"), "{out}");
    let sweep = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(sweep.starts_with("dt,paths,valid,diverged,exits,exit_fraction,stderr,config_hash"));
}

#[test]
fn help_documents_columns() {
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("seed,exited,exit_time,min_margin") && out.contains("CONE_SPDE_THREADS"));
}
