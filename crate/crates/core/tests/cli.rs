use std::path::Path;
use std::process::{Command, Output};

fn sirlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sirlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

const SHORT: [&str; 4] = ["--override", "run.t1=2.0", "--override", "analysis.m_horizons.n0=2.0"];

fn short_run(out: &Path) -> Output {
    let mut args = vec!["run", "gap-1d", "--out", out.to_str().unwrap(), "--seeds", "2"];
    args.extend(SHORT);
    sirlab(&args)
}

#[test]
fn run_writes_hashed_outputs_and_report_reads_them() {
    let dir = tempfile::tempdir().unwrap();
    let out = short_run(dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("predicted gap"), "{stdout}");

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    let hash = manifest["scenario_hash"].as_str().unwrap().to_string();
    assert_eq!(manifest["seeds"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["scenario"]["run"]["t1"], 2.0);

    let mut csv = 0;
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => {
                csv += 1;
                assert_eq!(text.lines().next().unwrap(), format!("# scenario_hash={hash}"));
            }
            Some("json") => {
                let v: serde_json::Value = serde_json::from_str(&text).unwrap();
                assert_eq!(v["scenario_hash"].as_str(), Some(hash.as_str()), "{}", path.display());
            }
            _ => panic!("unexpected file {}", path.display()),
        }
    }
    assert_eq!(csv, 4);

    let report = sirlab(&["report", dir.path().join("manifest.json").to_str().unwrap()]);
    assert!(report.status.success());
    assert!(String::from_utf8_lossy(&report.stdout).contains("\"gap\": 2"));
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(short_run(a.path()).status.success());
    assert!(short_run(b.path()).status.success());
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for name in names {
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert!(x == y, "{name:?} differs");
    }
}

#[test]
fn eig_prints_the_discrete_eigenvalue() {
    let out = sirlab(&["eig", "endemic-1d"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let value = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap();
        line.split('=').nth(1).unwrap().trim().parse().unwrap()
    };
    let h: f64 = 0.01;
    let exact = 2.0 / (h * h) * (1.0 - (std::f64::consts::PI * h).cos());
    assert!((value("lambda1_h") - exact).abs() < 1e-10 * exact);
    assert!((value("lambda0_h") - 0.8 * exact).abs() < 1e-10 * exact);
}

#[test]
fn invalid_configuration_fails_with_the_key() {
    let out = sirlab(&["run", "gap-1d", "--override", "params.d=0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("d must be positive"));

    let out = sirlab(&["run", "gap-1d", "--override", "run.t1=500"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("run.t1"));

    let out = sirlab(&["run", "gap-1d", "--override", "noise.colour=pink"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));
}

#[test]
fn failed_claims_give_exit_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["run", "gap-1d", "--out", dir.path().to_str().unwrap(), "--seeds", "1"];
    args.extend(SHORT);
    args.extend(["--override", "expected_verdict=persistence-predicted"]);
    let out = sirlab(&args);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL verdict"));
}

#[test]
fn report_rejects_mixed_scenarios() {
    let a = tempfile::tempdir().unwrap();
    assert!(short_run(a.path()).status.success());
    let b = tempfile::tempdir().unwrap();
    let mut args = vec!["run", "gap-1d", "--out", b.path().to_str().unwrap(), "--seeds", "1"];
    args.extend(SHORT);
    args.extend(["--override", "name=other"]);
    assert!(sirlab(&args).status.success());
    let out = sirlab(&[
        "report",
        a.path().join("manifest.json").to_str().unwrap(),
        b.path().join("manifest.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("different scenarios"));
}
