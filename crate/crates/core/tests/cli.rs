use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn hybridsim(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hybridsim"));
    cmd.args(args).env_remove("HYBRIDSIM_OUT");
    if let Some(dir) = env_out {
        cmd.env("HYBRIDSIM_OUT", dir);
    }
    cmd.output().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn balance_defaults_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = hybridsim(&["balance", "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "balance.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("label,V_i,V_ib,residual_rad_s,residual_hz"));
    assert!(lines.next().unwrap().ends_with(",0e0,0e0"));
    let manifest: serde_json::Value = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert_eq!(manifest["all_pass"], true);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = hybridsim(&["switch", "--format", "csv"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("switch.csv").exists());
    assert!(!dir.path().join("switch.json").exists());
}

#[test]
fn half_flux_zeroes_kappa_column() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = hybridsim(&["switch", "--set", "flux_ratio=0.5", "--out", d, "--format", "csv"], None);
    assert_eq!(out.status.code(), Some(0));
    let csv = read(dir.path(), "switch.csv");
    let col = csv.lines().next().unwrap().split(',').position(|c| c == "kappa").unwrap();
    for row in csv.lines().skip(1) {
        assert_eq!(row.split(',').nth(col), Some("0e0"));
    }
}

#[test]
fn config_file_overrides_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.cfg");
    std::fs::write(&good, "# larger coupling capacitor\nC_m = 2e-16 F\n").unwrap();
    let d = dir.path().join("out");
    let out = hybridsim(&["balance", "--config", good.to_str().unwrap(), "--out", d.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));

    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "C_r = 3 fF\nC_mm = 1 fF\n").unwrap();
    let out = hybridsim(&["balance", "--config", bad.to_str().unwrap(), "--out", d.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let unit = dir.path().join("unit.cfg");
    std::fs::write(&unit, "C_m = 2 nH\n").unwrap();
    let out = hybridsim(&["balance", "--config", unit.to_str().unwrap(), "--out", d.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for args in [
        vec!["teleport", "--out", d],
        vec!["balance", "--format", "xml", "--out", d],
        vec!["balance", "--set", "C_m=-1 F", "--out", d],
        vec!["balance", "--workers", "0", "--out", d],
        vec!["noise_echo", "--out", d],
        vec!["balance", "--seeds", "x", "--out", d],
    ] {
        assert_eq!(hybridsim(&args, None).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn tolerance_failure_exits_1() {
    // A large imbalance voltage pushes the residual far outside the factor-2 window.
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = hybridsim(&["balance", "--set", "balance_dV=1 V", "--out", d], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn two_seed_smoke_run_is_fast() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let start = Instant::now();
    let out = hybridsim(&["noise_echo", "--seeds", "1,2", "--out", d], None);
    let secs = start.elapsed().as_secs_f64();
    assert_eq!(out.status.code(), Some(0));
    assert!(secs < 1.0, "{secs} s");
    assert_eq!(read(dir.path(), "noise_echo.csv").lines().count(), 3);
}

#[test]
fn report_all_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let d = dir.path().join(name);
        let out = hybridsim(&["report_all", "--seeds", "3,1,4", "--workers", workers, "--out", d.to_str().unwrap()], None);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        let mut files: Vec<_> = std::fs::read_dir(&d)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.file_name().unwrap() != "timings.json")
            .map(|p| (p.clone(), std::fs::read(p).unwrap()))
            .map(|(p, b)| (p.file_name().unwrap().to_owned(), b))
            .collect();
        files.sort();
        files
    };
    assert_eq!(run("w1", "1"), run("w8", "8"));
}
