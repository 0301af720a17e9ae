//! Black-box tests of the `g2q` binary contract: printed values, exit codes,
//! report schema, cache files.

use std::process::Command;

fn g2q(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_g2q"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn dim_sqv_prints_weyl_dimension() {
    let out = g2q(&["dim", "sqv", "--n", "3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "77");
}

#[test]
fn eval_closed_loop_prints_quantum_dimension() {
    let out = g2q(&["eval", "--diagram", "cup ; cap"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "q^10 + q^8 + q^2 + 1 + q^-2 + q^-8 + q^-10"
    );
}

#[test]
fn usage_error_exits_2() {
    let out = g2q(&["verify", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_diagram_exits_2() {
    let out = g2q(&["eval", "--diagram", "cup ; nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn verify_rep_writes_report() {
    let dir = std::env::temp_dir().join("g2q-cli-test-report");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rep.json");
    let out = g2q(&["verify", "rep", "--report", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["suite"], "rep");
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    assert_eq!(v["environment"]["max_degree"], 4);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn jobs_flag_does_not_change_output() {
    let a = g2q(&["verify", "classical", "--max-degree", "2"]);
    let b = g2q(&["verify", "classical", "--max-degree", "2", "--jobs", "2"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn cache_build_and_clear() {
    let dir = std::env::temp_dir().join("g2q-cli-test-cache");
    let dirs = dir.to_str().unwrap();
    let out = g2q(&["cache", "build", "--max-degree", "2", "--cache-dir", dirs]);
    assert!(out.status.success());
    assert!(dir.join("kernel-n2.txt").exists());
    let out = g2q(&["cache", "clear", "--max-degree", "2", "--cache-dir", dirs]);
    assert!(out.status.success());
    assert!(!dir.join("kernel-n2.txt").exists());
}

#[test]
fn invariant_command_reports_invariance() {
    let out = g2q(&["invariant", "psi", "--indices", "1,2,3"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("invariant: yes"));
}
