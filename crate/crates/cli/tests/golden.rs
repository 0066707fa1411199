//! Golden JSON reports. Regenerate with `UPDATE_GOLDEN=1 cargo test -p bbsolve --test golden`.

use std::path::{Path, PathBuf};
use std::process::Command;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).to_path_buf()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bbsolve")).current_dir(root()).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn golden(name: &str, args: &[&str], code: i32) {
    let (got_code, stdout, stderr) = run(args);
    assert_eq!(got_code, code, "{name}: exit code\n{stderr}");
    let path = root().join("tests/golden").join(format!("{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &stdout).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(stdout == want, "{name}: output differs from {}", path.display());
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["schema"], 1);
}

#[test]
fn analyze_kdv() {
    golden("analyze_kdv", &["analyze", "problems/kdv.txt", "--json"], 0);
}

#[test]
fn analyze_ks() {
    golden("analyze_ks", &["analyze", "problems/ks.txt", "--json"], 0);
}

#[test]
fn analyze_riccati() {
    golden("analyze_riccati", &["analyze", "problems/riccati.txt", "--json"], 0);
}

#[test]
fn solve_kdv() {
    golden("solve_kdv", &["solve", "problems/kdv.txt", "--json"], 0);
}

#[test]
fn solve_ks() {
    golden("solve_ks", &["solve", "problems/ks.txt", "--json"], 0);
}

#[test]
fn solve_rational() {
    golden("solve_rational", &["solve", "problems/rational.txt", "--json"], 0);
}

#[test]
fn solve_riccati() {
    golden("solve_riccati", &["solve", "problems/riccati.txt", "--json"], 0);
}

#[test]
fn solve_mkdv_has_no_closed_form() {
    golden("solve_mkdv", &["solve", "problems/mkdv.txt", "--json"], 2);
}

#[test]
fn solve_is_deterministic() {
    let a = run(&["solve", "problems/kdv.txt", "--json", "--seed", "11"]);
    let b = run(&["solve", "problems/kdv.txt", "--json", "--seed", "11"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
}
