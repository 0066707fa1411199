use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bbsolve")).current_dir(env!("CARGO_MANIFEST_DIR")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn golden(name: &str) -> String {
    Path::new("tests/golden").join(format!("{name}.json")).display().to_string()
}

#[test]
fn missing_problem_is_an_error_with_json() {
    let (code, stdout, stderr) = run(&["solve", "problems/none.txt", "--json"]);
    assert_eq!(code, 1);
    assert!(stderr.starts_with("error:"));
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["error"]["kind"], "problem");
}

#[test]
fn malformed_problem_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    std::fs::write(&p, "params: a\node: u1 - u0^2/u1\n").unwrap();
    let (code, _, stderr) = run(&["analyze", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("bad.txt:2:"), "{stderr}");
}

#[test]
fn human_text_goes_to_stderr_only() {
    let (code, stdout, stderr) = run(&["solve", "problems/riccati.txt"]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    assert!(stderr.contains("status: verified"));
}

#[test]
fn stored_reports_verify() {
    for (name, problem) in [("solve_kdv", "kdv"), ("solve_ks", "ks"), ("solve_rational", "rational"), ("solve_mkdv", "mkdv")] {
        let (code, _, stderr) = run(&["verify", &golden(name), "--problem", &format!("problems/{problem}.txt")]);
        assert_eq!(code, 0, "{name}: {stderr}");
        assert!(stderr.contains("pass"));
    }
}

#[test]
fn edited_coefficient_fails_with_first_nonzero_remainder() {
    let text = std::fs::read_to_string(golden("solve_kdv")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let wp = &mut v["branches"][0]["closed_forms"][0]["form"]["wp"][1];
    assert_eq!(wp, "2*a");
    *wp = "3*a".into();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("tampered.json");
    std::fs::write(&p, serde_json::to_string(&v).unwrap()).unwrap();
    let (code, stdout, _) = run(&["verify", p.to_str().unwrap(), "--json"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["passed"], false);
    let failures = v["failures"].as_array().unwrap();
    assert!(failures.iter().any(|f| f.as_str().unwrap().contains("first nonzero remainder")), "{failures:?}");
}

#[test]
fn empty_report_passes_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    for body in ["", "{}"] {
        let p = dir.path().join("empty.json");
        std::fs::write(&p, body).unwrap();
        let (code, _, stderr) = run(&["verify", p.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert!(stderr.contains("warning"));
    }
}

#[test]
fn report_for_other_problem_is_rejected() {
    let (code, _, stderr) = run(&["verify", &golden("solve_ks"), "--problem", "problems/kdv.txt"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("different problem"));
}

#[test]
fn unknown_schema_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("v2.json");
    std::fs::write(&p, "{\"schema\": 2, \"branches\": []}").unwrap();
    let (code, _, _) = run(&["verify", p.to_str().unwrap()]);
    assert_eq!(code, 1);
}
