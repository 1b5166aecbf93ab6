use std::process::{Command, Output};

fn dirac_check(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-check")).args(args).env_remove("DIRAC_CHECK_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bracket_examples() {
    let o = dirac_check(&["bracket", "angular-momentum", "L1", "L2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "{L1, L2} = L3 ≡ q1*p2 - q2*p1");
    assert!(out.contains("X_L1 = {q2: q3, q3: -q2, p2: p3, p3: -p2}"));
    assert!(out.contains("X_L2 = "));

    let out = stdout(&dirac_check(&["bracket", "angular-momentum", "q1", "q2"]));
    assert_eq!(out.lines().next().unwrap(), "{q1, q2} = 0");
    assert!(out.contains("X_q1 = {p1: 1}"));

    let out = stdout(&dirac_check(&["bracket", "darboux", "f", "f"]));
    assert_eq!(out.lines().next().unwrap(), "{f, f} = 0");

    let out = stdout(&dirac_check(&["--sign-convention", "-", "bracket", "angular-momentum", "L1", "L2"]));
    assert_eq!(out.lines().next().unwrap(), "{L1, L2} = -q1*p2 + q2*p1");
}

#[test]
fn admissible_examples() {
    let o = dirac_check(&["admissible", "darboux", "q1^3*p2 + p3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("H-admissible: yes"));

    let o = dirac_check(&["admissible", "conformal-symplectic", "5", "--structure", "hamiltonian"]);
    assert_eq!(o.status.code(), Some(0));

    let o = dirac_check(&["admissible", "conformal-symplectic", "L1", "--structure", "hamiltonian"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("Courant-admissible: yes"));
    assert!(out.contains("H-admissible: no"));
    assert!(out.contains("witness: (q1="));
}

#[test]
fn check_and_report_commands() {
    let o = dirac_check(&["check", "so3-cartan"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("(1, 2, 3): -1/2"));
    assert!(out.contains("quoted value 1"));

    let o = dirac_check(&["report", "angular-momentum", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["scenario"], "angular-momentum");
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["verdict"] == "PASS" && c["ms"].is_number()));

    let path = std::env::temp_dir().join(format!("dirac-check-report-{}.txt", std::process::id()));
    let o = dirac_check(&["report", "abelian-cartan", "--format", "text", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let _ = std::fs::remove_file(&path);
    assert!(text.contains("kernel dimension 3 of 3"));
}

#[test]
fn seed_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_dirac-check"))
        .args(["report", "so3-cartan"])
        .env("DIRAC_CHECK_SEED", "42")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["seed"], 42);
}

#[test]
fn errors_exit_with_two() {
    let o = dirac_check(&["check", "no-such-builtin"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown builtin"));

    let path = std::env::temp_dir().join(format!("dirac-check-bad-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"version": 1, "name": "bad", "chart": {"coordinates": ["q"]}, "definitions": [{"name": "f", "expr": "(q"}]}"#).unwrap();
    let o = dirac_check(&["check", path.to_str().unwrap()]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("definition f") && err.contains("column"), "{err}");

    let o = dirac_check(&["bracket", "darboux", "f", "zz"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn builtins_are_listed() {
    let out = stdout(&dirac_check(&["builtins"]));
    assert_eq!(out.lines().count(), 5);
    assert!(out.contains("conformal-symplectic"));
}
