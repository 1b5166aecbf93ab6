use dirac_check::{builtins, run_source, Overrides, Prepared, Scenario, ScenarioError, Verdict};

fn minimal(checks: &str) -> String {
    format!(
        r#"{{
  "version": 1,
  "name": "minimal",
  "chart": {{ "coordinates": ["q", "p"] }},
  "definitions": [{{ "name": "omega", "form": "dp^dq" }}],
  "structures": {{ "omega": {{ "type": "graph", "h": "omega" }} }},
  "checks": {checks}
}}"#
    )
}

fn run_text(text: &str) -> dirac_check::Report {
    let p = Prepared::new(Scenario::from_json(text).unwrap(), &Overrides::default()).unwrap();
    dirac_check::run(&p)
}

#[test]
fn every_builtin_passes() {
    for name in builtins::NAMES {
        let report = run_source(name, &Overrides::default()).unwrap();
        assert!(!report.checks.is_empty(), "{name}");
        for c in &report.checks {
            assert_eq!(c.verdict, Verdict::Pass, "{name}: {} {:?}", c.name, c.detail);
        }
        assert_eq!(report.exit_code(), 0);
    }
}

#[test]
fn builtin_names_resolve() {
    for name in builtins::NAMES {
        assert!(builtins::get(name).is_some());
    }
    assert!(builtins::get("missing").is_none());
    assert!(matches!(Scenario::load("missing"), Err(ScenarioError::UnknownBuiltin(_))));
}

#[test]
fn reports_are_deterministic() {
    for name in builtins::NAMES {
        let a = run_source(name, &Overrides::default()).unwrap().to_json_without_timing();
        let b = run_source(name, &Overrides::default()).unwrap().to_json_without_timing();
        assert_eq!(a, b, "{name}");
    }
    let seeded = Overrides { seed: Some(99), ..Overrides::default() };
    let a = run_source("conformal-symplectic", &seeded).unwrap();
    assert_eq!(a.seed, 99);
    assert_eq!(a.to_json_without_timing(), run_source("conformal-symplectic", &seeded).unwrap().to_json_without_timing());
}

#[test]
fn empty_check_list_is_an_empty_pass() {
    let report = run_text(&minimal("[]"));
    assert!(report.checks.is_empty());
    assert_eq!(report.exit_code(), 0);
    assert!(report.to_text().contains("0 passed, 0 failed"));
}

#[test]
fn failures_carry_reproducible_witnesses() {
    let report = run_text(&minimal(
        r#"[
    { "op": "poisson-bracket", "structure": "omega", "f": "q^2", "g": "p", "expect": "q" },
    { "op": "zero", "expr": "q*p - p*q" }
  ]"#,
    ));
    let (bad, good) = (&report.checks[0], &report.checks[1]);
    assert_eq!(bad.verdict, Verdict::Fail);
    assert_eq!(good.verdict, Verdict::Pass);
    let w = bad.witness.as_ref().unwrap();
    // {q^2, p} - q = 2q - q = q at the witness point.
    let q = w.point.0[0].1;
    assert!((w.value - q).abs() < 1e-12);
    assert_eq!(w.value, w.reevaluated);
    assert_eq!(report.exit_code(), 1);
}

#[test]
fn infrastructure_problems_are_errors() {
    let report = run_text(&minimal(
        r#"[
    { "op": "poisson-bracket", "structure": "nowhere", "f": "q", "g": "p" },
    { "op": "h-admissible", "structure": "omega", "f": "undefined_name" },
    { "op": "integrable", "structure": "omega", "expect": true }
  ]"#,
    ));
    assert_eq!(report.checks[0].verdict, Verdict::Error);
    assert_eq!(report.checks[1].verdict, Verdict::Error);
    assert!(report.checks[1].detail[0].contains("undefined_name"));
    assert_eq!(report.checks[2].verdict, Verdict::Pass);
    assert_eq!(report.exit_code(), 2);
}

#[test]
fn invalid_scenarios_are_rejected() {
    let err = Scenario::from_json(r#"{ "version": 1, "name": "x", "chart": { "coordinates": ["q"] }, "extra": 1 }"#).unwrap_err();
    assert!(matches!(err, ScenarioError::Json(_)));
    let err = Scenario::from_json(r#"{ "version": 2, "name": "x", "chart": { "coordinates": ["q"] } }"#).unwrap_err();
    assert!(matches!(err, ScenarioError::Version { found: 2 }));

    let prepare = |text: &str| Prepared::new(Scenario::from_json(text).unwrap(), &Overrides::default()).err();
    let bad_expr = r#"{ "version": 1, "name": "x", "chart": { "coordinates": ["q"] },
        "definitions": [{ "name": "f", "expr": "q +* 1" }] }"#;
    let msg = prepare(bad_expr).unwrap().to_string();
    assert!(msg.contains("definition f") && msg.contains("line 1, column"), "{msg}");

    let shadow = r#"{ "version": 1, "name": "x", "chart": { "coordinates": ["q"] },
        "definitions": [{ "name": "q", "expr": "1" }] }"#;
    assert!(matches!(prepare(shadow), Some(ScenarioError::Invalid(_))));

    let open_twist = r#"{ "version": 1, "name": "x", "chart": { "coordinates": ["a", "b", "c", "e"] },
        "structures": { "g": { "type": "graph", "h": "da^db", "H": "e*da^db^dc" } } }"#;
    assert!(matches!(prepare(open_twist), Some(ScenarioError::Geometry { .. })));

    let heisenberg = r#"{ "version": 1, "name": "x", "chart": { "coordinates": ["q"] },
        "structures": { "h": { "type": "lie-algebra", "dim": 3, "brackets": [[1, 2, 0, 0, 1]] } } }"#;
    assert!(matches!(prepare(heisenberg), Some(ScenarioError::Lie { .. })));
}

#[test]
fn raw_sections_are_checked() {
    let text = r#"{
  "version": 1,
  "name": "pairs",
  "chart": { "coordinates": ["x0", "x1", "x2"] },
  "structures": {
    "level2": {
      "type": "raw-sections",
      "level": 2,
      "H": "dx0^dx1^dx2",
      "sections": {
        "a": { "vector_field": { "x0": "-x1" }, "form": "1/2*x1^2*dx2" },
        "b": { "vector_field": { "x0": "2*x2" }, "form": "x2^2*dx1" },
        "c": { "vector_field": { "x0": "1" }, "form": "0" }
      }
    }
  },
  "checks": [
    { "op": "admissible-pair", "structure": "level2", "section": "a" },
    { "op": "admissible-pair", "structure": "level2", "section": "b" },
    { "op": "admissible-pair", "structure": "level2", "section": "c", "expect": false },
    { "op": "image-under-d", "structure": "level2", "sections": ["a", "b"] }
  ]
}"#;
    let report = run_text(text);
    for c in &report.checks {
        assert_eq!(c.verdict, Verdict::Pass, "{} {:?}", c.name, c.detail);
    }
}

#[test]
fn sign_override_negates_brackets() {
    let checks = r#"[{ "op": "poisson-bracket", "structure": "omega", "f": "q", "g": "p", "expect": "1" }]"#;
    assert_eq!(run_text(&minimal(checks)).checks[0].verdict, Verdict::Pass);
    let p = Prepared::new(
        Scenario::from_json(&minimal(checks)).unwrap(),
        &Overrides { sign: Some("-".parse().unwrap()), ..Overrides::default() },
    )
    .unwrap();
    assert_eq!(dirac_check::run(&p).checks[0].verdict, Verdict::Fail);
}
