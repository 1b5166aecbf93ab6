//! Check results and their text and JSON renderings.

use std::fmt::Write as _;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Error => "ERROR",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Sample point in chart order, serialized as a JSON object.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(pub Vec<(String, f64)>);

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessOut {
    /// Which residual was nonzero.
    pub entry: String,
    pub point: Point,
    pub value: f64,
    /// The residual evaluated again at `point`.
    pub reevaluated: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_max: Option<f64>,
    pub ms: f64,
    pub detail: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub samples: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub function_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: String,
    pub scenario: String,
    pub seed: u64,
    pub config: RunConfig,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn count(&self, v: Verdict) -> usize {
        self.checks.iter().filter(|c| c.verdict == v).count()
    }

    /// 0 when every check passes, 1 on any FAIL, 2 on any ERROR or
    /// INCONCLUSIVE.
    pub fn exit_code(&self) -> i32 {
        if self.count(Verdict::Error) + self.count(Verdict::Inconclusive) > 0 {
            2
        } else if self.count(Verdict::Fail) > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The JSON report with timing fields removed, for comparing runs.
    pub fn to_json_without_timing(&self) -> String {
        let mut copy = self.clone();
        for c in &mut copy.checks {
            c.ms = 0.0;
        }
        copy.to_json()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "scenario {} (seed {}, {} samples, tol {:e}/{:e})",
            self.scenario, self.seed, self.config.samples, self.config.abs_tol, self.config.rel_tol
        );
        for c in &self.checks {
            let _ = writeln!(out, "{:<12} {}  [{:.1} ms]", c.verdict.label(), c.name, c.ms);
            for line in &c.detail {
                let _ = writeln!(out, "{:<12}   {line}", "");
            }
            if let Some(w) = &c.witness {
                let point: Vec<String> = w.point.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(out, "{:<12}   witness for {}: ({}) value {:e}", "", w.entry, point.join(", "), w.value);
            }
        }
        let _ = writeln!(
            out,
            "summary: {} passed, {} failed, {} errors, {} inconclusive",
            self.count(Verdict::Pass),
            self.count(Verdict::Fail),
            self.count(Verdict::Error),
            self.count(Verdict::Inconclusive)
        );
        out
    }
}
