//! Scenario files: JSON with DSL strings for expressions and forms.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num::BigRational;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;
use twisted_dirac::courant::GenSection;
use twisted_dirac::dirac::{SignConvention, TwistedGraph};
use twisted_dirac::exterior::{parse_form_with, KForm, Namespace, VectorField};
use twisted_dirac::liealg::LieAlgebraData;
use twisted_dirac::symexpr::{is_identifier, parse_expr_with, Chart, Expr, Interval, Oracle, OracleConfig};
use twisted_dirac::{ChartError, GeometryError, LieError, ParseError};

use crate::builtins;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {found} (expected {SCHEMA_VERSION})")]
    Version { found: u32 },
    #[error("unknown builtin {0:?}")]
    UnknownBuiltin(String),
    #[error("chart: {0}")]
    Chart(#[from] ChartError),
    #[error("in {context}: {source}")]
    Parse { context: String, source: ParseError },
    #[error("in {context}: {source}")]
    Geometry { context: String, source: GeometryError },
    #[error("in {context}: {source}")]
    Lie { context: String, source: LieError },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub chart: ChartSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub definitions: Vec<Definition>,
    #[serde(default)]
    pub structures: BTreeMap<String, StructureSpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    #[serde(default = "default_chart_name")]
    pub name: String,
    pub coordinates: Vec<String>,
}

fn default_chart_name() -> String {
    "M".into()
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub function_degree: Option<usize>,
    #[serde(rename = "box")]
    pub sample_box: Option<BoxSpec>,
}

/// Interval bounds are rationals written as strings, e.g. `["1/4", "2"]`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub default: Option<[String; 2]>,
    #[serde(default)]
    pub coordinates: BTreeMap<String, [String; 2]>,
}

/// A named expression or form; later definitions may use earlier ones.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Definition {
    pub name: String,
    pub expr: Option<String>,
    pub form: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StructureSpec {
    Graph {
        h: String,
        #[serde(rename = "H", default = "exact_twist")]
        twist: String,
        #[serde(default)]
        sign: Option<String>,
    },
    LieAlgebra {
        builtin: Option<String>,
        dim: Option<usize>,
        /// Rows `[i, j, c_1, ..., c_d]` with 1-based `i`, `j`.
        #[serde(default)]
        brackets: Vec<Vec<Value>>,
        metric: Option<Vec<Vec<Value>>>,
    },
    RawSections {
        #[serde(default = "default_level")]
        level: usize,
        #[serde(rename = "H")]
        twist: Option<String>,
        sections: BTreeMap<String, SectionSpec>,
    },
}

fn exact_twist() -> String {
    "dh".into()
}

fn default_level() -> usize {
    2
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    #[serde(default)]
    pub vector_field: BTreeMap<String, String>,
    #[serde(default = "zero_text")]
    pub form: String,
}

fn zero_text() -> String {
    "0".into()
}

#[derive(Clone, Debug, Deserialize)]
pub struct CheckSpec {
    pub name: Option<String>,
    #[serde(flatten)]
    pub op: Op,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Op {
    PoissonBracket { structure: String, f: String, g: String, expect: Option<String> },
    Hamiltonian { structure: String, f: String, expect: Option<BTreeMap<String, String>> },
    CourantAdmissible { structure: String, f: String, expect: Option<bool> },
    /// Without `expect` the verdict is reported, and the check passes when
    /// it is definite.
    HAdmissible { structure: String, f: String, expect: Option<bool> },
    PoissonAlgebra { structure: String, f: String, g: String, k: String },
    JacobiDefect { structure: String, f: String, g: String, k: String },
    GraphIdentity { structure: String, f: String, expect_admissible: Option<bool> },
    PoissonBracketAdmissible { structure: String, f: String, g: String },
    Integrable { structure: String, expect: bool },
    Nondegenerate { structure: String, expect: bool },
    Zero { expr: Option<String>, form: Option<String> },
    AdmissiblePair { structure: String, section: String, expect: Option<bool> },
    ImageUnderD { structure: String, sections: Vec<String> },
    CartanAlternating { structure: String },
    ContractionKernel { structure: String, expect_dim: Option<usize> },
    Contraction {
        structure: String,
        l: usize,
        m: usize,
        n: usize,
        expect: Option<String>,
        nonzero: Option<bool>,
        quoted_value: Option<String>,
    },
    ContractionTable { structure: String },
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        let s: Scenario = serde_json::from_str(text)?;
        if s.version != SCHEMA_VERSION {
            return Err(ScenarioError::Version { found: s.version });
        }
        Ok(s)
    }

    /// Loads a builtin by name, or else a file path.
    pub fn load(source: &str) -> Result<Scenario, ScenarioError> {
        if let Some(text) = builtins::get(source) {
            return Scenario::from_json(text);
        }
        let path = Path::new(source);
        if !path.exists() && !source.ends_with(".json") {
            return Err(ScenarioError::UnknownBuiltin(source.into()));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|source_err| ScenarioError::Io { path: source.into(), source: source_err })?;
        Scenario::from_json(&text)
    }
}

/// Command-line overrides applied on top of the scenario.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub sign: Option<SignConvention>,
}

pub enum Structure {
    Graph(Box<TwistedGraph>),
    Lie(LieAlgebraData),
    Sections { level: usize, twist: KForm, sections: BTreeMap<String, GenSection> },
}

impl Structure {
    pub fn kind(&self) -> &'static str {
        match self {
            Structure::Graph(_) => "graph",
            Structure::Lie(_) => "lie-algebra",
            Structure::Sections { .. } => "raw-sections",
        }
    }
}

/// A validated scenario with every definition and structure built.
pub struct Prepared {
    pub scenario: Scenario,
    pub chart: Arc<Chart>,
    pub oracle: Oracle,
    pub namespace: Namespace,
    pub structures: BTreeMap<String, Structure>,
}

pub fn rational(text: &str) -> Result<BigRational, ScenarioError> {
    let t = text.trim();
    if let Ok(q) = BigRational::from_str(t) {
        return Ok(q);
    }
    t.parse::<f64>()
        .ok()
        .and_then(twisted_dirac::symexpr::rational_from_f64)
        .ok_or_else(|| ScenarioError::Invalid(format!("not a rational number: {text:?}")))
}

fn rational_value(v: &Value) -> Result<BigRational, ScenarioError> {
    match v {
        Value::String(s) => rational(s),
        Value::Number(n) => rational(&n.to_string()),
        other => Err(ScenarioError::Invalid(format!("expected a number, found {other}"))),
    }
}

fn interval(bounds: &[String; 2]) -> Result<Interval, ScenarioError> {
    let (lo, hi) = (rational(&bounds[0])?, rational(&bounds[1])?);
    if lo >= hi {
        return Err(ScenarioError::Invalid(format!("empty interval [{}, {}]", bounds[0], bounds[1])));
    }
    Ok(Interval::new(lo, hi))
}

fn oracle_config(spec: &OracleSpec, chart: &Chart, o: &Overrides) -> Result<OracleConfig, ScenarioError> {
    let mut cfg = OracleConfig::default();
    if let Some(seed) = o.seed.or(spec.seed) {
        cfg.seed = seed;
    }
    if let Some(n) = o.samples.or(spec.samples) {
        if n == 0 {
            return Err(ScenarioError::Invalid("sample count must be positive".into()));
        }
        cfg.sample_count = n;
    }
    if let Some(t) = spec.abs_tol {
        cfg.abs_tol = t;
    }
    if let Some(t) = spec.rel_tol {
        cfg.rel_tol = t;
    }
    if let Some(t) = o.tol {
        cfg.abs_tol = t;
        cfg.rel_tol = t;
    }
    if let Some(d) = spec.function_degree {
        cfg.function_degree = d;
    }
    if let Some(b) = &spec.sample_box {
        if let Some(d) = &b.default {
            cfg.default_interval = interval(d)?;
        }
        for (name, bounds) in &b.coordinates {
            cfg.overrides.insert(chart.coordinate(name)?, interval(bounds)?);
        }
    }
    Ok(cfg)
}

fn parse_err(context: impl Into<String>) -> impl FnOnce(ParseError) -> ScenarioError {
    let context = context.into();
    move |source| ScenarioError::Parse { context, source }
}

fn geo_err(context: impl Into<String>) -> impl FnOnce(GeometryError) -> ScenarioError {
    let context = context.into();
    move |source| ScenarioError::Geometry { context, source }
}

/// Parses a form literal, accepting a literal zero for any degree.
pub fn form_of_degree(text: &str, ns: &Namespace, chart: &Arc<Chart>, degree: usize, context: &str) -> Result<KForm, ScenarioError> {
    let f = parse_form_with(text, chart, ns).map_err(parse_err(context))?;
    if f.degree() == degree {
        return Ok(f);
    }
    if f.is_exactly_zero() {
        return Ok(KForm::zero(chart, degree));
    }
    Err(ScenarioError::Geometry {
        context: context.into(),
        source: GeometryError::Degree { expected: degree, found: f.degree() },
    })
}

pub fn expr_in(text: &str, ns: &Namespace, chart: &Chart, context: &str) -> Result<Expr, ScenarioError> {
    parse_expr_with(text, chart, &ns.scalars).map_err(parse_err(context))
}

pub fn vector_field(spec: &BTreeMap<String, String>, ns: &Namespace, chart: &Arc<Chart>, context: &str) -> Result<VectorField, ScenarioError> {
    let mut entries = Vec::new();
    for (coord, text) in spec {
        entries.push((coord.as_str(), expr_in(text, ns, chart, context)?));
    }
    VectorField::from_named(chart, entries).map_err(geo_err(context))
}

fn lie_algebra(
    name: &str,
    builtin: &Option<String>,
    dim: Option<usize>,
    brackets: &[Vec<Value>],
    metric: &Option<Vec<Vec<Value>>>,
) -> Result<LieAlgebraData, ScenarioError> {
    let lie = |source| ScenarioError::Lie { context: format!("structure {name}"), source };
    if let Some(b) = builtin {
        if b == "so3" {
            return Ok(LieAlgebraData::so3());
        }
        let d = b
            .strip_prefix("abelian(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|d| d.trim().parse::<usize>().ok())
            .ok_or_else(|| ScenarioError::Invalid(format!("structure {name}: unknown Lie algebra builtin {b:?}")))?;
        return LieAlgebraData::abelian(d).map_err(lie);
    }
    let d = dim.ok_or_else(|| ScenarioError::Invalid(format!("structure {name}: needs \"builtin\" or \"dim\"")))?;
    let mut rows = Vec::new();
    for row in brackets {
        if row.len() != d + 2 {
            return Err(ScenarioError::Invalid(format!(
                "structure {name}: bracket rows need 2 + {d} entries, found {}",
                row.len()
            )));
        }
        let index = |v: &Value| {
            v.as_u64()
                .filter(|&i| i >= 1)
                .map(|i| i as usize - 1)
                .ok_or_else(|| ScenarioError::Invalid(format!("structure {name}: bracket indices are 1-based integers")))
        };
        let coeffs = row[2..].iter().map(rational_value).collect::<Result<Vec<_>, _>>()?;
        rows.push((index(&row[0])?, index(&row[1])?, coeffs));
    }
    let g = match metric {
        Some(m) => m
            .iter()
            .map(|r| r.iter().map(rational_value).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?,
        None => (0..d)
            .map(|i| (0..d).map(|j| BigRational::from_integer(((i == j) as i64).into())).collect())
            .collect(),
    };
    LieAlgebraData::from_brackets(d, &rows, g).map_err(lie)
}

impl Prepared {
    pub fn new(scenario: Scenario, o: &Overrides) -> Result<Prepared, ScenarioError> {
        let chart = Chart::new(scenario.chart.name.clone(), scenario.chart.coordinates.iter().cloned())?;
        let oracle = Oracle::new(chart.clone(), oracle_config(&scenario.oracle, &chart, o)?);

        let mut ns = Namespace::default();
        for def in &scenario.definitions {
            let context = format!("definition {}", def.name);
            if !is_identifier(&def.name)
                || chart.index_of(&def.name).is_some()
                || ns.scalars.contains_key(&def.name)
                || ns.forms.contains_key(&def.name)
            {
                return Err(ScenarioError::Invalid(format!("{context}: name is invalid or already in use")));
            }
            match (&def.expr, &def.form) {
                (Some(e), None) => {
                    let value = expr_in(e, &ns, &chart, &context)?;
                    ns.scalars.insert(def.name.clone(), value);
                }
                (None, Some(f)) => {
                    let value = parse_form_with(f, &chart, &ns).map_err(parse_err(context))?;
                    ns.forms.insert(def.name.clone(), value);
                }
                _ => return Err(ScenarioError::Invalid(format!("{context}: give exactly one of \"expr\" or \"form\""))),
            }
        }

        let mut structures = BTreeMap::new();
        for (name, spec) in &scenario.structures {
            let context = format!("structure {name}");
            let built = match spec {
                StructureSpec::Graph { h, twist, sign } => {
                    let h = form_of_degree(h, &ns, &chart, 2, &context)?;
                    let sign = match (o.sign, sign) {
                        (Some(s), _) => s,
                        (None, Some(s)) => s.parse().map_err(|_| ScenarioError::Invalid(format!("{context}: bad sign {s:?}")))?,
                        (None, None) => SignConvention::default(),
                    };
                    let twist = if twist.trim() == "dh" { h.d() } else { form_of_degree(twist, &ns, &chart, 3, &context)? };
                    Structure::Graph(Box::new(TwistedGraph::new(h, twist, sign, oracle.clone()).map_err(geo_err(context))?))
                }
                StructureSpec::LieAlgebra { builtin, dim, brackets, metric } => {
                    Structure::Lie(lie_algebra(name, builtin, *dim, brackets, metric)?)
                }
                StructureSpec::RawSections { level, twist, sections } => {
                    if *level == 0 {
                        return Err(ScenarioError::Invalid(format!("{context}: level must be at least 1")));
                    }
                    let twist = match twist {
                        Some(t) => form_of_degree(t, &ns, &chart, level + 1, &context)?,
                        None => KForm::zero(&chart, level + 1),
                    };
                    let mut built = BTreeMap::new();
                    for (sname, s) in sections {
                        let ctx = format!("{context}, section {sname}");
                        let x = vector_field(&s.vector_field, &ns, &chart, &ctx)?;
                        let alpha = form_of_degree(&s.form, &ns, &chart, level - 1, &ctx)?;
                        built.insert(sname.clone(), GenSection::new(*level, x, alpha).map_err(geo_err(ctx))?);
                    }
                    Structure::Sections { level: *level, twist, sections: built }
                }
            };
            structures.insert(name.clone(), built);
        }
        Ok(Prepared { scenario, chart, oracle, namespace: ns, structures })
    }

    pub fn expr(&self, text: &str, context: &str) -> Result<Expr, ScenarioError> {
        expr_in(text, &self.namespace, &self.chart, context)
    }

    pub fn graph(&self, name: &str) -> Result<&TwistedGraph, ScenarioError> {
        match self.structures.get(name) {
            Some(Structure::Graph(g)) => Ok(g),
            Some(other) => Err(ScenarioError::Invalid(format!("structure {name} is a {}, not a graph", other.kind()))),
            None => Err(ScenarioError::Invalid(format!("unknown structure {name:?}"))),
        }
    }

    pub fn lie(&self, name: &str) -> Result<&LieAlgebraData, ScenarioError> {
        match self.structures.get(name) {
            Some(Structure::Lie(l)) => Ok(l),
            Some(other) => Err(ScenarioError::Invalid(format!("structure {name} is a {}, not a lie-algebra", other.kind()))),
            None => Err(ScenarioError::Invalid(format!("unknown structure {name:?}"))),
        }
    }

    pub fn sections(&self, name: &str) -> Result<(&KForm, &BTreeMap<String, GenSection>), ScenarioError> {
        match self.structures.get(name) {
            Some(Structure::Sections { twist, sections, .. }) => Ok((twist, sections)),
            Some(other) => Err(ScenarioError::Invalid(format!("structure {name} is a {}, not raw-sections", other.kind()))),
            None => Err(ScenarioError::Invalid(format!("unknown structure {name:?}"))),
        }
    }

    /// The first graph structure, for commands that take no structure name.
    pub fn default_graph(&self) -> Result<(&str, &TwistedGraph), ScenarioError> {
        self.structures
            .iter()
            .find_map(|(n, s)| match s {
                Structure::Graph(g) => Some((n.as_str(), g.as_ref())),
                _ => None,
            })
            .ok_or_else(|| ScenarioError::Invalid("scenario has no graph structure".into()))
    }
}
