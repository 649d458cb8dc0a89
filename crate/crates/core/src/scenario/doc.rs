use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::fieldcore::{ChartDomain, Engine};
use crate::lcsstruct::{build_grw, Fiber, GrwManifold, GrwSpec};
use crate::scenario::registry::{known_ids, lookup, CheckSpec};
use crate::subman::{ImmersionRecord, SubmanifoldKind};

/// Scenario loading failures; all map to exit code 2.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineName {
    #[default]
    Jet,
    Fd,
}

impl From<EngineName> for Engine {
    fn from(e: EngineName) -> Engine {
        match e {
            EngineName::Jet => Engine::Jet,
            EngineName::Fd => Engine::Fd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub manifold: ManifoldDoc,
    #[serde(default)]
    pub structure: StructureDoc,
    #[serde(default)]
    pub submanifolds: Vec<SubmanifoldDoc>,
    /// Registry ids; submanifold checks are written `id@name`.
    pub checks: Vec<String>,
    #[serde(default)]
    pub tolerances: TolerancesDoc,
    #[serde(default)]
    pub engine: EngineName,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Random frame tuples per sample point.
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_seed() -> u64 {
    42
}

fn default_samples() -> usize {
    32
}

fn default_trials() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldDoc {
    pub grw: GrwDoc,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrwDoc {
    pub dim: usize,
    pub warp: String,
    pub t_interval: [f64; 2],
    #[serde(default)]
    pub fiber: FiberDoc,
    #[serde(default)]
    pub fiber_box: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum FiberDoc {
    #[default]
    Flat,
    Sphere,
    /// Row-major fiber metric entries over `x1..x_{n-1}`.
    Explicit(Vec<String>),
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    /// Tolerance for `g(ξ,ξ) = -1` and `∇ξ ∝ I + η⊗ξ`; defaults to the engine tolerance.
    #[serde(default)]
    pub validate_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesDoc {
    #[serde(default)]
    pub jet: Option<f64>,
    #[serde(default)]
    pub fd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmanifoldDoc {
    pub name: String,
    #[serde(default)]
    pub slice: Option<SliceDoc>,
    #[serde(default)]
    pub immersion: Option<ImmersionDoc>,
    /// Expected classification; makes the `classification` check assertable.
    #[serde(default)]
    pub expect: Option<String>,
    /// Soliton constant under test; absent, the chains use their derived value.
    #[serde(default)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceDoc {
    pub coords: Vec<String>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImmersionDoc {
    pub params: Vec<ParamDoc>,
    pub components: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDoc {
    pub name: String,
    pub interval: [f64; 2],
}

/// A submanifold with its resolved immersion.
#[derive(Debug, Clone)]
pub struct SubmanifoldEntry {
    pub imm: ImmersionRecord,
    pub expect: Option<SubmanifoldKind>,
    pub lambda: Option<f64>,
}

/// A requested check and its target submanifold (index into `submanifolds`).
#[derive(Debug, Clone)]
pub struct CheckRequest {
    pub spec: &'static CheckSpec,
    pub target: Option<usize>,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub doc: ScenarioDoc,
    pub manifold: GrwManifold,
    pub submanifolds: Vec<SubmanifoldEntry>,
    pub checks: Vec<CheckRequest>,
}

impl Scenario {
    pub fn engine(&self) -> Engine {
        self.doc.engine.into()
    }

    pub fn tolerance(&self) -> f64 {
        match self.doc.engine {
            EngineName::Jet => self.doc.tolerances.jet,
            EngineName::Fd => self.doc.tolerances.fd,
        }
        .unwrap_or_else(|| self.engine().tolerance())
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario(&text)
}

/// Parses and validates a scenario from JSON text.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ScenarioDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        invalid(if path == "." { "scenario".to_string() } else { path }, e.into_inner().to_string())
    })?;
    validate(doc)
}

fn positive(path: &str, v: Option<f64>) -> Result<(), ScenarioError> {
    match v {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(invalid(path, format!("must be a positive number, got {t}"))),
        _ => Ok(()),
    }
}

pub fn validate(doc: ScenarioDoc) -> Result<Scenario, ScenarioError> {
    if doc.samples == 0 {
        return Err(invalid("samples", "must be at least 1"));
    }
    if doc.trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    positive("tolerances.jet", doc.tolerances.jet)?;
    positive("tolerances.fd", doc.tolerances.fd)?;
    positive("structure.validate_tolerance", doc.structure.validate_tolerance)?;

    let g = &doc.manifold.grw;
    if g.dim > crate::fieldcore::MAX_DIM {
        return Err(invalid(
            "manifold.grw.dim",
            format!("dimension {} exceeds the supported maximum {}", g.dim, crate::fieldcore::MAX_DIM),
        ));
    }
    let spec = GrwSpec {
        dim: g.dim,
        warp: g.warp.clone(),
        t_interval: (g.t_interval[0], g.t_interval[1]),
        fiber: match &g.fiber {
            FiberDoc::Flat => Fiber::Flat,
            FiberDoc::Sphere => Fiber::SphereBlock,
            FiberDoc::Explicit(e) => Fiber::Explicit(e.clone()),
        },
        fiber_box: g.fiber_box.as_ref().map(|b| b.iter().map(|i| (i[0], i[1])).collect()),
    };
    let manifold = build_grw(&spec).map_err(|e| invalid("manifold.grw", e.to_string()))?;

    let mut submanifolds = Vec::with_capacity(doc.submanifolds.len());
    for (i, s) in doc.submanifolds.iter().enumerate() {
        let at = format!("submanifolds[{i}]");
        if s.name.is_empty() || s.name.contains('@') {
            return Err(invalid(format!("{at}.name"), "must be non-empty and must not contain '@'"));
        }
        if doc.submanifolds[..i].iter().any(|o| o.name == s.name) {
            return Err(invalid(format!("{at}.name"), format!("duplicate submanifold name {:?}", s.name)));
        }
        let imm = match (&s.slice, &s.immersion) {
            (Some(sl), None) => {
                let fixed: Vec<(String, f64)> = sl.fixed.iter().map(|(k, v)| (k.clone(), *v)).collect();
                ImmersionRecord::slice(&s.name, manifold.domain(), &sl.coords, &fixed)
                    .map_err(|e| invalid(format!("{at}.slice"), e.to_string()))?
            }
            (None, Some(im)) => {
                let names = im.params.iter().map(|p| p.name.clone()).collect();
                let bounds = im.params.iter().map(|p| (p.interval[0], p.interval[1])).collect();
                let params = ChartDomain::with_min_dim(names, bounds, 1)
                    .map_err(|e| invalid(format!("{at}.immersion.params"), e.to_string()))?;
                ImmersionRecord::from_exprs(&s.name, manifold.dim(), params, &im.components)
                    .map_err(|e| invalid(format!("{at}.immersion"), e.to_string()))?
            }
            _ => return Err(invalid(&at, "exactly one of \"slice\" or \"immersion\" is required")),
        };
        let expect = match &s.expect {
            None => None,
            Some(k) => Some(SubmanifoldKind::parse(k).ok_or_else(|| {
                invalid(
                    format!("{at}.expect"),
                    format!("unknown kind {k:?} (known: invariant, anti_invariant, neither)"),
                )
            })?),
        };
        submanifolds.push(SubmanifoldEntry {
            imm,
            expect,
            lambda: s.lambda,
        });
    }

    let mut checks = Vec::with_capacity(doc.checks.len());
    for (i, c) in doc.checks.iter().enumerate() {
        let at = format!("checks[{i}]");
        let (id, target) = match c.split_once('@') {
            Some((id, t)) => (id, Some(t)),
            None => (c.as_str(), None),
        };
        let spec = lookup(id).ok_or_else(|| invalid(&at, format!("unknown check id {id:?} (valid ids: {})", known_ids())))?;
        let target = match (spec.group.needs_target(), target) {
            (true, Some(t)) => Some(doc.submanifolds.iter().position(|s| s.name == t).ok_or_else(|| {
                let known: Vec<&str> = doc.submanifolds.iter().map(|s| s.name.as_str()).collect();
                invalid(&at, format!("unknown submanifold {t:?} (known: {})", known.join(", ")))
            })?),
            (true, None) => {
                return Err(invalid(&at, format!("{id} is a submanifold check; write it as \"{id}@<submanifold>\"")))
            }
            (false, Some(_)) => return Err(invalid(&at, format!("{id} is an ambient check and takes no submanifold"))),
            (false, None) => None,
        };
        if checks.iter().any(|r: &CheckRequest| r.spec.id == spec.id && r.target == target) {
            return Err(invalid(&at, format!("{c:?} is listed twice")));
        }
        checks.push(CheckRequest { spec, target });
    }
    Ok(Scenario {
        doc,
        manifold,
        submanifolds,
        checks,
    })
}
