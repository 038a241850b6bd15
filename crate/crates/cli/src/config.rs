//! Experiment configuration: JSON schema, parsing, defaults and validation.
//!
//! Parsing happens in two passes. The raw JSON is checked against [`schema`]
//! so that every structural problem is reported at once with its path, then
//! the typed config is checked for physical constraints (positive decay,
//! valid sites, ...).

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use topamp_core::model::validate_spec;
use topamp_core::response::linspace;
use topamp_core::Complex64;
use topamp_core::{Boundary, CMat, ChainParams, Error as CoreError, LatticeSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathViolation {
    /// Dotted path into the config, e.g. `model.chain.gamma_p`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for PathViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub violations: Vec<PathViolation>,
}

impl ConfigError {
    fn single(path: &str, message: impl Into<String>) -> Self {
        ConfigError { violations: vec![PathViolation { path: path.to_string(), message: message.into() }] }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid config ({} problem{})",
            self.violations.len(),
            if self.violations.len() == 1 { "" } else { "s" }
        )?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub experiment: Experiment,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum ModelConfig {
    Chain(ChainModel),
    Matrices(MatrixModel),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ChainModel {
    #[serde(default = "one")]
    pub t_c: f64,
    #[serde(default = "one")]
    pub t_d: f64,
    #[serde(default = "half_pi")]
    pub phi: f64,
    pub gamma_p: f64,
    #[serde(default)]
    pub omega0: f64,
    pub n_sites: usize,
    #[serde(default)]
    pub boundary: BoundaryName,
}

impl ChainModel {
    pub fn params(&self) -> ChainParams {
        ChainParams {
            t_c: self.t_c,
            t_d: self.t_d,
            phi: self.phi,
            gamma_p: self.gamma_p,
            omega0: self.omega0,
            n_sites: self.n_sites,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryName {
    #[default]
    Open,
    Periodic,
}

impl From<BoundaryName> for Boundary {
    fn from(b: BoundaryName) -> Self {
        match b {
            BoundaryName::Open => Boundary::Open,
            BoundaryName::Periodic => Boundary::Periodic,
        }
    }
}

/// Explicit lattice. Matrices are row lists; entries are real numbers or
/// `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixModel {
    pub omega: Vec<f64>,
    pub kappa: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<Vec<Vec<Entry>>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

/// Frequency or rate grid: explicit values or `points` evenly spaced values
/// from `start` to `stop` inclusive.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Range { start, stop, points } => linspace(*start, *stop, *points),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    GainSweep(GainSweep),
    PhaseMap(PhaseMapExperiment),
    NoiseProfile(NoiseProfile),
    AddedNoise(AddedNoise),
    Nsr(Nsr),
    Stability(Stability),
    SteadyState(SteadyState),
    Disorder(Disorder),
    Classify(Classify),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::GainSweep(_) => "gain-sweep",
            Experiment::PhaseMap(_) => "phase-map",
            Experiment::NoiseProfile(_) => "noise-profile",
            Experiment::AddedNoise(_) => "added-noise",
            Experiment::Nsr(_) => "nsr",
            Experiment::Stability(_) => "stability",
            Experiment::SteadyState(_) => "steady-state",
            Experiment::Disorder(_) => "disorder",
            Experiment::Classify(_) => "classify",
        }
    }

    fn needs_chain(&self) -> bool {
        matches!(
            self,
            Experiment::PhaseMap(_) | Experiment::AddedNoise(_) | Experiment::Disorder(_) | Experiment::Classify(_)
        )
    }
}

/// Sites are 1-based throughout the config and the output tables.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct GainSweep {
    pub gamma_p: Option<Vec<f64>>,
    pub n_sites: Option<Vec<usize>>,
    pub omega: Option<Grid>,
    pub omega_d: Option<f64>,
    pub input_site: Option<usize>,
    pub output_site: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PhaseMapExperiment {
    pub omega: Grid,
    pub gamma_p: Grid,
    pub n_sites: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct NoiseProfile {
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct AddedNoise {
    pub gamma_p: Option<Vec<f64>>,
    pub omega: Option<Grid>,
    pub site: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct Nsr {
    pub amplitude_sq: Option<f64>,
    pub omega_d: Option<f64>,
    /// Inclusive `[first, last]` sites of the power-law fit.
    pub fit_sites: Option<[usize; 2]>,
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct Stability {
    pub gamma_p: Option<Vec<f64>>,
    pub boundaries: Option<Vec<BoundaryName>>,
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    #[default]
    Auto,
    Eigen,
    Schur,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct SteadyState {
    pub method: Option<MethodName>,
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Disorder {
    pub w: Vec<f64>,
    pub n_sites: Vec<usize>,
    pub instances: Option<usize>,
    pub seed: Option<u64>,
    pub fit_range: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Classify {
    pub phi: Grid,
    pub omega: Grid,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: default_directory(), formats: default_formats() }
    }
}

fn one() -> f64 {
    1.0
}

fn half_pi() -> f64 {
    FRAC_PI_2
}

fn default_directory() -> PathBuf {
    PathBuf::from("results")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

pub const DEFAULT_NOISE_TOL: f64 = 1e-8;
pub const DEFAULT_STEADY_TOL: f64 = 1e-10;
pub const DEFAULT_INSTANCES: usize = 500;

/// JSON schema of the config file.
pub fn schema() -> Value {
    let number = json!({"type": "number"});
    let numbers = json!({"type": "array", "items": {"type": "number"}, "minItems": 1});
    let site = json!({"type": "integer", "minimum": 1});
    let sites = json!({"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1});
    let positive = json!({"type": "number", "exclusiveMinimum": 0});
    let grid = json!({
        "anyOf": [
            {"type": "array", "items": {"type": "number"}, "minItems": 1},
            {
                "type": "object",
                "properties": {
                    "start": {"type": "number"},
                    "stop": {"type": "number"},
                    "points": {"type": "integer", "minimum": 1}
                },
                "required": ["start", "stop", "points"],
                "additionalProperties": false
            }
        ]
    });
    let matrix = json!({
        "type": "array",
        "items": {
            "type": "array",
            "items": {
                "anyOf": [
                    {"type": "number"},
                    {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
                ]
            }
        }
    });
    let kind = |name: &str, props: Value, required: Value| {
        let mut props = props;
        props["kind"] = json!({"const": name});
        json!({
            "if": {"properties": {"kind": {"const": name}}, "required": ["kind"]},
            "then": {"properties": props, "required": required, "additionalProperties": false}
        })
    };
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "topamp experiment",
        "type": "object",
        "properties": {
            "model": {
                "type": "object",
                "minProperties": 1,
                "maxProperties": 1,
                "properties": {
                    "chain": {
                        "type": "object",
                        "properties": {
                            "t_c": positive, "t_d": positive, "phi": number, "gamma_p": number,
                            "omega0": number,
                            "n_sites": {"type": "integer", "minimum": 1},
                            "boundary": {"enum": ["open", "periodic"]}
                        },
                        "required": ["gamma_p", "n_sites"],
                        "additionalProperties": false
                    },
                    "matrices": {
                        "type": "object",
                        "properties": {
                            "omega": numbers, "kappa": numbers,
                            "coupling": matrix, "pump": matrix, "loss": matrix
                        },
                        "required": ["omega", "kappa"],
                        "additionalProperties": false
                    }
                },
                "additionalProperties": false
            },
            "experiment": {
                "type": "object",
                "properties": {
                    "kind": {"enum": [
                        "gain-sweep", "phase-map", "noise-profile", "added-noise", "nsr",
                        "stability", "steady-state", "disorder", "classify"
                    ]}
                },
                "required": ["kind"],
                "allOf": [
                    kind("gain-sweep", json!({
                        "gamma_p": numbers, "n_sites": sites, "omega": grid, "omega_d": number,
                        "input_site": site, "output_site": site
                    }), json!([])),
                    kind("phase-map", json!({
                        "omega": grid, "gamma_p": grid, "n_sites": {"type": "integer", "minimum": 2}
                    }), json!(["omega", "gamma_p"])),
                    kind("noise-profile", json!({"rel_tol": positive}), json!([])),
                    kind("added-noise", json!({"gamma_p": numbers, "omega": grid, "site": site}), json!([])),
                    kind("nsr", json!({
                        "amplitude_sq": positive, "omega_d": number, "rel_tol": positive,
                        "fit_sites": {"type": "array", "items": site, "minItems": 2, "maxItems": 2}
                    }), json!([])),
                    kind("stability", json!({
                        "gamma_p": numbers,
                        "boundaries": {"type": "array", "items": {"enum": ["open", "periodic"]}, "minItems": 1}
                    }), json!([])),
                    kind("steady-state", json!({
                        "method": {"enum": ["auto", "eigen", "schur"]}, "rel_tol": positive
                    }), json!([])),
                    kind("disorder", json!({
                        "w": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
                        "n_sites": sites,
                        "instances": {"type": "integer", "minimum": 1},
                        "seed": {"type": "integer", "minimum": 0},
                        "fit_range": sites
                    }), json!(["w", "n_sites"])),
                    kind("classify", json!({"phi": grid, "omega": grid}), json!(["phi", "omega"]))
                ]
            },
            "output": {
                "type": "object",
                "properties": {
                    "directory": {"type": "string"},
                    "formats": {"type": "array", "items": {"enum": ["csv", "json"]}}
                },
                "additionalProperties": false
            }
        },
        "required": ["model", "experiment"],
        "additionalProperties": false
    })
}

fn dotted(pointer: &str) -> String {
    if pointer.is_empty() {
        return "(root)".to_string();
    }
    let mut out = String::new();
    for part in pointer.trim_start_matches('/').split('/') {
        let part = part.replace("~1", "/").replace("~0", "~");
        if part.chars().all(|ch| ch.is_ascii_digit()) {
            out.push_str(&format!("[{part}]"));
        } else {
            if !out.is_empty() {
                out.push('.');
            }
            out.push_str(&part);
        }
    }
    out
}

/// Parses, fills defaults and validates a config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| ConfigError::single("(root)", format!("not valid JSON: {e}")))?;
    let validator = jsonschema::validator_for(&schema()).expect("built-in schema compiles");
    let violations: Vec<PathViolation> = validator
        .iter_errors(&value)
        .map(|e| PathViolation { path: dotted(&e.instance_path().to_string()), message: e.to_string() })
        .collect();
    if !violations.is_empty() {
        return Err(ConfigError { violations });
    }
    let mut cfg: ExperimentConfig =
        serde_json::from_value(value).map_err(|e| ConfigError::single("(root)", e.to_string()))?;
    cfg.fill_defaults();
    let violations = cfg.check();
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError { violations })
    }
}

impl ExperimentConfig {
    pub fn chain(&self) -> Option<&ChainModel> {
        match &self.model {
            ModelConfig::Chain(m) => Some(m),
            ModelConfig::Matrices(_) => None,
        }
    }

    pub fn n_sites(&self) -> usize {
        match &self.model {
            ModelConfig::Chain(m) => m.n_sites,
            ModelConfig::Matrices(m) => m.omega.len(),
        }
    }

    /// The lattice described by the model block.
    pub fn lattice(&self) -> Result<LatticeSpec, ConfigError> {
        match &self.model {
            ModelConfig::Chain(m) => topamp_core::build_chain_spec(&m.params(), m.boundary.into())
                .map_err(|e| core_violation("model.chain", &e)),
            ModelConfig::Matrices(m) => matrix_lattice(m),
        }
    }

    /// Seed of a disorder run, if any.
    pub fn seed(&self) -> Option<u64> {
        match &self.experiment {
            Experiment::Disorder(d) => d.seed,
            _ => None,
        }
    }

    pub fn override_seed(&mut self, seed: u64) {
        if let Experiment::Disorder(d) = &mut self.experiment {
            d.seed = Some(seed);
        }
    }

    /// Model and experiment blocks; the output block does not affect results.
    pub fn canonical(&self) -> Value {
        json!({"model": self.model, "experiment": self.experiment})
    }

    /// First 16 hex digits of the SHA-256 of the canonical config.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.canonical()).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))[..16].to_string()
    }

    fn fill_defaults(&mut self) {
        let n = self.n_sites();
        let chain = self.chain().cloned();
        match &mut self.experiment {
            Experiment::GainSweep(g) => {
                if let Some(m) = &chain {
                    g.gamma_p.get_or_insert_with(|| vec![m.gamma_p]);
                    g.n_sites.get_or_insert_with(|| vec![m.n_sites]);
                    g.omega_d.get_or_insert(m.omega0);
                }
                g.input_site.get_or_insert(1);
            }
            Experiment::PhaseMap(p) => {
                p.n_sites.get_or_insert(n);
            }
            Experiment::NoiseProfile(p) => {
                p.rel_tol.get_or_insert(DEFAULT_NOISE_TOL);
            }
            Experiment::AddedNoise(a) => {
                if let Some(m) = &chain {
                    a.gamma_p.get_or_insert_with(|| vec![m.gamma_p]);
                }
                a.site.get_or_insert(n);
            }
            Experiment::Nsr(s) => {
                s.amplitude_sq.get_or_insert(1.0);
                if let Some(m) = &chain {
                    s.omega_d.get_or_insert(m.omega0);
                }
                s.fit_sites.get_or_insert([5.min(n), n]);
                s.rel_tol.get_or_insert(DEFAULT_NOISE_TOL);
            }
            Experiment::Stability(s) => {
                if let Some(m) = &chain {
                    s.gamma_p.get_or_insert_with(|| vec![m.gamma_p]);
                    s.boundaries.get_or_insert_with(|| vec![BoundaryName::Open, BoundaryName::Periodic]);
                }
            }
            Experiment::SteadyState(s) => {
                s.method.get_or_insert_with(MethodName::default);
                s.rel_tol.get_or_insert(DEFAULT_STEADY_TOL);
            }
            Experiment::Disorder(d) => {
                d.instances.get_or_insert(DEFAULT_INSTANCES);
                d.seed.get_or_insert(0);
                let sizes = d.n_sites.clone();
                d.fit_range.get_or_insert(sizes);
            }
            Experiment::Classify(_) => {}
        }
    }

    /// Physical and cross-field constraints not expressible in the schema.
    fn check(&self) -> Vec<PathViolation> {
        let mut out = vec![];
        let mut push = |path: &str, message: String| out.push(PathViolation { path: path.to_string(), message });
        let n = self.n_sites();

        match &self.model {
            ModelConfig::Chain(m) => {
                if let Err(e) = m.params().validate() {
                    let v = core_violation("model.chain", &e).violations.remove(0);
                    push(&v.path, v.message);
                }
                if m.boundary == BoundaryName::Periodic && m.n_sites < 3 {
                    push("model.chain.n_sites", "periodic chains need at least 3 sites".into());
                }
            }
            ModelConfig::Matrices(m) => {
                if let Err(e) = matrix_lattice(m) {
                    for v in e.violations {
                        push(&v.path, v.message);
                    }
                }
            }
        }

        if self.experiment.needs_chain() && self.chain().is_none() {
            push("model", format!("experiment kind `{}` needs a chain model", self.experiment.kind()));
        }
        let chain = self.chain();
        let sweep = |path: &str, values: &Option<Vec<f64>>, push: &mut dyn FnMut(&str, String)| {
            let Some(values) = values else { return };
            let Some(m) = chain else {
                push(path, "gamma_p sweeps need a chain model".into());
                return;
            };
            for (k, &gp) in values.iter().enumerate() {
                if let Err(e) = m.params().with_gamma_p(gp).validate() {
                    push(&format!("{path}[{k}]"), core_message(&e));
                }
            }
        };
        let site_in = |path: &str, site: Option<usize>, limit: usize, push: &mut dyn FnMut(&str, String)| {
            if let Some(s) = site {
                if s > limit {
                    push(path, format!("site {s} is beyond the last site {limit}"));
                }
            }
        };

        match &self.experiment {
            Experiment::GainSweep(g) => {
                sweep("experiment.gamma_p", &g.gamma_p, &mut push);
                let smallest = g.n_sites.as_ref().and_then(|v| v.iter().min().copied()).unwrap_or(n);
                if g.n_sites.is_some() && chain.is_none() {
                    push("experiment.n_sites", "size sweeps need a chain model".into());
                }
                if chain.is_none() && g.omega.is_none() {
                    push("experiment.omega", "required for explicit matrices".into());
                }
                if chain.is_none() && g.omega_d.is_none() {
                    push("experiment.omega_d", "required for explicit matrices".into());
                }
                site_in("experiment.input_site", g.input_site, smallest, &mut push);
                site_in("experiment.output_site", g.output_site, smallest, &mut push);
                if let (Some(m), Some(sizes)) = (chain, &g.n_sites) {
                    if m.boundary == BoundaryName::Periodic && sizes.iter().any(|&s| s < 3) {
                        push("experiment.n_sites", "periodic chains need at least 3 sites".into());
                    }
                }
            }
            Experiment::PhaseMap(_) | Experiment::Classify(_) | Experiment::NoiseProfile(_) => {}
            Experiment::AddedNoise(a) => {
                sweep("experiment.gamma_p", &a.gamma_p, &mut push);
                site_in("experiment.site", a.site, n, &mut push);
            }
            Experiment::Nsr(s) => {
                if chain.is_none() && s.omega_d.is_none() {
                    push("experiment.omega_d", "required for explicit matrices".into());
                }
                if let Some([lo, hi]) = s.fit_sites {
                    if lo < 2 || hi > n || hi < lo + 2 {
                        push(
                            "experiment.fit_sites",
                            format!("need 2 <= first, last <= {n} and at least 3 sites, got [{lo}, {hi}]"),
                        );
                    }
                }
            }
            Experiment::Stability(s) => {
                sweep("experiment.gamma_p", &s.gamma_p, &mut push);
                if chain.is_none() && s.boundaries.is_some() {
                    push("experiment.boundaries", "boundary sweeps need a chain model".into());
                }
                if let (Some(m), Some(b)) = (chain, &s.boundaries) {
                    if b.contains(&BoundaryName::Periodic) && m.n_sites < 3 {
                        push("experiment.boundaries", "periodic chains need at least 3 sites".into());
                    }
                }
            }
            Experiment::SteadyState(_) => {}
            Experiment::Disorder(d) => {
                let fit = d.fit_range.as_deref().unwrap_or(&d.n_sites);
                if fit.len() < 3 {
                    push("experiment.fit_range", "needs at least 3 sizes".into());
                }
                if let Some(s) = fit.iter().find(|s| !d.n_sites.contains(s)) {
                    push("experiment.fit_range", format!("size {s} is not in n_sites"));
                }
            }
        }
        out
    }
}

fn core_message(e: &CoreError) -> String {
    match e {
        CoreError::InvalidParameter { reason, .. } => reason.clone(),
        other => other.to_string(),
    }
}

fn core_violation(prefix: &str, e: &CoreError) -> ConfigError {
    let path = match e {
        CoreError::InvalidParameter { name, .. } => format!("{prefix}.{name}"),
        _ => prefix.to_string(),
    };
    ConfigError::single(&path, core_message(e))
}

fn matrix_lattice(m: &MatrixModel) -> Result<LatticeSpec, ConfigError> {
    let n = m.omega.len();
    let mut violations = vec![];
    if m.kappa.len() != n {
        violations.push(PathViolation {
            path: "model.matrices.kappa".into(),
            message: format!("has {} entries, omega has {n}", m.kappa.len()),
        });
    }
    let mut read = |name: &str, rows: &Option<Vec<Vec<Entry>>>| -> CMat {
        let Some(rows) = rows else { return CMat::zeros(n, n) };
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            violations
                .push(PathViolation { path: format!("model.matrices.{name}"), message: format!("must be {n} x {n}") });
            return CMat::zeros(n, n);
        }
        CMat::from_fn(n, n, |i, j| match rows[i][j] {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        })
    };
    let coupling = read("coupling", &m.coupling);
    let pump = read("pump", &m.pump);
    let loss = read("loss", &m.loss);
    if !violations.is_empty() {
        return Err(ConfigError { violations });
    }
    let spec = LatticeSpec { omega: m.omega.clone(), kappa: m.kappa.clone(), coupling, pump, loss };
    let report = validate_spec(&spec);
    if report.is_ok() {
        Ok(spec)
    } else {
        Err(ConfigError {
            violations: report
                .violations
                .iter()
                .map(|v| PathViolation {
                    path: format!("model.matrices.{}", v.field),
                    message: format!("{} (residual {:.3e})", v.invariant, v.residual),
                })
                .collect(),
        })
    }
}
