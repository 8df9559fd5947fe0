//! TOML experiment configuration: parsing with exhaustive validation, canonical serialization
//! and hashing.

use galerkin_solvers::{ModelParams, SolverOptions, SpectralField};
use mode_algebra::{lattice_modes, Field, ModelKind, Parity, TrigMode, WaveVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SpanCheck,
    DeterminingModes,
    ScalingSweep,
    Reach,
    ExactProjection,
    Gramian,
    SupportMc,
    EnvelopeCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        Self::SpanCheck,
        Self::DeterminingModes,
        Self::ScalingSweep,
        Self::Reach,
        Self::ExactProjection,
        Self::Gramian,
        Self::SupportMc,
        Self::EnvelopeCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::SpanCheck => "span_check",
            Self::DeterminingModes => "determining_modes",
            Self::ScalingSweep => "scaling_sweep",
            Self::Reach => "reach",
            Self::ExactProjection => "exact_projection",
            Self::Gramian => "gramian",
            Self::SupportMc => "support_mc",
            Self::EnvelopeCheck => "envelope_check",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    fn needs_model(self) -> bool {
        self != Self::EnvelopeCheck
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A mode named by its wavevector; parity, field and polarization where the model needs them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeRef {
    pub k: Vec<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<Parity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<Field>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeValue {
    pub k: Vec<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<Parity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<Field>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<u8>,
    pub value: f64,
}

impl ModeValue {
    pub fn mode_ref(&self) -> ModeRef {
        ModeRef { k: self.k.clone(), parity: self.parity, field: self.field, polarization: self.polarization }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub name: ModelKind,
    pub cutoff: u32,
    #[serde(default)]
    pub nu: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub gravity: f64,
    #[serde(default)]
    pub rd_coeffs: Vec<f64>,
    /// Controlled wavevectors.
    pub controls: Vec<Vec<i32>>,
    #[serde(default)]
    pub force: Vec<ModeValue>,
    #[serde(default)]
    pub solver: SolverOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BurstKind {
    Ray,
    Bracket,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpanCheckConfig {
    pub max_depth: usize,
    pub expect_satisfied: bool,
}

impl Default for SpanCheckConfig {
    fn default() -> Self {
        Self { max_depth: 8, expect_satisfied: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeterminingModesConfig {
    /// Add `(1,1,1)`, certified by the axis double-bracket escape.
    pub escape: bool,
    pub expect_cover: bool,
}

impl Default for DeterminingModesConfig {
    fn default() -> Self {
        Self { escape: false, expect_cover: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalingSweepConfig {
    pub burst: BurstKind,
    pub t: f64,
    pub lambdas: Vec<f64>,
    pub cases: usize,
    pub amplitude: f64,
    pub max_slope: f64,
    /// Bracket bursts: final error relative to the largest limit displacement.
    pub max_relative_error: f64,
}

impl Default for ScalingSweepConfig {
    fn default() -> Self {
        Self {
            burst: BurstKind::Ray,
            t: 1.0,
            lambdas: vec![1e2, 1e3, 1e4, 1e5],
            cases: 5,
            amplitude: 0.5,
            max_slope: -0.4,
            max_relative_error: 1e-2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReachConfig {
    pub t: f64,
    pub eps: f64,
    pub depth: usize,
    pub exact_time: bool,
    pub initial: Vec<ModeValue>,
    pub target: Vec<ModeValue>,
    pub lambda_start: f64,
    pub lambda_cap: f64,
    pub delta: f64,
}

impl Default for ReachConfig {
    fn default() -> Self {
        Self {
            t: 1.0,
            eps: 0.1,
            depth: 4,
            exact_time: false,
            initial: Vec::new(),
            target: Vec::new(),
            lambda_start: 1e2,
            lambda_cap: 1e8,
            delta: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExactProjectionConfig {
    pub t: f64,
    pub eps: f64,
    pub depth: usize,
    pub initial: Vec<ModeValue>,
    pub target: Vec<ModeValue>,
    pub modes: Vec<ModeRef>,
    pub theta: f64,
    pub proj_tol: f64,
    pub max_iters: usize,
    pub lambda_start: f64,
    pub lambda_cap: f64,
    pub delta: f64,
}

impl Default for ExactProjectionConfig {
    fn default() -> Self {
        Self {
            t: 1.0,
            eps: 0.1,
            depth: 4,
            initial: Vec::new(),
            target: Vec::new(),
            modes: Vec::new(),
            theta: 0.5,
            proj_tol: 1e-8,
            max_iters: 50,
            lambda_start: 1e2,
            lambda_cap: 1e8,
            delta: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GramianConfig {
    pub t: f64,
    pub noise_dt: f64,
    /// Empty means the controlled modes.
    pub modes: Vec<ModeRef>,
    pub runs: usize,
    /// Extension `s` for the monotone non-degeneracy check; 0 skips it.
    pub extension: f64,
    pub initial: Vec<ModeValue>,
}

impl Default for GramianConfig {
    fn default() -> Self {
        Self { t: 1.0, noise_dt: 1e-3, modes: Vec::new(), runs: 1, extension: 0.0, initial: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SupportMcConfig {
    pub t: f64,
    pub noise_dt: f64,
    pub delta: f64,
    pub samples: usize,
    pub initial: Vec<ModeValue>,
    pub target: Vec<ModeValue>,
    /// Empty means the controlled modes.
    pub modes: Vec<ModeRef>,
    /// The run passes when the hit frequency exceeds this.
    pub min_frequency: f64,
}

impl Default for SupportMcConfig {
    fn default() -> Self {
        Self {
            t: 1.0,
            noise_dt: 1e-2,
            delta: 0.5,
            samples: 200,
            initial: Vec::new(),
            target: Vec::new(),
            modes: Vec::new(),
            min_frequency: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvelopeCheckConfig {
    pub c0: f64,
    pub kappa0: Vec<f64>,
    pub p: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub x0: Vec<f64>,
    pub fraction: f64,
    pub steps: usize,
}

impl Default for EnvelopeCheckConfig {
    fn default() -> Self {
        Self {
            c0: 1.0,
            kappa0: vec![0.0, 1.0],
            p: vec![2.0, 3.0, 6.0],
            lambdas: vec![10.0, 1e3],
            x0: vec![0.1, 0.5, 1.0],
            fraction: 0.9,
            steps: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span_check: Option<SpanCheckConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub determining_modes: Option<DeterminingModesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling_sweep: Option<ScalingSweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reach: Option<ReachConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_projection: Option<ExactProjectionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gramian: Option<GramianConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_mc: Option<SupportMcConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope_check: Option<EnvelopeCheckConfig>,
}

/// One validation failure: dotted key path and reason.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigIssue {
    pub path: String,
    pub reason: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.reason)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{} configuration error(s):\n{}", .0.len(), .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

const TOP_KEYS: &[&str] = &["kind", "seed", "out", "model"];
const MODEL_KEYS: &[&str] = &["name", "cutoff", "nu", "kappa", "gravity", "rd_coeffs", "controls", "force", "solver"];
const SOLVER_KEYS: &[&str] = &["dt", "min_steps", "tol", "cfl", "guard"];
const MODE_KEYS: &[&str] = &["k", "parity", "field", "polarization"];
const MODE_VALUE_KEYS: &[&str] = &["k", "parity", "field", "polarization", "value"];

fn section_keys(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::SpanCheck => &["max_depth", "expect_satisfied"],
        ExperimentKind::DeterminingModes => &["escape", "expect_cover"],
        ExperimentKind::ScalingSweep => &["burst", "t", "lambdas", "cases", "amplitude", "max_slope", "max_relative_error"],
        ExperimentKind::Reach => &["t", "eps", "depth", "exact_time", "initial", "target", "lambda_start", "lambda_cap", "delta"],
        ExperimentKind::ExactProjection => &[
            "t", "eps", "depth", "initial", "target", "modes", "theta", "proj_tol", "max_iters", "lambda_start", "lambda_cap", "delta",
        ],
        ExperimentKind::Gramian => &["t", "noise_dt", "modes", "runs", "extension", "initial"],
        ExperimentKind::SupportMc => &["t", "noise_dt", "delta", "samples", "initial", "target", "modes", "min_frequency"],
        ExperimentKind::EnvelopeCheck => &["c0", "kappa0", "p", "lambdas", "x0", "fraction", "steps"],
    }
}

struct Collector(Vec<ConfigIssue>);

impl Collector {
    fn push(&mut self, path: impl Into<String>, reason: impl Into<String>) {
        self.0.push(ConfigIssue { path: path.into(), reason: reason.into() });
    }

    fn unknown(&mut self, table: &toml::Table, allowed: &[&str], prefix: &str) {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                self.push(join(prefix, key), "unknown key");
            }
        }
    }

    fn mode_list(&mut self, table: &toml::Table, key: &str, allowed: &[&str], prefix: &str) {
        if let Some(toml::Value::Array(items)) = table.get(key) {
            for (i, item) in items.iter().enumerate() {
                if let toml::Value::Table(t) = item {
                    self.unknown(t, allowed, &format!("{}[{i}]", join(prefix, key)));
                }
            }
        }
    }

    fn typed<T: DeserializeOwned>(&mut self, value: toml::Value, path: &str) -> Option<T> {
        match value.try_into::<T>() {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(path, e.message().trim().to_string());
                None
            }
        }
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

/// Parses and validates a config, filling documented defaults; reports every problem found.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        ConfigErrors(vec![ConfigIssue { path: "<document>".into(), reason: e.message().trim().to_string() }])
    })?;
    let mut c = Collector(Vec::new());
    let kind = match table.get("kind") {
        None => {
            c.push("kind", "missing required key");
            None
        }
        Some(toml::Value::String(s)) => match ExperimentKind::from_name(s) {
            Some(k) => Some(k),
            None => {
                let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                c.push("kind", format!("unknown experiment kind {s:?}; expected one of {}", names.join(", ")));
                None
            }
        },
        Some(_) => {
            c.push("kind", "must be a string");
            None
        }
    };
    let mut allowed: Vec<&str> = TOP_KEYS.to_vec();
    if let Some(k) = kind {
        allowed.push(k.name());
    }
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            let reason = match (ExperimentKind::from_name(key), kind) {
                (Some(other), Some(k)) => format!("section [{other}] does not apply to kind {k}"),
                _ => "unknown key".to_string(),
            };
            c.push(key.clone(), reason);
        }
    }
    let seed = match table.get("seed") {
        None => 0,
        Some(v) => c.typed::<u64>(v.clone(), "seed").unwrap_or(0),
    };
    let out = table.get("out").and_then(|v| c.typed::<String>(v.clone(), "out"));

    let model = match table.get("model") {
        None => {
            if kind.is_some_and(ExperimentKind::needs_model) {
                c.push("model", "missing required section");
            }
            None
        }
        Some(toml::Value::Table(m)) => {
            c.unknown(m, MODEL_KEYS, "model");
            for req in ["name", "cutoff", "controls"] {
                if !m.contains_key(req) {
                    c.push(join("model", req), "missing required key");
                }
            }
            if let Some(toml::Value::Table(s)) = m.get("solver") {
                c.unknown(s, SOLVER_KEYS, "model.solver");
            }
            c.mode_list(m, "force", MODE_VALUE_KEYS, "model");
            if let Some(toml::Value::Integer(0)) = m.get("cutoff") {
                c.push("model.cutoff", "cutoff must be ≥ 1");
                None
            } else if ["name", "cutoff", "controls"].iter().all(|k| m.contains_key(*k)) {
                c.typed::<ModelConfig>(toml::Value::Table(m.clone()), "model")
            } else {
                None
            }
        }
        Some(_) => {
            c.push("model", "must be a table");
            None
        }
    };

    let mut cfg = kind.map(|kind| ExperimentConfig {
        kind,
        seed,
        out,
        model,
        span_check: None,
        determining_modes: None,
        scaling_sweep: None,
        reach: None,
        exact_projection: None,
        gramian: None,
        support_mc: None,
        envelope_check: None,
    });
    if let Some(cfg) = cfg.as_mut() {
        let name = cfg.kind.name();
        let section = match table.get(name) {
            None => toml::Table::new(),
            Some(toml::Value::Table(t)) => t.clone(),
            Some(_) => {
                c.push(name, "must be a table");
                toml::Table::new()
            }
        };
        c.unknown(&section, section_keys(cfg.kind), name);
        for key in ["initial", "target", "modes"] {
            let allowed = if key == "modes" { MODE_KEYS } else { MODE_VALUE_KEYS };
            c.mode_list(&section, key, allowed, name);
        }
        let v = toml::Value::Table(section);
        match cfg.kind {
            ExperimentKind::SpanCheck => cfg.span_check = c.typed(v, name),
            ExperimentKind::DeterminingModes => cfg.determining_modes = c.typed(v, name),
            ExperimentKind::ScalingSweep => cfg.scaling_sweep = c.typed(v, name),
            ExperimentKind::Reach => cfg.reach = c.typed(v, name),
            ExperimentKind::ExactProjection => cfg.exact_projection = c.typed(v, name),
            ExperimentKind::Gramian => cfg.gramian = c.typed(v, name),
            ExperimentKind::SupportMc => cfg.support_mc = c.typed(v, name),
            ExperimentKind::EnvelopeCheck => cfg.envelope_check = c.typed(v, name),
        }
    }
    if let Some(cfg) = &cfg {
        if c.0.is_empty() {
            cfg.check_ranges(&mut c);
        }
    }
    match cfg {
        Some(cfg) if c.0.is_empty() => Ok(cfg),
        _ => Err(ConfigErrors(c.0)),
    }
}

fn positive(c: &mut Collector, path: &str, x: f64) {
    if !(x > 0.0 && x.is_finite()) {
        c.push(path, format!("must be positive and finite, got {x}"));
    }
}

impl ExperimentConfig {
    /// Default config of the given kind (model left for the caller).
    pub fn new(kind: ExperimentKind, model: Option<ModelConfig>) -> Self {
        let mut c = Self {
            kind,
            seed: 0,
            out: None,
            model,
            span_check: None,
            determining_modes: None,
            scaling_sweep: None,
            reach: None,
            exact_projection: None,
            gramian: None,
            support_mc: None,
            envelope_check: None,
        };
        match kind {
            ExperimentKind::SpanCheck => c.span_check = Some(Default::default()),
            ExperimentKind::DeterminingModes => c.determining_modes = Some(Default::default()),
            ExperimentKind::ScalingSweep => c.scaling_sweep = Some(Default::default()),
            ExperimentKind::Reach => c.reach = Some(Default::default()),
            ExperimentKind::ExactProjection => c.exact_projection = Some(Default::default()),
            ExperimentKind::Gramian => c.gramian = Some(Default::default()),
            ExperimentKind::SupportMc => c.support_mc = Some(Default::default()),
            ExperimentKind::EnvelopeCheck => c.envelope_check = Some(Default::default()),
        }
        c
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }

    /// SHA-256 of the canonical TOML encoding, lower-case hex.
    pub fn config_hash(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Re-runs the range checks on a config built in code.
    pub fn validate(&self) -> Result<(), ConfigErrors> {
        let mut c = Collector(Vec::new());
        self.check_ranges(&mut c);
        if c.0.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(c.0))
        }
    }

    fn check_ranges(&self, c: &mut Collector) {
        if self.kind.needs_model() && self.model.is_none() {
            c.push("model", "missing required section");
        }
        if let Some(m) = &self.model {
            m.check(c);
        }
        let model = self.model.as_ref();
        let modes = |c: &mut Collector, list: &[ModeValue], path: &str| {
            if let Some(m) = model {
                for (i, mv) in list.iter().enumerate() {
                    if let Err(e) = m.trig_mode(&mv.mode_ref()) {
                        c.push(format!("{path}[{i}]"), e);
                    }
                }
            }
        };
        let refs = |c: &mut Collector, list: &[ModeRef], path: &str| {
            if let Some(m) = model {
                for (i, r) in list.iter().enumerate() {
                    if let Err(e) = m.trig_mode(r) {
                        c.push(format!("{path}[{i}]"), e);
                    }
                }
            }
        };
        if let Some(s) = &self.determining_modes {
            let _ = s;
            if model.is_some_and(|m| m.name != ModelKind::Euler3d) {
                c.push("model.name", "determining_modes needs euler3d");
            }
        }
        if let Some(s) = &self.scaling_sweep {
            positive(c, "scaling_sweep.t", s.t);
            positive(c, "scaling_sweep.amplitude", s.amplitude);
            positive(c, "scaling_sweep.max_relative_error", s.max_relative_error);
            if s.cases == 0 {
                c.push("scaling_sweep.cases", "must be ≥ 1");
            }
            let l = &s.lambdas;
            if l.len() < 3 || l[0] < 1.0 || !l.windows(2).all(|w| w[1] > w[0]) || !scaling_controls::scaling::is_geometric(l) {
                c.push("scaling_sweep.lambdas", "need at least 3 increasing values ≥ 1 with a constant ratio");
            }
            if s.burst == BurstKind::Bracket && model.is_some_and(|m| m.name == ModelKind::Rd && m.rd_coeffs.len() < 3) {
                c.push("scaling_sweep.burst", "bracket bursts need a nonlinear model");
            }
        }
        if let Some(s) = &self.reach {
            positive(c, "reach.t", s.t);
            positive(c, "reach.eps", s.eps);
            positive(c, "reach.delta", s.delta);
            if !(s.lambda_start >= 1.0 && s.lambda_cap >= s.lambda_start) {
                c.push("reach.lambda_cap", "need 1 ≤ lambda_start ≤ lambda_cap");
            }
            if s.target.is_empty() {
                c.push("reach.target", "missing required key");
            }
            modes(c, &s.initial, "reach.initial");
            modes(c, &s.target, "reach.target");
        }
        if let Some(s) = &self.exact_projection {
            positive(c, "exact_projection.t", s.t);
            positive(c, "exact_projection.eps", s.eps);
            positive(c, "exact_projection.delta", s.delta);
            positive(c, "exact_projection.proj_tol", s.proj_tol);
            if !(s.theta > 0.0 && s.theta <= 1.0) {
                c.push("exact_projection.theta", format!("must lie in (0, 1], got {}", s.theta));
            }
            if !(s.lambda_start >= 1.0 && s.lambda_cap >= s.lambda_start) {
                c.push("exact_projection.lambda_cap", "need 1 ≤ lambda_start ≤ lambda_cap");
            }
            if s.target.is_empty() {
                c.push("exact_projection.target", "missing required key");
            }
            if s.modes.is_empty() {
                c.push("exact_projection.modes", "missing required key");
            }
            modes(c, &s.initial, "exact_projection.initial");
            modes(c, &s.target, "exact_projection.target");
            refs(c, &s.modes, "exact_projection.modes");
        }
        if let Some(s) = &self.gramian {
            positive(c, "gramian.t", s.t);
            positive(c, "gramian.noise_dt", s.noise_dt);
            if s.runs == 0 {
                c.push("gramian.runs", "must be ≥ 1");
            }
            if !(s.extension >= 0.0 && s.extension.is_finite()) {
                c.push("gramian.extension", format!("must be non-negative, got {}", s.extension));
            }
            modes(c, &s.initial, "gramian.initial");
            refs(c, &s.modes, "gramian.modes");
        }
        if let Some(s) = &self.support_mc {
            positive(c, "support_mc.t", s.t);
            positive(c, "support_mc.noise_dt", s.noise_dt);
            if !(s.delta > 0.0) {
                c.push("support_mc.delta", format!("must be positive, got {}", s.delta));
            }
            if s.samples == 0 {
                c.push("support_mc.samples", "must be ≥ 1");
            }
            if !(0.0..1.0).contains(&s.min_frequency) {
                c.push("support_mc.min_frequency", "must lie in [0, 1)");
            }
            modes(c, &s.initial, "support_mc.initial");
            modes(c, &s.target, "support_mc.target");
            refs(c, &s.modes, "support_mc.modes");
        }
        if let Some(s) = &self.envelope_check {
            positive(c, "envelope_check.c0", s.c0);
            if !(s.fraction > 0.0 && s.fraction < 1.0) {
                c.push("envelope_check.fraction", "must lie in (0, 1)");
            }
            if s.steps == 0 {
                c.push("envelope_check.steps", "must be ≥ 1");
            }
            for (name, list) in [("kappa0", &s.kappa0), ("p", &s.p), ("lambdas", &s.lambdas), ("x0", &s.x0)] {
                if list.is_empty() {
                    c.push(format!("envelope_check.{name}"), "must not be empty");
                }
            }
            for (i, &p) in s.p.iter().enumerate() {
                if !(p > 1.0) {
                    c.push(format!("envelope_check.p[{i}]"), format!("must exceed 1, got {p}"));
                }
            }
            for (i, &k) in s.kappa0.iter().enumerate() {
                if !(k >= 0.0) {
                    c.push(format!("envelope_check.kappa0[{i}]"), format!("must be non-negative, got {k}"));
                }
            }
            for (i, &l) in s.lambdas.iter().enumerate() {
                positive(c, &format!("envelope_check.lambdas[{i}]"), l);
            }
            for (i, &x) in s.x0.iter().enumerate() {
                if !(x >= 0.0) {
                    c.push(format!("envelope_check.x0[{i}]"), format!("must be non-negative, got {x}"));
                }
            }
        }
    }
}

impl ModelConfig {
    fn check(&self, c: &mut Collector) {
        if self.cutoff == 0 {
            c.push("model.cutoff", "cutoff must be ≥ 1");
            return;
        }
        let dim = self.name.dim();
        for (i, k) in self.controls.iter().enumerate() {
            if k.len() != dim {
                c.push(format!("model.controls[{i}]"), format!("expected {dim} components, got {}", k.len()));
            } else if k.iter().all(|x| *x == 0) {
                c.push(format!("model.controls[{i}]"), "zero wavevector");
            } else if k.iter().any(|x| x.unsigned_abs() > self.cutoff) {
                c.push(format!("model.controls[{i}]"), format!("outside the cutoff {}", self.cutoff));
            }
        }
        for (i, f) in self.force.iter().enumerate() {
            if let Err(e) = self.trig_mode(&f.mode_ref()) {
                c.push(format!("model.force[{i}]"), e);
            }
        }
        if c.0.is_empty() {
            if let Err(errs) = self.params().validate() {
                for e in errs {
                    c.push("model", e);
                }
            }
        }
    }

    /// Resolves a mode reference, rejecting modes outside the cutoff or the model's phase space.
    pub fn trig_mode(&self, r: &ModeRef) -> Result<TrigMode, String> {
        let k = WaveVector::try_new(&r.k).map_err(|e| e.to_string())?;
        let field = match (self.name, r.field) {
            (ModelKind::Rd, None) => Field::RdScalar,
            (ModelKind::Nse2d, None) => Field::Vorticity,
            (ModelKind::Euler3d, None) => Field::Velocity,
            (ModelKind::Boussinesq, None) => return Err("field (vorticity or temperature) is required".into()),
            (_, Some(f)) => f,
        };
        let parity = match (self.name, r.parity) {
            (ModelKind::Rd, None) => Parity::Sin,
            (_, Some(p)) => p,
            (_, None) => return Err("parity (cos or sin) is required".into()),
        };
        let m = TrigMode::new(k, parity, field, r.polarization).map_err(|e| e.to_string())?;
        if !lattice_modes(self.name, self.cutoff).contains(&m) {
            return Err(format!("mode {m} is not in the {:?} phase space with cutoff {}", self.name, self.cutoff));
        }
        Ok(m)
    }

    pub fn params(&self) -> ModelParams {
        let z = &self.controls;
        let p = match self.name {
            ModelKind::Rd => {
                let z: Vec<i32> = z.iter().map(|k| k[0]).collect();
                ModelParams::rd(self.cutoff, self.kappa, self.rd_coeffs.clone(), &z)
            }
            ModelKind::Nse2d => ModelParams::nse2d(self.cutoff, self.nu, &z.iter().map(|k| [k[0], k[1]]).collect::<Vec<_>>()),
            ModelKind::Boussinesq => ModelParams::boussinesq(
                self.cutoff,
                self.nu,
                self.kappa,
                self.gravity,
                &z.iter().map(|k| [k[0], k[1]]).collect::<Vec<_>>(),
            ),
            ModelKind::Euler3d => ModelParams::euler3d(self.cutoff, &z.iter().map(|k| [k[0], k[1], k[2]]).collect::<Vec<_>>()),
        };
        let force = self.force.iter().filter_map(|f| self.trig_mode(&f.mode_ref()).ok().map(|m| (m, f.value))).collect();
        p.with_force(force).with_solver(self.solver.clone())
    }

    pub fn wave_vectors(&self) -> Vec<WaveVector> {
        self.controls.iter().map(|k| WaveVector::new(k)).collect()
    }

    /// Field with the listed coefficients (modes must already be validated).
    pub fn field(&self, values: &[ModeValue]) -> SpectralField {
        let mut u = SpectralField::zeros(self.name, self.cutoff);
        let modes = u.modes();
        for v in values {
            if let Ok(m) = self.trig_mode(&v.mode_ref()) {
                if let Ok(i) = modes.binary_search(&m) {
                    u.coeffs[i] += v.value;
                }
            }
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
kind = "span_check"
[model]
name = "nse2d"
cutoff = 8
nu = 0.1
controls = [[1, 0], [1, 1]]
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.span_check, Some(SpanCheckConfig::default()));
        assert_eq!(c.seed, 0);
        assert_eq!(c.model.unwrap().solver, SolverOptions::default());
    }

    #[test]
    fn zero_cutoff_is_rejected() {
        let e = parse_config(&MINIMAL.replace("cutoff = 8", "cutoff = 0")).unwrap_err();
        assert!(e.0.iter().any(|i| i.reason == "cutoff must be ≥ 1"), "{e}");
    }

    #[test]
    fn every_problem_is_reported() {
        let text = r#"
kind = "scaling_sweep"
colour = "blue"
[model]
name = "rd"
cutoff = 16
controls = [[1], [40]]
spin = 2
[scaling_sweep]
t = -1.0
lambdas = [1.0, 3.0, 4.0]
"#;
        let e = parse_config(text).unwrap_err();
        let paths: Vec<&str> = e.0.iter().map(|i| i.path.as_str()).collect();
        assert!(paths.contains(&"colour") && paths.contains(&"model.spin"), "{e}");
        let text = text.replace("colour = \"blue\"\n", "").replace("spin = 2\n", "");
        let e = parse_config(&text).unwrap_err();
        let paths: Vec<&str> = e.0.iter().map(|i| i.path.as_str()).collect();
        assert!(paths.contains(&"model.controls[1]"), "{e}");
        assert!(paths.contains(&"scaling_sweep.t"), "{e}");
        assert!(paths.contains(&"scaling_sweep.lambdas"), "{e}");
    }

    #[test]
    fn missing_keys_are_named() {
        let e = parse_config("kind = \"reach\"\n[model]\nname = \"rd\"\n").unwrap_err();
        let paths: Vec<&str> = e.0.iter().map(|i| i.path.as_str()).collect();
        assert!(paths.contains(&"model.cutoff") && paths.contains(&"model.controls"), "{e}");
        let e = parse_config("seed = 3").unwrap_err();
        assert_eq!(e.0[0].path, "kind");
    }

    #[test]
    fn foreign_sections_are_rejected() {
        let e = parse_config(&format!("{MINIMAL}\n[reach]\nt = 1.0\n")).unwrap_err();
        assert!(e.0[0].reason.contains("does not apply"), "{e}");
    }

    #[test]
    fn modes_are_resolved_per_model() {
        let m: ModelConfig = parse_config(MINIMAL).unwrap().model.unwrap();
        let r = ModeRef { k: vec![1, 1], parity: Some(Parity::Cos), field: None, polarization: None };
        assert_eq!(m.trig_mode(&r).unwrap(), TrigMode::vorticity(1, 1, Parity::Cos));
        let far = ModeRef { k: vec![9, 0], ..r.clone() };
        assert!(m.trig_mode(&far).is_err());
        let neg = ModeRef { k: vec![-1, 0], ..r };
        assert!(m.trig_mode(&neg).is_err());
    }

    #[test]
    fn round_trip_is_lossless() {
        for kind in ExperimentKind::ALL {
            let model = (kind != ExperimentKind::EnvelopeCheck).then(|| parse_config(MINIMAL).unwrap().model.unwrap());
            let mut c = ExperimentConfig::new(kind, model);
            c.seed = 17;
            c.out = Some("runs/x".into());
            let back = parse_config(&c.to_toml());
            if let Ok(back) = back {
                assert_eq!(back, c);
                assert_eq!(back.config_hash(), c.config_hash());
            } else {
                // reach-type configs need a target; the codec itself must still be exact
                let raw: ExperimentConfig = toml::from_str(&c.to_toml()).unwrap();
                assert_eq!(raw, c);
            }
        }
    }
}
