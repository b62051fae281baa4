use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::expr::parse_expression;
use super::CliError;
use crate::forward_solver::{SpatialFn, DEFAULT_MODES, DEFAULT_NT, DEFAULT_NX};
use crate::fractional_ops::SampledFunction;
use crate::spectral_basis::{eval_eigenfunction, BasisId};
use crate::verification::{Tolerances, ORACLE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Forward,
    Backward,
    Verify,
    Selftest,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Forward => "forward",
            Mode::Backward => "backward",
            Mode::Verify => "verify",
            Mode::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Root,
    Cosine,
    Sine,
}

/// scale * X for one eigenfunction X.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisTerm {
    pub family: Family,
    #[serde(default)]
    pub k: usize,
    #[serde(default = "unit")]
    pub scale: f64,
}

fn unit() -> f64 {
    1.0
}

impl BasisTerm {
    pub fn id(&self) -> Result<BasisId, String> {
        let id = match self.family {
            Family::Root if self.k == 0 => BasisId::Root,
            Family::Root => return Err(format!("root family has only k = 0 (got k = {})", self.k)),
            Family::Cosine => BasisId::Cosine(self.k),
            Family::Sine => BasisId::Sine(self.k),
        };
        id.validate().map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "lowercase")]
pub enum FunctionDescriptor {
    Expression(String),
    /// Two columns x, value; an optional header line is skipped.
    Csv(PathBuf),
    Basis(BasisTerm),
}

impl FunctionDescriptor {
    fn check(&self) -> Result<(), String> {
        match self {
            FunctionDescriptor::Expression(text) => parse_expression(text).map(|_| ()).map_err(|e| e.to_string()),
            FunctionDescriptor::Csv(path) if path.as_os_str().is_empty() => Err("csv path is empty".into()),
            FunctionDescriptor::Csv(_) => Ok(()),
            FunctionDescriptor::Basis(term) => {
                if !term.scale.is_finite() {
                    return Err("basis scale must be finite".into());
                }
                term.id().map(|_| ())
            }
        }
    }

    /// Evaluable function; relative csv paths are taken from `base`.
    pub fn resolve(&self, base: &Path) -> Result<SpatialFn, CliError> {
        match self {
            FunctionDescriptor::Expression(text) => {
                let e = parse_expression(text).map_err(|e| CliError::Invalid(vec![e.to_string()]))?;
                Ok(Arc::new(move |x| e.eval(x)))
            }
            FunctionDescriptor::Csv(path) => {
                let full = if path.is_absolute() { path.clone() } else { base.join(path) };
                let text =
                    std::fs::read_to_string(&full).map_err(|source| CliError::Io { path: full.clone(), source })?;
                let s = read_samples(&text).map_err(|m| CliError::Input(format!("{}: {m}", full.display())))?;
                Ok(Arc::new(move |x| s.eval(x)))
            }
            FunctionDescriptor::Basis(term) => {
                let id = term.id().map_err(|m| CliError::Invalid(vec![m]))?;
                let scale = term.scale;
                Ok(Arc::new(move |x| scale * eval_eigenfunction(id, x)))
            }
        }
    }
}

fn read_samples(text: &str) -> Result<SampledFunction, String> {
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = cells.iter().map(|c| c.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => {
                xs.push(v[0]);
                vs.push(v[1]);
            }
            None if i == 0 => continue,
            _ => return Err(format!("line {}: expected two numeric columns", i + 1)),
        }
    }
    if let Some(x) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(format!("x = {x} lies outside [0, 1]"));
    }
    SampledFunction::new(xs, vs).map_err(|e| e.to_string())
}

/// Thresholds and step counts, each defaulting to the library value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSettings {
    pub pde: f64,
    pub boundary: f64,
    pub initial: f64,
    /// Floor of the heat-oracle agreement bound.
    pub oracle: f64,
    /// Relative L2 bound on u(T) - psi in backward mode.
    pub roundtrip: f64,
    /// Time steps of the DN operator in the PDE residual.
    pub verify_steps: usize,
}

impl Default for ToleranceSettings {
    fn default() -> Self {
        let t = Tolerances::default();
        Self {
            pde: t.pde,
            boundary: t.boundary,
            initial: t.initial,
            oracle: ORACLE_TOL,
            roundtrip: 1e-3,
            verify_steps: 2048,
        }
    }
}

impl ToleranceSettings {
    pub fn residual(&self) -> Tolerances {
        Tolerances { pde: self.pde, boundary: self.boundary, initial: self.initial }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub alpha0: f64,
    pub alpha1: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "N")]
    pub n_modes: usize,
    pub nx: usize,
    pub nt: usize,
    #[serde(rename = "phi", default, skip_serializing_if = "Option::is_none")]
    pub phi_spec: Option<FunctionDescriptor>,
    #[serde(rename = "psi", default, skip_serializing_if = "Option::is_none")]
    pub psi_spec: Option<FunctionDescriptor>,
    #[serde(rename = "f", default, skip_serializing_if = "Option::is_none")]
    pub f_spec: Option<FunctionDescriptor>,
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_amplification: Option<f64>,
    #[serde(default)]
    pub tolerances: ToleranceSettings,
}

pub const DEFAULT_OUTPUT_DIR: &str = "dnspectral-out";

impl RunConfig {
    /// Defaults for every field but the mode.
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            alpha0: 1.0,
            alpha1: 1.0,
            horizon: 1.0,
            n_modes: DEFAULT_MODES,
            nx: DEFAULT_NX,
            nt: DEFAULT_NT,
            phi_spec: None,
            psi_spec: None,
            f_spec: None,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            cutoff_amplification: None,
            tolerances: ToleranceSettings::default(),
        }
    }

    /// Every semantic violation, in a stable order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, a) in [("alpha0", self.alpha0), ("alpha1", self.alpha1)] {
            if !(a > 0.0 && a <= 1.0) {
                out.push(format!("{name} = {a} violates {name} ∈ (0,1]"));
            }
        }
        if self.alpha0 + self.alpha1 <= 1.0 {
            out.push(format!("alpha0 + alpha1 = {} must exceed 1", self.alpha0 + self.alpha1));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            out.push(format!("T = {} must be positive and finite", self.horizon));
        }
        if self.n_modes == 0 {
            out.push("N must be at least 1".into());
        }
        if self.nx < 4 * self.n_modes.max(2) {
            out.push(format!("nx = {} must be at least 4N = {} and at least 8", self.nx, 4 * self.n_modes.max(2)));
        }
        let min_nt = if self.mode == Mode::Verify { 64 } else { 8 };
        if self.nt < min_nt {
            out.push(format!("nt = {} must be at least {min_nt} in {} mode", self.nt, self.mode.name()));
        }
        let needs = |present: bool, what: &str, out: &mut Vec<String>| {
            if !present {
                out.push(format!("{what} is required in {} mode", self.mode.name()));
            }
        };
        match self.mode {
            Mode::Forward | Mode::Verify => needs(self.phi_spec.is_some(), "phi_spec", &mut out),
            Mode::Backward => needs(self.psi_spec.is_some(), "psi_spec", &mut out),
            Mode::Selftest => {}
        }
        if self.mode == Mode::Backward && self.f_spec.is_some() {
            out.push("f_spec is not used in backward mode; the source is the unknown".into());
        }
        for (name, spec) in [("phi_spec", &self.phi_spec), ("psi_spec", &self.psi_spec), ("f_spec", &self.f_spec)] {
            if let Some(Err(m)) = spec.as_ref().map(FunctionDescriptor::check) {
                out.push(format!("{name}: {m}"));
            }
        }
        if let Some(c) = self.cutoff_amplification {
            if !(c > 0.0) {
                out.push(format!("cutoff_amplification = {c} must be positive"));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("pde", t.pde),
            ("boundary", t.boundary),
            ("initial", t.initial),
            ("oracle", t.oracle),
            ("roundtrip", t.roundtrip),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                out.push(format!("tolerances.{name} = {v} must be positive"));
            }
        }
        if t.verify_steps == 0 {
            out.push("tolerances.verify_steps must be positive".into());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

const KEYS: [&str; 13] = [
    "mode",
    "alpha0",
    "alpha1",
    "T",
    "N",
    "nx",
    "nt",
    "phi",
    "psi",
    "f",
    "output_dir",
    "cutoff_amplification",
    "tolerances",
];

fn field<T: serde::de::DeserializeOwned>(obj: &Map<String, Value>, key: &str, errors: &mut Vec<String>) -> Option<T> {
    let v = obj.get(key)?;
    match T::deserialize(v) {
        Ok(x) => Some(x),
        Err(e) => {
            errors.push(format!("{}: {e}", spec_name(key)));
            None
        }
    }
}

fn spec_name(key: &str) -> String {
    match key {
        "phi" | "psi" | "f" => format!("{key}_spec"),
        k => k.to_string(),
    }
}

/// Parses and validates a JSON configuration, reporting every violation.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(obj) = value else {
        return Err(CliError::Invalid(vec!["configuration must be a JSON object".into()]));
    };
    let mut errors: Vec<String> =
        obj.keys().filter(|k| !KEYS.contains(&k.as_str())).map(|k| format!("unknown key \"{k}\"")).collect();
    let mode: Option<Mode> = field(&obj, "mode", &mut errors);
    if mode.is_none() && !obj.contains_key("mode") {
        errors.push("mode is required (forward, backward, verify or selftest)".into());
    }
    let mut cfg = RunConfig::new(mode.unwrap_or(Mode::Selftest));
    let solving = mode.is_some_and(|m| m != Mode::Selftest);
    for (key, slot) in [("alpha0", &mut cfg.alpha0), ("alpha1", &mut cfg.alpha1), ("T", &mut cfg.horizon)] {
        match field(&obj, key, &mut errors) {
            Some(v) => *slot = v,
            None if solving && !obj.contains_key(key) => errors.push(format!("{key} is required")),
            None => {}
        }
    }
    for (key, slot) in [("N", &mut cfg.n_modes), ("nx", &mut cfg.nx), ("nt", &mut cfg.nt)] {
        if let Some(v) = field(&obj, key, &mut errors) {
            *slot = v;
        }
    }
    cfg.phi_spec = field(&obj, "phi", &mut errors);
    cfg.psi_spec = field(&obj, "psi", &mut errors);
    cfg.f_spec = field(&obj, "f", &mut errors);
    if let Some(v) = field(&obj, "output_dir", &mut errors) {
        cfg.output_dir = v;
    }
    cfg.cutoff_amplification = field::<Option<f64>>(&obj, "cutoff_amplification", &mut errors).flatten();
    if let Some(v) = field(&obj, "tolerances", &mut errors) {
        cfg.tolerances = v;
    }
    if mode.is_some() {
        // A descriptor that failed to deserialize is already reported.
        let failed: Vec<String> = errors.iter().filter_map(|e| e.split(':').next().map(str::to_string)).collect();
        errors.extend(
            cfg.violations().into_iter().filter(|v| !failed.iter().any(|f| v.starts_with(&format!("{f} is required")))),
        );
    }
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(CliError::Invalid(errors))
    }
}
