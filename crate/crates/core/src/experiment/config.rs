//! Experiment configuration: a JSON object checked key by key against the
//! schema of its experiment kind before anything runs.

use std::fmt;
use std::path::PathBuf;

use num_complex::Complex64 as C64;
use serde_json::{Map, Value};

use crate::lindblad::{DensityTolerances, DEFAULT_NULL_TOL};
use crate::models::{LimitCycleParams, OscillatorParams, RotatorParams};
use crate::observables::Polynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Oscillator,
    LimitCycle,
    Rotators,
    ClassicalFlow,
    Conformance,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Oscillator,
        ExperimentKind::LimitCycle,
        ExperimentKind::Rotators,
        ExperimentKind::ClassicalFlow,
        ExperimentKind::Conformance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Oscillator => "oscillator",
            ExperimentKind::LimitCycle => "limit-cycle",
            ExperimentKind::Rotators => "rotators",
            ExperimentKind::ClassicalFlow => "classical-flow",
            ExperimentKind::Conformance => "conformance",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    fn schema(self) -> Schema {
        const COMMON: &[&str] = &["seed", "output_dir"];
        let rotator_params = (&["omega1", "omega2", "lambda", "l"][..], &[][..]);
        let (required, optional, params): (&[&str], &[&str], _) = match self {
            ExperimentKind::Oscillator => (
                &["params", "dim", "t_end"],
                &["sweep", "evolve", "validate", "alpha", "faq_samples"],
                Some((&["omega0", "lambda"][..], &["u"][..])),
            ),
            ExperimentKind::LimitCycle => (
                &["params", "dim"],
                &["sweep", "n_max", "stationary", "validate", "faq_samples"],
                Some((&["omega", "lambda", "mu"][..], &[][..])),
            ),
            ExperimentKind::Rotators => (
                &["params"],
                &["sweep", "stationary", "validate", "evolve", "t_end", "l0", "faq_samples"],
                Some(rotator_params),
            ),
            ExperimentKind::ClassicalFlow => (&["system", "initial_points", "t_end"], &["evolve"], None),
            ExperimentKind::Conformance => (&["params"], &["sweep", "samples"], Some(rotator_params)),
        };
        Schema { required, optional, common: COMMON, params }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

struct Schema {
    required: &'static [&'static str],
    optional: &'static [&'static str],
    common: &'static [&'static str],
    params: Option<(&'static [&'static str], &'static [&'static str])>,
}

const EVOLVE_KEYS: &[&str] = &["dt", "sample_every"];
const STATIONARY_KEYS: &[&str] = &["null_tol"];
const VALIDATE_KEYS: &[&str] = &["pos_tol"];
const SYSTEM_REQUIRED: &[&str] = &["hamiltonian"];
const SYSTEM_OPTIONAL: &[&str] = &["channels"];

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_SAMPLE_EVERY: usize = 100;
pub const DEFAULT_FAQ_SAMPLES: usize = 100;
pub const DEFAULT_CONFORMANCE_SAMPLES: usize = 50;
pub const DEFAULT_OUTPUT_DIR: &str = "runs";
pub const DEFAULT_ALPHA: [f64; 2] = [2.0, 0.0];

/// Everything wrong with a configuration, in the order found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub problems: Vec<String>,
}

impl ConfigError {
    fn one(msg: impl Into<String>) -> Self {
        ConfigError { problems: vec![msg.into()] }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config: {}", self.problems.join("; "))
    }
}

impl std::error::Error for ConfigError {}

/// Numeric settings after defaults are filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub dim: Option<usize>,
    pub n_max: Option<usize>,
    pub t_end: Option<f64>,
    pub dt: f64,
    pub sample_every: usize,
    pub null_tol: f64,
    pub pos_tol: f64,
    pub alpha: C64,
    pub faq_samples: usize,
    pub samples: usize,
    pub l0: Option<[f64; 3]>,
}

/// Polynomial system for a `classical-flow` run.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSystem {
    pub hamiltonian: Polynomial,
    pub channels: Vec<Polynomial>,
    pub initial_points: Vec<Vec<C64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Model parameters as given; sweeps override entries per grid point.
    pub params: Map<String, Value>,
    pub settings: Settings,
    pub system: Option<FlowSystem>,
    /// Grid axes in key order; the grid is their Cartesian product.
    pub sweep: Vec<(String, Vec<f64>)>,
    raw: Map<String, Value>,
}

struct Checker {
    problems: Vec<String>,
}

impl Checker {
    fn keys(&mut self, obj: &Map<String, Value>, path: &str, required: &[&str], optional: &[&str]) {
        for k in required {
            if !obj.contains_key(*k) {
                self.problems.push(format!("missing key `{}`", join(path, k)));
            }
        }
        for k in obj.keys() {
            if !required.contains(&k.as_str()) && !optional.contains(&k.as_str()) {
                self.problems.push(format!("unknown key `{}`", join(path, k)));
            }
        }
    }

    fn object<'a>(&mut self, v: Option<&'a Value>, path: &str) -> Option<&'a Map<String, Value>> {
        match v? {
            Value::Object(m) => Some(m),
            _ => {
                self.problems.push(format!("`{path}` must be an object"));
                None
            }
        }
    }

    fn number(&mut self, v: Option<&Value>, path: &str) -> Option<f64> {
        match v?.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.problems.push(format!("`{path}` must be a finite number"));
                None
            }
        }
    }

    fn count(&mut self, v: Option<&Value>, path: &str) -> Option<usize> {
        match v?.as_u64() {
            Some(x) => Some(x as usize),
            None => {
                self.problems.push(format!("`{path}` must be a non-negative integer"));
                None
            }
        }
    }

    fn positive(&mut self, v: Option<f64>, path: &str) -> Option<f64> {
        match v {
            Some(x) if x <= 0.0 => {
                self.problems.push(format!("`{path}` must be positive, got {x}"));
                None
            }
            other => other,
        }
    }

    fn complex(&mut self, v: &Value, path: &str) -> Option<C64> {
        match v.as_array().map(|a| a.as_slice()) {
            Some([re, im]) => Some(C64::new(self.number(Some(re), path)?, self.number(Some(im), path)?)),
            _ => {
                self.problems.push(format!("`{path}` must be a [re, im] pair"));
                None
            }
        }
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self, ConfigError> {
        let v: Value = serde_json::from_str(s).map_err(|e| ConfigError::one(format!("not valid JSON: {e}")))?;
        Self::from_value(v)
    }

    pub fn from_value(v: Value) -> Result<Self, ConfigError> {
        let Value::Object(raw) = v else {
            return Err(ConfigError::one("config must be a JSON object"));
        };
        let kind = match raw.get("experiment") {
            None => return Err(ConfigError::one("missing key `experiment`")),
            Some(Value::String(s)) => ExperimentKind::from_name(s).ok_or_else(|| {
                let known: Vec<_> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                ConfigError::one(format!("unknown experiment kind `{s}` in key `experiment` (expected one of {})", known.join(", ")))
            })?,
            Some(_) => return Err(ConfigError::one("`experiment` must be a string")),
        };
        let schema = kind.schema();
        let mut c = Checker { problems: Vec::new() };
        let optional: Vec<&str> = schema.optional.iter().chain(schema.common).chain(&["experiment"]).copied().collect();
        c.keys(&raw, "", schema.required, &optional);

        let seed = raw.get("seed").and_then(|v| {
            let s = v.as_u64();
            if s.is_none() {
                c.problems.push("`seed` must be a non-negative integer".into());
            }
            s
        });
        let output_dir = match raw.get("output_dir") {
            None => None,
            Some(Value::String(s)) => Some(PathBuf::from(s)),
            Some(_) => {
                c.problems.push("`output_dir` must be a string".into());
                None
            }
        };

        let mut params = Map::new();
        if let Some((req, opt)) = schema.params {
            if let Some(p) = c.object(raw.get("params"), "params") {
                c.keys(p, "params", req, opt);
                for (k, v) in p {
                    c.number(Some(v), &format!("params.{k}"));
                }
                params = p.clone();
            }
        }

        let evolve = c.object(raw.get("evolve"), "evolve");
        if let Some(e) = evolve {
            c.keys(e, "evolve", &[], EVOLVE_KEYS);
        }
        let stationary = c.object(raw.get("stationary"), "stationary");
        if let Some(s) = stationary {
            c.keys(s, "stationary", &[], STATIONARY_KEYS);
        }
        let validate = c.object(raw.get("validate"), "validate");
        if let Some(v) = validate {
            c.keys(v, "validate", &[], VALIDATE_KEYS);
        }

        let dt = c.number(evolve.and_then(|e| e.get("dt")), "evolve.dt");
        let dt = c.positive(dt, "evolve.dt").unwrap_or(DEFAULT_DT);
        let sample_every = c.count(evolve.and_then(|e| e.get("sample_every")), "evolve.sample_every");
        let null_tol = c.number(stationary.and_then(|s| s.get("null_tol")), "stationary.null_tol");
        let pos_tol = c.number(validate.and_then(|v| v.get("pos_tol")), "validate.pos_tol");
        let t_end = c.number(raw.get("t_end"), "t_end");
        if matches!(t_end, Some(t) if t < 0.0) {
            c.problems.push("`t_end` must be non-negative".into());
        }
        let alpha = raw.get("alpha").and_then(|v| c.complex(v, "alpha"));
        let l0 = raw.get("l0").and_then(|v| match v.as_array().map(|a| a.as_slice()) {
            Some([x, y, z]) => Some([c.number(Some(x), "l0")?, c.number(Some(y), "l0")?, c.number(Some(z), "l0")?]),
            _ => {
                c.problems.push("`l0` must be an [lx, ly, lz] triple".into());
                None
            }
        });

        let settings = Settings {
            dim: c.count(raw.get("dim"), "dim"),
            n_max: c.count(raw.get("n_max"), "n_max"),
            t_end,
            dt,
            sample_every: sample_every.unwrap_or(DEFAULT_SAMPLE_EVERY).max(1),
            null_tol: c.positive(null_tol, "stationary.null_tol").unwrap_or(DEFAULT_NULL_TOL),
            pos_tol: c.positive(pos_tol, "validate.pos_tol").unwrap_or(DensityTolerances::default().positivity),
            alpha: alpha.unwrap_or(C64::new(DEFAULT_ALPHA[0], DEFAULT_ALPHA[1])),
            faq_samples: c.count(raw.get("faq_samples"), "faq_samples").unwrap_or(DEFAULT_FAQ_SAMPLES),
            samples: c.count(raw.get("samples"), "samples").unwrap_or(DEFAULT_CONFORMANCE_SAMPLES),
            l0,
        };
        if settings.faq_samples == 0 {
            c.problems.push("`faq_samples` must be at least 1".into());
        }
        if raw.contains_key("samples") && settings.samples == 0 {
            c.problems.push("`samples` must be at least 1".into());
        }

        let system = if kind == ExperimentKind::ClassicalFlow { flow_system(&mut c, &raw) } else { None };

        let mut sweep = Vec::new();
        if let Some(s) = c.object(raw.get("sweep"), "sweep") {
            let allowed: Vec<&str> = schema.params.map(|(r, o)| r.iter().chain(o).copied().collect()).unwrap_or_default();
            if s.is_empty() {
                c.problems.push("`sweep` must name at least one parameter".into());
            }
            for (k, v) in s {
                let path = format!("sweep.{k}");
                if !allowed.contains(&k.as_str()) {
                    c.problems.push(format!("unknown key `{path}` (sweeps range over params)"));
                    continue;
                }
                match v.as_array() {
                    Some(vals) if !vals.is_empty() => {
                        let nums: Vec<f64> = vals.iter().filter_map(|x| c.number(Some(x), &path)).collect();
                        sweep.push((k.clone(), nums));
                    }
                    _ => c.problems.push(format!("`{path}` must be a non-empty array of numbers")),
                }
            }
        }

        if !c.problems.is_empty() {
            return Err(ConfigError { problems: c.problems });
        }
        let cfg = ExperimentConfig { kind, seed: seed.unwrap_or(0), output_dir, params, settings, system, sweep, raw };
        cfg.check_values()?;
        Ok(cfg)
    }

    /// Range checks that need the typed model records, at the base point
    /// and at every grid point.
    fn check_values(&self) -> Result<(), ConfigError> {
        let mut problems = Vec::new();
        for point in self.grid() {
            let params = self.params_at(&point);
            if let Err(e) = check_model(self.kind, &params, &self.settings) {
                let at = if point.is_empty() { String::new() } else { format!(" at sweep point {}", describe(&point)) };
                let msg = format!("{e}{at}");
                if !problems.contains(&msg) {
                    problems.push(msg);
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { problems })
        }
    }

    /// The grid points of the sweep, empty when there is no sweep.
    pub fn grid(&self) -> Vec<Vec<(String, f64)>> {
        let mut out: Vec<Vec<(String, f64)>> = vec![Vec::new()];
        for (name, values) in &self.sweep {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push((name.clone(), *v));
                        p
                    })
                })
                .collect();
        }
        out
    }

    pub fn params_at(&self, point: &[(String, f64)]) -> Map<String, Value> {
        let mut p = self.params.clone();
        for (k, v) in point {
            p.insert(k.clone(), Value::from(*v));
        }
        p
    }

    /// The configuration as given, with the seed override applied.
    pub fn effective(&self) -> Value {
        let mut raw = self.raw.clone();
        raw.insert("seed".into(), Value::from(self.seed));
        Value::Object(raw)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

fn describe(point: &[(String, f64)]) -> String {
    point.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join(", ")
}

fn flow_system(c: &mut Checker, raw: &Map<String, Value>) -> Option<FlowSystem> {
    let sys = c.object(raw.get("system"), "system")?;
    c.keys(sys, "system", SYSTEM_REQUIRED, SYSTEM_OPTIONAL);
    let h_text = match sys.get("hamiltonian") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => {
            c.problems.push("`system.hamiltonian` must be a string".into());
            return None;
        }
        None => return None,
    };
    let r_texts: Vec<String> = match sys.get("channels") {
        None => Vec::new(),
        Some(Value::Array(a)) if a.iter().all(Value::is_string) => {
            a.iter().map(|v| v.as_str().expect("checked").to_string()).collect()
        }
        Some(_) => {
            c.problems.push("`system.channels` must be an array of strings".into());
            return None;
        }
    };
    let points_v = match raw.get("initial_points") {
        Some(Value::Array(a)) if !a.is_empty() => a,
        Some(_) => {
            c.problems.push("`initial_points` must be a non-empty array of points".into());
            return None;
        }
        None => return None,
    };
    let mut points = Vec::new();
    for (i, p) in points_v.iter().enumerate() {
        let path = format!("initial_points[{i}]");
        match p.as_array() {
            Some(coords) if !coords.is_empty() => {
                let z: Vec<C64> = coords.iter().filter_map(|v| c.complex(v, &path)).collect();
                if z.len() == coords.len() {
                    points.push(z);
                }
            }
            _ => c.problems.push(format!("`{path}` must be a non-empty array of [re, im] pairs")),
        }
    }
    let modes = points.first().map_or(1, Vec::len);
    if points.iter().any(|p| p.len() != modes) {
        c.problems.push("all `initial_points` must have the same number of modes".into());
        return None;
    }
    let parse = |c: &mut Checker, text: &str, path: &str| match Polynomial::parse_with_modes(text, modes) {
        Ok(p) => Some(p),
        Err(e) => {
            c.problems.push(format!("`{path}`: {e}"));
            None
        }
    };
    let hamiltonian = parse(c, &h_text, "system.hamiltonian");
    let channels: Vec<Option<Polynomial>> =
        r_texts.iter().enumerate().map(|(i, t)| parse(c, t, &format!("system.channels[{i}]"))).collect();
    let channels = channels.into_iter().collect::<Option<Vec<_>>>()?;
    Some(FlowSystem { hamiltonian: hamiltonian?, channels, initial_points: points })
}

fn check_model(kind: ExperimentKind, params: &Map<String, Value>, s: &Settings) -> crate::Result<()> {
    use crate::Error;
    match kind {
        ExperimentKind::Oscillator => {
            typed::<OscillatorParams>(params)?.validate()?;
            if s.dim.unwrap_or(0) < 2 {
                return Err(Error::InvalidParameter("`dim` must be at least 2".into()));
            }
        }
        ExperimentKind::LimitCycle => {
            let p = typed::<LimitCycleParams>(params)?;
            p.validate()?;
            if p.lambda <= 0.0 {
                return Err(Error::InvalidParameter("limit-cycle runs need lambda > 0 (nu = lambda / mu)".into()));
            }
            if s.dim.unwrap_or(0) < crate::models::limit_cycle::MIN_LIMIT_CYCLE_DIM {
                return Err(Error::InvalidParameter(format!(
                    "`dim` must be at least {}",
                    crate::models::limit_cycle::MIN_LIMIT_CYCLE_DIM
                )));
            }
        }
        ExperimentKind::Rotators | ExperimentKind::Conformance => {
            let p = typed::<RotatorParams>(params)?;
            p.validate()?;
            if p.l < 1.0 {
                return Err(Error::InvalidParameter(format!("`params.l` must be at least 1, got {}", p.l)));
            }
            if kind == ExperimentKind::Rotators && p.l > crate::models::closure::MAX_EXACT_L {
                return Err(Error::InvalidParameter(format!(
                    "`params.l` must be at most {} for the exact stationary solve",
                    crate::models::closure::MAX_EXACT_L
                )));
            }
        }
        ExperimentKind::ClassicalFlow => {}
    }
    if matches!(kind, ExperimentKind::Oscillator | ExperimentKind::ClassicalFlow) && s.t_end.is_none() {
        return Err(Error::InvalidParameter("missing key `t_end`".into()));
    }
    Ok(())
}

pub(crate) fn typed<T: serde::de::DeserializeOwned>(params: &Map<String, Value>) -> crate::Result<T> {
    serde_json::from_value(Value::Object(params.clone()))
        .map_err(|e| crate::Error::InvalidParameter(format!("params: {e}")))
}
