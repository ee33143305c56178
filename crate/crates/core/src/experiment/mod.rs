//! Batch experiments driven by a JSON config.
//!
//! A run builds the model named by `experiment`, writes its CSV tables,
//! a `summary.json` of headline scalars and a `manifest.json` echoing the
//! config and every tolerance in effect into a directory named by the
//! config hash. Outputs depend only on the config and seed.

mod config;
mod kinds;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub use config::{
    ConfigError, ExperimentConfig, ExperimentKind, FlowSystem, Settings, DEFAULT_ALPHA, DEFAULT_CONFORMANCE_SAMPLES,
    DEFAULT_DT, DEFAULT_FAQ_SAMPLES, DEFAULT_OUTPUT_DIR, DEFAULT_SAMPLE_EVERY,
};
pub use kinds::FAQ_TOL;

use crate::table::{fmt_num, Table};
use crate::Error;

/// Headline scalars of one run or grid point, keyed by name.
pub type Summary = BTreeMap<String, f64>;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ExperimentError {
    /// 1 for anything wrong with the input, 2 when the numerics fail.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

impl From<Error> for ExperimentError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::Parse { .. }
            | Error::DegreeTooHigh { .. }
            | Error::ModeMismatch { .. }
            | Error::BadMode { .. }
            | Error::Json(_) => ExperimentError::Config(ConfigError { problems: vec![e.to_string()] }),
            other => ExperimentError::Numerical(other),
        }
    }
}

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub summary: Summary,
    /// File names written, sorted.
    pub files: Vec<String>,
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let text = fs::read_to_string(path).map_err(|source| ExperimentError::Io { path: path.to_path_buf(), source })?;
    Ok(ExperimentConfig::from_json_str(&text)?)
}

/// Files and scalars produced by one experiment before anything is written.
#[derive(Debug, Clone, Default)]
pub struct Outputs {
    pub summary: Summary,
    pub files: Vec<(String, String)>,
}

/// Runs the experiment in memory: the base run with its tables, then every
/// sweep point (concurrently, on the current rayon pool) into `sweep.csv`.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outputs, ExperimentError> {
    let mut out = kinds::run(cfg, &cfg.params, true)?;
    if !cfg.sweep.is_empty() {
        out.files.push(("sweep.csv".into(), sweep_table(cfg)?.to_csv_string()?));
    }
    out.files.sort();
    Ok(out)
}

fn sweep_table(cfg: &ExperimentConfig) -> Result<Table, ExperimentError> {
    use rayon::prelude::*;
    let grid = cfg.grid();
    let rows: Vec<Summary> = grid
        .par_iter()
        .map(|point| kinds::run(cfg, &cfg.params_at(point), false).map(|o| o.summary))
        .collect::<Result<_, _>>()?;
    let axes: Vec<&str> = cfg.sweep.iter().map(|(k, _)| k.as_str()).collect();
    let keys: Vec<&String> = rows[0].keys().collect();
    let mut table = Table::new(axes.iter().map(|a| a.to_string()).chain(keys.iter().map(|k| k.to_string())));
    for (point, row) in grid.iter().zip(&rows) {
        let mut cells: Vec<String> = point.iter().map(|(_, v)| fmt_num(*v)).collect();
        cells.extend(keys.iter().map(|k| fmt_num(row[*k])));
        table.push(cells);
    }
    Ok(table)
}

/// First 16 hex digits of the SHA-256 of the canonical (key-sorted,
/// compact) effective config, without `output_dir`.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let mut v = cfg.effective();
    if let Value::Object(m) = &mut v {
        m.remove("output_dir");
    }
    let digest = Sha256::digest(v.to_string().as_bytes());
    hex::encode(&digest[..8])
}

/// Every tolerance and step in effect, under dotted names.
pub fn tolerances(cfg: &ExperimentConfig) -> Map<String, Value> {
    use crate::lindblad::{DensityTolerances, EvolveOptions, StationaryOptions};
    use crate::models::{conformance::CONFORMANCE_TOL, limit_cycle};
    let s = &cfg.settings;
    let density = DensityTolerances { positivity: s.pos_tol, ..DensityTolerances::default() };
    let stationary = StationaryOptions { null_tol: s.null_tol, positivity: s.pos_tol, ..StationaryOptions::default() };
    let evolve = EvolveOptions::new(s.dt);
    let entries: [(&str, Value); 14] = [
        ("evolve.dt", s.dt.into()),
        ("evolve.sample_every", s.sample_every.into()),
        ("evolve.abort_positivity", evolve.abort_positivity.into()),
        ("stationary.null_tol", stationary.null_tol.into()),
        ("stationary.residual_tol", stationary.residual_tol.into()),
        ("stationary.positivity", stationary.positivity.into()),
        ("validate.pos_tol", density.positivity.into()),
        ("validate.hermiticity_tol", density.hermiticity.into()),
        ("validate.trace_tol", density.trace.into()),
        ("faq.tol", FAQ_TOL.into()),
        ("faq.sample_radius", crate::faq::DEFAULT_SAMPLE_RADIUS.into()),
        ("recurrence.tail_ratio", limit_cycle::TAIL_RATIO.into()),
        ("kummer.max_arg", limit_cycle::KUMMER_MAX_ARG.into()),
        ("conformance.tol", CONFORMANCE_TOL.into()),
    ];
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn write_file(path: PathBuf, contents: &str) -> Result<(), ExperimentError> {
    fs::write(&path, contents).map_err(|source| ExperimentError::Io { path, source })
}

/// Runs `cfg` and writes its run directory.
pub fn run(cfg: ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome, ExperimentError> {
    let cfg = match opts.seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    };
    let base = opts.output_dir.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| DEFAULT_OUTPUT_DIR.into());
    let dir = base.join(format!("{}-{}", cfg.kind, config_hash(&cfg)));
    let out = execute(&cfg)?;

    fs::create_dir_all(&dir).map_err(|source| ExperimentError::Io { path: dir.clone(), source })?;
    let mut files: Vec<String> = out.files.iter().map(|(n, _)| n.clone()).collect();
    files.extend(["manifest.json".to_string(), "summary.json".to_string()]);
    files.sort();
    for (name, contents) in &out.files {
        write_file(dir.join(name), contents)?;
    }

    let mut summary = Map::new();
    summary.insert("experiment".into(), cfg.kind.name().into());
    summary.insert("seed".into(), cfg.seed.into());
    for (k, v) in &out.summary {
        summary.insert(k.clone(), json!(v));
    }
    let manifest = json!({
        "experiment": cfg.kind.name(),
        "seed": cfg.seed,
        "config_hash": config_hash(&cfg),
        "config": cfg.effective(),
        "tolerances": tolerances(&cfg),
        "files": files,
        "version": env!("CARGO_PKG_VERSION"),
    });
    write_file(dir.join("summary.json"), &pretty(&Value::Object(summary)))?;
    write_file(dir.join("manifest.json"), &pretty(&manifest))?;
    Ok(RunOutcome { dir, summary: out.summary, files })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}
