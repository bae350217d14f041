//! Sampling harness and report formats behind the `submanifold` command.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod report;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use submanifold::catalog;
use submanifold::dsl::parse_embedding_bytes;
use submanifold::geometry::{Corruption, GeometryError};
use submanifold::{analyze_point, AnalysisOptions, EmbeddingMap};
use thiserror::Error;

pub use report::{emit_report, Aggregate, ConfigEcho, PointRecord, ResidualReport, ResidualStats, Verdict};

/// Above this fraction of skipped points the verdict becomes `degenerate`.
pub const MAX_SKIPPED_FRACTION: f64 = 0.2;

pub const ENV_JOBS: &str = "SUBMANIFOLD_JOBS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}: {source}")]
    Parse { origin: String, source: submanifold::dsl::ParseError },
    #[error("unknown catalog entry `{0}` (try `submanifold catalog list`)")]
    UnknownEntry(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    File(PathBuf),
    Catalog(String),
}

impl FromStr for Input {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.strip_prefix("catalog:") {
            Some(name) => Input::Catalog(name.to_string()),
            None => Input::File(PathBuf::from(s)),
        })
    }
}

impl fmt::Display for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Input::File(path) => write!(f, "{}", path.display()),
            Input::Catalog(name) => write!(f, "catalog:{name}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Input,
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
    pub corruption: Option<Corruption>,
    pub format: Format,
    /// Worker threads; 0 picks one per core.
    pub jobs: usize,
}

impl RunConfig {
    pub fn new(input: Input) -> RunConfig {
        RunConfig { input, points: 100, seed: 0, tol: 1e-7, corruption: None, format: Format::Text, jobs: 0 }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.points == 0 {
            return Err(CliError::Config("--points must be at least 1".into()));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(CliError::Config(format!("--tol must be positive and finite, got {}", self.tol)));
        }
        if let Some(c) = &self.corruption {
            if !(c.magnitude >= 0.0) {
                return Err(CliError::Config(format!("corruption magnitude must be ≥ 0, got {}", c.magnitude)));
            }
        }
        Ok(())
    }
}

/// `--jobs` wins; otherwise `SUBMANIFOLD_JOBS`; otherwise automatic.
pub fn resolve_jobs(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(jobs) = flag {
        return Ok(jobs);
    }
    match std::env::var(ENV_JOBS) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Config(format!("{ENV_JOBS} must be a count, got `{v}`"))),
        Err(_) => Ok(0),
    }
}

pub fn load_map(input: &Input) -> Result<EmbeddingMap, CliError> {
    match input {
        Input::Catalog(name) => {
            let entry = catalog::find(name).ok_or_else(|| CliError::UnknownEntry(name.clone()))?;
            Ok(entry.parse())
        }
        Input::File(path) => {
            let bytes = std::fs::read(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            parse_embedding_bytes(&bytes)
                .map_err(|source| CliError::Parse { origin: path.display().to_string(), source })
        }
    }
}

/// `count` points uniform in the open chart box, reproducible from `seed`.
pub fn sample_points(map: &EmbeddingMap, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            map.domain
                .iter()
                .map(|iv| loop {
                    let x = rng.gen_range(iv.lo..iv.hi);
                    if iv.contains_open(x) {
                        break x;
                    }
                })
                .collect()
        })
        .collect()
}

/// Outcome at one sample point.
fn evaluate(map: &EmbeddingMap, point: Vec<f64>, options: &AnalysisOptions) -> PointRecord {
    match analyze_point(map, &point, options) {
        Ok(geo) => PointRecord::evaluated(point, &geo.residuals),
        Err(err @ GeometryError::Frame(_)) if err.is_degenerate() => PointRecord::degenerate(point, err.to_string()),
        Err(err) => PointRecord::failed(point, err.to_string()),
    }
}

pub fn run_verification(config: &RunConfig) -> Result<ResidualReport, CliError> {
    config.validate()?;
    let map = load_map(&config.input)?;
    run_on_map(&map, config)
}

/// Samples, evaluates (in parallel) and assembles the report for `map`.
pub fn run_on_map(map: &EmbeddingMap, config: &RunConfig) -> Result<ResidualReport, CliError> {
    config.validate()?;
    let points = sample_points(map, config.points, config.seed);
    let options = AnalysisOptions { corruption: config.corruption, ..Default::default() };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", config.jobs)))?;
    // collect keeps sample order, so the reduction below is independent of scheduling
    let records: Vec<PointRecord> =
        pool.install(|| points.into_par_iter().map(|p| evaluate(map, p, &options)).collect());
    Ok(ResidualReport::assemble(map, config, records))
}
