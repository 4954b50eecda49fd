//! TOML study configuration.
//!
//! Every key is optional; omitted keys take the values of the default
//! simulation design. Schema:
//!
//! ```toml
//! base_seed = 1
//! replications = 200
//! first_replication = 0
//! sample_sizes = [50, 100, 500, 2000]
//! parallel = true
//!
//! [model]
//! b = [[3.0, 0.0, ...], ...]      # q rows of p coefficients
//! sigma = { ar1 = 0.5 }           # or { identity = s } or a full matrix
//! noise_cov = { identity = 0.5 }  # same forms as sigma
//!
//! [penalty]
//! f_rate = 0.25
//! f_shape = "inverse"             # inverse | inverse-sqrt | pow:<a>
//! g_rate = 0.75
//! g_shape = "linear"              # linear | sqrt | quadratic | pow:<b>
//! penalty_arg = "rank"            # rank | label
//! psi_scale = "squared"           # squared | norm
//!
//! [probe]
//! sample_sizes = [250, 1000, 4000]
//! replications = 50
//! subset = [1, 4, 7]
//! ```

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::Deserialize;
use thiserror::Error;

use crate::covariance::{
    ar1_covariance, default_coefficients, identity_scaled, CovError, PopulationModel,
};
use crate::selection::{
    DecreasingShape, IncreasingShape, PenaltyArg, PenaltySchedule, PsiScale, SelectionError,
};
use crate::simulation::SimulationConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config syntax: {0}")]
    Syntax(String),

    #[error("config field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawFile {
    base_seed: Option<u64>,
    replications: Option<usize>,
    first_replication: Option<u64>,
    sample_sizes: Option<Vec<usize>>,
    parallel: Option<bool>,
    #[serde(default)]
    model: RawModel,
    #[serde(default)]
    penalty: RawPenalty,
    #[serde(default)]
    probe: RawProbe,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawModel {
    b: Option<Vec<Vec<f64>>>,
    sigma: Option<MatrixSpec>,
    noise_cov: Option<MatrixSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MatrixSpec {
    Full(Vec<Vec<f64>>),
    Ar1 { ar1: f64 },
    Identity { identity: f64 },
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawPenalty {
    f_rate: Option<f64>,
    f_shape: Option<DecreasingShape>,
    g_rate: Option<f64>,
    g_shape: Option<IncreasingShape>,
    penalty_arg: Option<PenaltyArg>,
    psi_scale: Option<PsiScale>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawProbe {
    sample_sizes: Option<Vec<usize>>,
    replications: Option<usize>,
    subset: Option<Vec<usize>>,
}

/// Settings for the convergence probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSettings {
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub subset: Vec<usize>,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self {
            sample_sizes: vec![250, 1000, 4000],
            replications: 50,
            subset: vec![1, 4, 7],
        }
    }
}

/// A parsed configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFile {
    pub simulation: SimulationConfig,
    pub probe: ProbeSettings,
}

fn rows_to_matrix(field: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>, ConfigError> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(field_err(field, "matrix is empty"));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
        return Err(field_err(
            format!("{field}[{i}]"),
            format!("row has {} entries, expected {ncols}", rows[i].len()),
        ));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn spec_to_matrix(field: &str, spec: &MatrixSpec, dim: usize) -> Result<DMatrix<f64>, ConfigError> {
    match spec {
        MatrixSpec::Full(rows) => rows_to_matrix(field, rows),
        MatrixSpec::Ar1 { ar1 } => {
            if !(ar1.abs() < 1.0) {
                return Err(field_err(format!("{field}.ar1"), "must lie in (-1, 1)"));
            }
            Ok(ar1_covariance(dim, *ar1))
        }
        MatrixSpec::Identity { identity } => Ok(identity_scaled(dim, *identity)),
    }
}

fn model_error(e: CovError) -> ConfigError {
    let field = match &e {
        CovError::NotSymmetric { matrix, .. }
        | CovError::NotPositiveDefinite { matrix }
        | CovError::NotPositiveSemiDefinite { matrix }
        | CovError::NonFinite { matrix, .. } => format!("model.{matrix}"),
        CovError::DimensionMismatch { what, .. } => format!("model.{what}"),
        _ => "model".to_string(),
    };
    field_err(field, e)
}

fn build_model(raw: &RawModel) -> Result<PopulationModel, ConfigError> {
    let b = match &raw.b {
        Some(rows) => rows_to_matrix("model.b", rows)?,
        None => default_coefficients(),
    };
    let (q, p) = b.shape();
    let sigma = match &raw.sigma {
        Some(spec) => spec_to_matrix("model.sigma", spec, p)?,
        None => ar1_covariance(p, 0.5),
    };
    let noise = match &raw.noise_cov {
        Some(spec) => spec_to_matrix("model.noise_cov", spec, q)?,
        None => identity_scaled(q, 0.5),
    };
    PopulationModel::new(b, sigma, noise).map_err(model_error)
}

fn build_penalty(raw: &RawPenalty, p: usize) -> Result<PenaltySchedule, ConfigError> {
    let d = PenaltySchedule::default();
    let f_rate = raw.f_rate.unwrap_or(d.f_rate());
    if !(f_rate > 0.0 && f_rate < 0.5) {
        return Err(field_err("penalty.f_rate", format!("must lie in (0, 1/2), got {f_rate}")));
    }
    let g_rate = raw.g_rate.unwrap_or(d.g_rate());
    if !(g_rate > 0.0 && g_rate < 1.0) {
        return Err(field_err("penalty.g_rate", format!("must lie in (0, 1), got {g_rate}")));
    }
    let pen = PenaltySchedule::new(
        f_rate,
        raw.f_shape.unwrap_or(d.f_shape()),
        g_rate,
        raw.g_shape.unwrap_or(d.g_shape()),
    )
    .map_err(|e| field_err("penalty", e))?
    .with_penalty_arg(raw.penalty_arg.unwrap_or(d.penalty_arg()))
    .with_psi_scale(raw.psi_scale.unwrap_or(d.psi_scale()));
    pen.validate(p).map_err(|e: SelectionError| field_err("penalty", e))?;
    Ok(pen)
}

/// Parses a configuration document.
pub fn parse_run_file(text: &str) -> Result<RunFile, ConfigError> {
    let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let raw: RawFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        field_err(field, e.into_inner().message())
    })?;

    let model = build_model(&raw.model)?;
    let p = model.p();
    let pen = build_penalty(&raw.penalty, p)?;

    let defaults = SimulationConfig::default();
    let simulation = SimulationConfig {
        model,
        sample_sizes: raw.sample_sizes.unwrap_or(defaults.sample_sizes),
        replications: raw.replications.unwrap_or(defaults.replications),
        first_replication: raw.first_replication.unwrap_or(defaults.first_replication),
        pen,
        base_seed: raw.base_seed.unwrap_or(defaults.base_seed),
        parallel: raw.parallel.unwrap_or(defaults.parallel),
    };
    if simulation.replications == 0 {
        return Err(field_err("replications", "must be at least 1"));
    }
    if simulation.sample_sizes.is_empty() {
        return Err(field_err("sample_sizes", "must not be empty"));
    }
    if let Some(i) = simulation.sample_sizes.iter().position(|&n| n < p + 2) {
        return Err(field_err(
            format!("sample_sizes[{i}]"),
            format!("must be at least p + 2 = {}", p + 2),
        ));
    }

    let pd = ProbeSettings::default();
    let probe = ProbeSettings {
        sample_sizes: raw.probe.sample_sizes.unwrap_or(pd.sample_sizes),
        replications: raw.probe.replications.unwrap_or(pd.replications),
        subset: raw.probe.subset.unwrap_or(pd.subset),
    };
    if probe.replications == 0 {
        return Err(field_err("probe.replications", "must be at least 1"));
    }
    if let Some(i) = probe.sample_sizes.iter().position(|&n| n < 2) {
        return Err(field_err(format!("probe.sample_sizes[{i}]"), "must be at least 2"));
    }
    Ok(RunFile { simulation, probe })
}

pub fn load_run_file(path: impl AsRef<Path>) -> Result<RunFile, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_run_file(&text)
}

pub fn load_simulation_config(path: impl AsRef<Path>) -> Result<SimulationConfig, ConfigError> {
    Ok(load_run_file(path)?.simulation)
}
