//! Synthetic data, least-squares refits and seeded Monte Carlo studies.

mod ols;
mod probe;
mod sampling;
pub mod seed;
mod study;

use thiserror::Error;

use crate::covariance::CovError;
use crate::selection::SelectionError;

pub use ols::{ols_fit, prediction_error, LinearFit};
pub use probe::{convergence_probe, ProbeRow, ProbeTable};
pub use sampling::{sample_dataset, GaussianDesign};
pub use study::{
    median, run_records, run_replication, run_study, summarize, FailedReplication, FailureReason,
    ReplicationOutcome, ReplicationRecord, SimulationConfig, StudySummary, SummaryRow,
    MAX_FAILURE_RATE,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("could not factor {0}")]
    Factorization(&'static str),

    #[error(transparent)]
    Data(#[from] CovError),

    #[error(transparent)]
    Selection(#[from] SelectionError),

    #[error("design matrix on variables {subset:?} is singular (condition number {condition:e})")]
    SingularDesign { subset: Vec<usize>, condition: f64 },

    #[error("fit does not match data: {0}")]
    FitShape(String),

    #[error("{failed} of {total} replications failed, above the {max_rate} limit")]
    TooManyFailures {
        failed: usize,
        total: usize,
        max_rate: f64,
    },
}
