//! Variable selection for multivariate linear regression with random
//! design, driven by a covariance criterion.
//!
//! For a subset `K` of predictors the criterion `xi_K` measures how much of
//! the predictor/response cross-covariance is left unexplained once the
//! predictors in `K` are accounted for. It vanishes exactly when `K` holds
//! every relevant predictor. Plugging in empirical covariances and ranking
//! penalized leave-one-out and nested-prefix scores yields a consistent
//! estimate of the relevant set.
//!
//! - [`covariance`]: data and model types, covariance estimation, the subset
//!   projector and the criterion.
//! - [`selection`]: penalty schedules and the selection pipeline.
//! - [`simulation`]: Gaussian data generation, least-squares refits and
//!   seeded Monte Carlo studies.
//! - [`io`]: dataset CSV, study configuration and reports.

pub mod covariance;
pub mod io;
pub mod selection;
pub mod simulation;

pub use covariance::{
    criterion, empirical_covariances, population_covariances, projector, relevant_set, CovError,
    CovarianceSuite, Dataset, PopulationModel, Provenance, VariableSubset,
};
pub use selection::{select_variables, PenaltySchedule, SelectionError, SelectionResult};
pub use simulation::{SimulationConfig, SimulationError, StudySummary};
