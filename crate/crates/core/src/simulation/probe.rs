use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::GaussianDesign;
use super::seed::{derive_seed, STREAM_PROBE};
use super::study::median;
use super::SimulationError;
use crate::covariance::{
    criterion, empirical_covariances, population_covariances, PopulationModel, VariableSubset,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: usize,
    pub median_sqrt_n_criterion: f64,
    pub median_criterion: f64,
}

/// Sampling behaviour of `xi_hat_K` across sample sizes.
///
/// When `xi_K = 0` the scaled column `sqrt(n) xi_hat_K` stays bounded;
/// otherwise `xi_hat_K` settles at `population_criterion`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeTable {
    pub subset: Vec<usize>,
    pub population_criterion: f64,
    pub replications: usize,
    /// Sorted by ascending `n`.
    pub rows: Vec<ProbeRow>,
}

pub fn convergence_probe(
    model: &PopulationModel,
    k: &VariableSubset,
    n_grid: &[usize],
    reps: usize,
    seed: u64,
) -> Result<ProbeTable, SimulationError> {
    if reps == 0 {
        return Err(SimulationError::InvalidConfig(
            "probe needs at least one replication".into(),
        ));
    }
    if let Some(&n) = n_grid.iter().find(|&&n| n < 2) {
        return Err(SimulationError::InvalidConfig(format!(
            "probe sample size {n} is below 2"
        )));
    }
    let population_criterion = criterion(&population_covariances(model), k)?;
    let design = GaussianDesign::new(model)?;

    let mut grid = n_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let rows = grid
        .iter()
        .map(|&n| {
            let values: Vec<f64> = (0..reps as u64)
                .into_par_iter()
                .map(|r| {
                    let data = design.sample(n, derive_seed(seed, n as u64, r, STREAM_PROBE))?;
                    Ok(criterion(&empirical_covariances(&data)?, k)?)
                })
                .collect::<Result<_, SimulationError>>()?;
            let scaled: Vec<f64> = values.iter().map(|v| (n as f64).sqrt() * v).collect();
            Ok(ProbeRow {
                n,
                median_sqrt_n_criterion: median(&scaled).expect("reps >= 1"),
                median_criterion: median(&values).expect("reps >= 1"),
            })
        })
        .collect::<Result<_, SimulationError>>()?;

    Ok(ProbeTable {
        subset: k.labels().to_vec(),
        population_criterion,
        replications: reps,
        rows,
    })
}
