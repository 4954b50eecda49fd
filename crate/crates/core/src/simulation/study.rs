use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ols::{ols_fit, prediction_error, LinearFit};
use super::sampling::GaussianDesign;
use super::seed::{derive_seed, STREAM_TEST, STREAM_TRAIN};
use super::SimulationError;
use crate::covariance::{
    criterion, empirical_covariances, CovError, PopulationModel, VariableSubset,
};
use crate::selection::{select_variables, PenaltySchedule, SelectionError};

/// A study aborts when more than this fraction of replications fail.
pub const MAX_FAILURE_RATE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub model: PopulationModel,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    /// Index of the first replication; replications run over
    /// `first_replication..first_replication + replications`.
    pub first_replication: u64,
    pub pen: PenaltySchedule,
    pub base_seed: u64,
    pub parallel: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            model: PopulationModel::default_design(),
            sample_sizes: vec![50, 100, 500, 2000],
            replications: 200,
            first_replication: 0,
            pen: PenaltySchedule::default(),
            base_seed: 1,
            parallel: true,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), SimulationError> {
        let p = self.model.p();
        if self.replications == 0 {
            return Err(SimulationError::InvalidConfig(
                "replications must be at least 1".into(),
            ));
        }
        if self.sample_sizes.is_empty() {
            return Err(SimulationError::InvalidConfig("no sample sizes".into()));
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < p + 2) {
            return Err(SimulationError::InvalidConfig(format!(
                "sample size {n} is below p + 2 = {}",
                p + 2
            )));
        }
        self.pen.validate(p)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutcome {
    pub n: usize,
    pub rep_index: u64,
    /// Seed of the training stream.
    pub seed: u64,
    pub selected: Vec<usize>,
    pub correct: bool,
    /// Test error of the refit on the selected variables.
    pub pred_error: f64,
    /// Test error of the refit on the true relevant set.
    pub oracle_pred_error: f64,
    /// `xi_hat` of the true relevant set on the training sample; `None` when
    /// the model has no relevant variable.
    pub criterion_at_truth: Option<f64>,
}

impl ReplicationOutcome {
    pub fn excess_error(&self) -> f64 {
        self.pred_error - self.oracle_pred_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    SingularSubmatrix,
    SingularDesign,
    Other,
}

impl FailureReason {
    pub fn code(&self) -> &'static str {
        match self {
            Self::SingularSubmatrix => "singular_submatrix",
            Self::SingularDesign => "singular_design",
            Self::Other => "other",
        }
    }

    fn classify(err: &SimulationError) -> Self {
        match err {
            SimulationError::SingularDesign { .. } => Self::SingularDesign,
            SimulationError::Data(CovError::SingularSubmatrix { .. })
            | SimulationError::Selection(
                SelectionError::LeaveOneOut { .. } | SelectionError::Prefix { .. },
            ) => Self::SingularSubmatrix,
            _ => Self::Other,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailedReplication {
    pub n: usize,
    pub rep_index: u64,
    pub seed: u64,
    pub reason: FailureReason,
    pub message: String,
}

pub type ReplicationRecord = Result<ReplicationOutcome, FailedReplication>;

fn replicate(
    design: &GaussianDesign,
    cfg: &SimulationConfig,
    truth: &[usize],
    n: usize,
    rep_index: u64,
) -> Result<ReplicationOutcome, SimulationError> {
    let train_seed = derive_seed(cfg.base_seed, n as u64, rep_index, STREAM_TRAIN);
    let test_seed = derive_seed(cfg.base_seed, n as u64, rep_index, STREAM_TEST);
    let train = design.sample(n, train_seed)?;
    let test = design.sample(n, test_seed)?;
    let p = train.p();

    let result = select_variables(&train, &cfg.pen)?;
    let chosen = VariableSubset::new(result.selected.iter().copied(), p)?;
    let fit = ols_fit(&train, &chosen)?;
    let pred_error = prediction_error(&test, &fit)?;

    let (oracle_fit, criterion_at_truth) = if truth.is_empty() {
        (LinearFit::zero(train.q()), None)
    } else {
        let k = VariableSubset::new(truth.iter().copied(), p)?;
        let suite = empirical_covariances(&train)?;
        (ols_fit(&train, &k)?, Some(criterion(&suite, &k)?))
    };
    let oracle_pred_error = prediction_error(&test, &oracle_fit)?;

    Ok(ReplicationOutcome {
        n,
        rep_index,
        seed: train_seed,
        correct: result.selected == truth,
        selected: result.selected,
        pred_error,
        oracle_pred_error,
        criterion_at_truth,
    })
}

fn to_record(
    res: Result<ReplicationOutcome, SimulationError>,
    cfg: &SimulationConfig,
    n: usize,
    rep_index: u64,
) -> ReplicationRecord {
    res.map_err(|e| FailedReplication {
        n,
        rep_index,
        seed: derive_seed(cfg.base_seed, n as u64, rep_index, STREAM_TRAIN),
        reason: FailureReason::classify(&e),
        message: e.to_string(),
    })
}

/// One replication: independent train and test samples of size `n`,
/// selection and refit on train, prediction error on test.
///
/// Singular submatrices and designs are recorded as failures, not raised.
pub fn run_replication(
    cfg: &SimulationConfig,
    n: usize,
    rep_index: u64,
) -> Result<ReplicationRecord, SimulationError> {
    let design = GaussianDesign::new(&cfg.model)?;
    let truth = cfg.model.relevant_set();
    Ok(to_record(
        replicate(&design, cfg, &truth, n, rep_index),
        cfg,
        n,
        rep_index,
    ))
}

/// Every replication of the study, sorted by `(n, rep_index)`.
pub fn run_records(cfg: &SimulationConfig) -> Result<Vec<ReplicationRecord>, SimulationError> {
    cfg.validate()?;
    let design = GaussianDesign::new(&cfg.model)?;
    let truth = cfg.model.relevant_set();

    let mut sizes = cfg.sample_sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let jobs: Vec<(usize, u64)> = sizes
        .iter()
        .flat_map(|&n| {
            (cfg.first_replication..cfg.first_replication + cfg.replications as u64)
                .map(move |r| (n, r))
        })
        .collect();

    let run = |&(n, r): &(usize, u64)| to_record(replicate(&design, cfg, &truth, n, r), cfg, n, r);
    let records = if cfg.parallel {
        jobs.par_iter().map(run).collect()
    } else {
        jobs.iter().map(run).collect()
    };
    Ok(records)
}

/// Per sample size aggregates. Failed replications are excluded from every
/// mean and counted in `failed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub replications: usize,
    pub failed: usize,
    pub mean_pred_error: f64,
    pub sem_pred_error: f64,
    pub correct_rate: f64,
    pub median_sqrt_n_criterion: Option<f64>,
    pub mean_oracle_error: f64,
    pub mean_excess_error: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StudySummary {
    /// Sorted by ascending `n`.
    pub rows: Vec<SummaryRow>,
}

impl StudySummary {
    pub fn row(&self, n: usize) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

/// Median with the two-middle average for even lengths; `None` when empty.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

fn record_key(r: &ReplicationRecord) -> (usize, u64) {
    match r {
        Ok(o) => (o.n, o.rep_index),
        Err(f) => (f.n, f.rep_index),
    }
}

/// Aggregates records in canonical `(n, rep_index)` order, so the result is
/// the same for any input order or any split of the replications.
pub fn summarize(records: &[ReplicationRecord]) -> Result<StudySummary, SimulationError> {
    let failed_total = records.iter().filter(|r| r.is_err()).count();
    if !records.is_empty() && failed_total as f64 > MAX_FAILURE_RATE * records.len() as f64 {
        return Err(SimulationError::TooManyFailures {
            failed: failed_total,
            total: records.len(),
            max_rate: MAX_FAILURE_RATE,
        });
    }

    let mut sorted: Vec<&ReplicationRecord> = records.iter().collect();
    sorted.sort_by_key(|r| record_key(r));

    let mut rows = Vec::new();
    for group in sorted.chunk_by(|a, b| record_key(a).0 == record_key(b).0) {
        let n = record_key(group[0]).0;
        let ok: Vec<&ReplicationOutcome> = group.iter().filter_map(|r| r.as_ref().ok()).collect();
        let failed = group.len() - ok.len();
        let m = ok.len() as f64;
        let mean = |f: &dyn Fn(&ReplicationOutcome) -> f64| ok.iter().map(|o| f(o)).sum::<f64>() / m;

        let mean_pred_error = mean(&|o| o.pred_error);
        let sem_pred_error = if ok.len() > 1 {
            let ss: f64 = ok.iter().map(|o| (o.pred_error - mean_pred_error).powi(2)).sum();
            (ss / (m - 1.0)).sqrt() / m.sqrt()
        } else {
            0.0
        };
        let scaled: Vec<f64> = ok
            .iter()
            .filter_map(|o| o.criterion_at_truth.map(|c| (o.n as f64).sqrt() * c))
            .collect();
        rows.push(SummaryRow {
            n,
            replications: ok.len(),
            failed,
            mean_pred_error,
            sem_pred_error,
            correct_rate: ok.iter().filter(|o| o.correct).count() as f64 / m,
            median_sqrt_n_criterion: median(&scaled),
            mean_oracle_error: mean(&|o| o.oracle_pred_error),
            mean_excess_error: mean(&|o| o.excess_error()),
        });
    }
    Ok(StudySummary { rows })
}

/// Runs every replication for every sample size and aggregates per `n`.
pub fn run_study(cfg: &SimulationConfig) -> Result<StudySummary, SimulationError> {
    summarize(&run_records(cfg)?)
}
