use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use super::SimulationError;
use crate::covariance::{Dataset, VariableSubset, DEFAULT_CONDITION_CAP};

/// A linear predictor `y_hat = coef * x[labels]`, with `coef` of shape
/// `q x labels.len()`. No intercept: the design is centered.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    labels: Vec<usize>,
    coef: DMatrix<f64>,
}

impl LinearFit {
    pub fn new(labels: Vec<usize>, coef: DMatrix<f64>) -> Result<Self, SimulationError> {
        if coef.ncols() != labels.len() {
            return Err(SimulationError::FitShape(format!(
                "{} coefficient columns for {} variables",
                coef.ncols(),
                labels.len()
            )));
        }
        Ok(Self { labels, coef })
    }

    /// Predicts zero for every observation.
    pub fn zero(q: usize) -> Self {
        Self {
            labels: Vec::new(),
            coef: DMatrix::zeros(q, 0),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn coef(&self) -> &DMatrix<f64> {
        &self.coef
    }
}

fn select_columns(x: &DMatrix<f64>, labels: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), labels.len(), |i, j| x[(i, labels[j] - 1)])
}

/// Least squares of `train.y` on the selected columns of `train.x`:
/// `coef = ((X^T X)^-1 X^T Y)^T`.
pub fn ols_fit(train: &Dataset, selected: &VariableSubset) -> Result<LinearFit, SimulationError> {
    if selected.p() != train.p() {
        return Err(SimulationError::FitShape(format!(
            "subset over {} variables, data has {}",
            selected.p(),
            train.p()
        )));
    }
    let xs = select_columns(train.x(), selected.labels());
    let gram = xs.tr_mul(&xs);
    let gram = (&gram + gram.transpose()) * 0.5;

    let eig = SymmetricEigen::new(gram.clone()).eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    let singular = || SimulationError::SingularDesign {
        subset: selected.labels().to_vec(),
        condition,
    };
    if !(condition <= DEFAULT_CONDITION_CAP) {
        return Err(singular());
    }
    let chol = Cholesky::new(gram).ok_or_else(singular)?;
    let beta = chol.solve(&xs.tr_mul(train.y()));
    LinearFit::new(selected.labels().to_vec(), beta.transpose())
}

/// Mean over rows of `||y - y_hat||^2`.
pub fn prediction_error(test: &Dataset, fit: &LinearFit) -> Result<f64, SimulationError> {
    if let Some(&bad) = fit.labels.iter().find(|&&j| j == 0 || j > test.p()) {
        return Err(SimulationError::FitShape(format!(
            "variable {bad} out of range for data with {} predictors",
            test.p()
        )));
    }
    if fit.coef.nrows() != test.q() {
        return Err(SimulationError::FitShape(format!(
            "fit predicts {} responses, data has {}",
            fit.coef.nrows(),
            test.q()
        )));
    }
    let xs = select_columns(test.x(), &fit.labels);
    let resid = test.y() - xs * fit.coef.transpose();
    Ok(resid.norm_squared() / test.n() as f64)
}
