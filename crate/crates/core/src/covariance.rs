//! Population quantities, empirical covariance estimation, the subset
//! projector and the covariance selection criterion.
//!
//! Variables are identified by 1-based labels `1..=p` throughout the public
//! API. Matrices follow the usual conventions:
//!
//! - `V1` is the `p x p` covariance of the predictors,
//! - `V12` is the `p x q` cross-covariance `E(X Y^T)`,
//! - for a subset `K`, `Pi_K` is zero outside the rows/columns in `K` and
//!   holds `(V1[K,K])^-1` on them,
//! - the criterion is `xi_K = || V12 - V1 Pi_K V12 ||_F`.
//!
//! `xi_K` vanishes exactly when `K` contains every variable with a nonzero
//! coefficient column, which is what the selection procedure exploits.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use thiserror::Error;

/// Default cap on the condition number of a principal submatrix before it
/// is treated as singular.
pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

/// Absolute threshold below which a population criterion counts as zero.
pub const POPULATION_ZERO_TOL: f64 = 1e-10;

const SUITE_SYMMETRY_TOL: f64 = 1e-10;
const MODEL_SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CovError {
    #[error("need at least {required} observations, got {actual}")]
    InsufficientSamples { required: usize, actual: usize },

    #[error("non-finite value in {matrix} at row {row}, column {col}")]
    NonFinite {
        matrix: &'static str,
        row: usize,
        col: usize,
    },

    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: String,
        actual: String,
    },

    #[error("invalid variable subset: {0}")]
    InvalidSubset(String),

    #[error("{matrix} is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { matrix: &'static str, asymmetry: f64 },

    #[error("{matrix} is not positive definite")]
    NotPositiveDefinite { matrix: &'static str },

    #[error("{matrix} is not positive semi-definite")]
    NotPositiveSemiDefinite { matrix: &'static str },

    /// The principal submatrix of `V1` on the subset is (numerically)
    /// singular: the predictors in the subset are collinear or degenerate.
    #[error("principal submatrix on variables {subset:?} is singular (condition number {condition:e})")]
    SingularSubmatrix { subset: Vec<usize>, condition: f64 },
}

/// Paired observation matrices: `x` is `n x p`, `y` is `n x q`, one row per
/// observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self, CovError> {
        if x.nrows() != y.nrows() {
            return Err(CovError::DimensionMismatch {
                what: "row count of y",
                expected: x.nrows().to_string(),
                actual: y.nrows().to_string(),
            });
        }
        if x.nrows() < 2 {
            return Err(CovError::InsufficientSamples {
                required: 2,
                actual: x.nrows(),
            });
        }
        if x.ncols() == 0 || y.ncols() == 0 {
            return Err(CovError::DimensionMismatch {
                what: "column count",
                expected: ">= 1".into(),
                actual: format!("p = {}, q = {}", x.ncols(), y.ncols()),
            });
        }
        check_finite("x", &x)?;
        check_finite("y", &y)?;
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn q(&self) -> usize {
        self.y.ncols()
    }

    /// Multiplies every response by `c`.
    pub fn scale_responses(&self, c: f64) -> Result<Self, CovError> {
        Self::new(self.x.clone(), &self.y * c)
    }
}

fn check_finite(name: &'static str, m: &DMatrix<f64>) -> Result<(), CovError> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(CovError::NonFinite {
                    matrix: name,
                    row: i,
                    col: j,
                });
            }
        }
    }
    Ok(())
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Regression model `Y = B X + eps` with `X ~ (0, sigma)` and noise
/// `eps ~ (0, noise_cov)` independent of `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationModel {
    b: DMatrix<f64>,
    sigma: DMatrix<f64>,
    noise_cov: DMatrix<f64>,
}

impl PopulationModel {
    pub fn new(
        b: DMatrix<f64>,
        sigma: DMatrix<f64>,
        noise_cov: DMatrix<f64>,
    ) -> Result<Self, CovError> {
        let (q, p) = b.shape();
        if p == 0 || q == 0 {
            return Err(CovError::DimensionMismatch {
                what: "coefficient matrix",
                expected: "non-empty".into(),
                actual: format!("{q}x{p}"),
            });
        }
        if sigma.shape() != (p, p) {
            return Err(CovError::DimensionMismatch {
                what: "sigma",
                expected: format!("{p}x{p}"),
                actual: format!("{}x{}", sigma.nrows(), sigma.ncols()),
            });
        }
        if noise_cov.shape() != (q, q) {
            return Err(CovError::DimensionMismatch {
                what: "noise_cov",
                expected: format!("{q}x{q}"),
                actual: format!("{}x{}", noise_cov.nrows(), noise_cov.ncols()),
            });
        }
        check_finite("b", &b)?;
        check_finite("sigma", &sigma)?;
        check_finite("noise_cov", &noise_cov)?;

        let asym = max_asymmetry(&sigma);
        if asym > MODEL_SYMMETRY_TOL {
            return Err(CovError::NotSymmetric {
                matrix: "sigma",
                asymmetry: asym,
            });
        }
        let eig = SymmetricEigen::new(symmetrize(&sigma)).eigenvalues;
        if eig.iter().any(|&l| l <= 0.0) || Cholesky::new(sigma.clone()).is_none() {
            return Err(CovError::NotPositiveDefinite { matrix: "sigma" });
        }

        let asym = max_asymmetry(&noise_cov);
        if asym > MODEL_SYMMETRY_TOL {
            return Err(CovError::NotSymmetric {
                matrix: "noise_cov",
                asymmetry: asym,
            });
        }
        let eig = SymmetricEigen::new(symmetrize(&noise_cov)).eigenvalues;
        let scale = eig.iter().fold(1.0_f64, |a, &l| a.max(l.abs()));
        if eig.iter().any(|&l| l < -1e-12 * scale) {
            return Err(CovError::NotPositiveSemiDefinite { matrix: "noise_cov" });
        }

        Ok(Self {
            b,
            sigma,
            noise_cov,
        })
    }

    /// The simulation design: `p = 7`, `q = 5`, `sigma_ij = 0.5^|i-j|`,
    /// noise covariance `0.5 I_5`, and coefficients supported on variables
    /// 1, 4 and 7.
    pub fn default_design() -> Self {
        Self::new(default_coefficients(), ar1_covariance(7, 0.5), identity_scaled(5, 0.5))
            .expect("default model is valid")
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn noise_cov(&self) -> &DMatrix<f64> {
        &self.noise_cov
    }

    pub fn p(&self) -> usize {
        self.b.ncols()
    }

    pub fn q(&self) -> usize {
        self.b.nrows()
    }

    /// Variables with a nonzero coefficient column.
    pub fn relevant_set(&self) -> Vec<usize> {
        relevant_set(&self.b)
    }
}

/// The `5 x 7` coefficient matrix of the default simulation design.
pub fn default_coefficients() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        5,
        7,
        &[
            3.0, 0.0, 0.0, 1.5, 0.0, 0.0, 2.0, //
            4.0, 0.0, 0.0, 2.5, 0.0, 0.0, -1.0, //
            5.0, 0.0, 0.0, 0.5, 0.0, 0.0, 3.0, //
            6.0, 0.0, 0.0, 3.0, 0.0, 0.0, 1.0, //
            7.0, 0.0, 0.0, 6.0, 0.0, 0.0, 4.0,
        ],
    )
}

/// `rho^|i-j|` covariance.
pub fn ar1_covariance(dim: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| rho.powi(i.abs_diff(j) as i32))
}

pub fn identity_scaled(dim: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::identity(dim, dim) * scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Empirical,
    Population,
}

/// The pair `(V1, V12)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSuite {
    v1: DMatrix<f64>,
    v12: DMatrix<f64>,
    provenance: Provenance,
}

impl CovarianceSuite {
    pub fn new(
        v1: DMatrix<f64>,
        v12: DMatrix<f64>,
        provenance: Provenance,
    ) -> Result<Self, CovError> {
        let p = v1.nrows();
        if v1.ncols() != p || v12.nrows() != p {
            return Err(CovError::DimensionMismatch {
                what: "covariance suite",
                expected: format!("{p}x{p} and {p}xq"),
                actual: format!(
                    "{}x{} and {}x{}",
                    v1.nrows(),
                    v1.ncols(),
                    v12.nrows(),
                    v12.ncols()
                ),
            });
        }
        check_finite("v1", &v1)?;
        check_finite("v12", &v12)?;
        let asym = max_asymmetry(&v1);
        if asym > SUITE_SYMMETRY_TOL {
            return Err(CovError::NotSymmetric {
                matrix: "v1",
                asymmetry: asym,
            });
        }
        Ok(Self {
            v1,
            v12,
            provenance,
        })
    }

    pub fn v1(&self) -> &DMatrix<f64> {
        &self.v1
    }

    pub fn v12(&self) -> &DMatrix<f64> {
        &self.v12
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn p(&self) -> usize {
        self.v1.nrows()
    }

    pub fn q(&self) -> usize {
        self.v12.ncols()
    }
}

/// A non-empty, strictly increasing set of 1-based variable labels drawn
/// from `1..=p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableSubset {
    labels: Vec<usize>,
    p: usize,
}

impl VariableSubset {
    /// Accepts labels in any order; rejects duplicates, zero and labels
    /// above `p`.
    pub fn new(labels: impl IntoIterator<Item = usize>, p: usize) -> Result<Self, CovError> {
        let mut labels: Vec<usize> = labels.into_iter().collect();
        if labels.is_empty() {
            return Err(CovError::InvalidSubset("subset is empty".into()));
        }
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(CovError::InvalidSubset(format!("duplicate variable {}", w[0])));
        }
        if labels[0] == 0 || labels[labels.len() - 1] > p {
            return Err(CovError::InvalidSubset(format!(
                "labels must lie in 1..={p}, got {labels:?}"
            )));
        }
        Ok(Self { labels, p })
    }

    pub fn full(p: usize) -> Result<Self, CovError> {
        Self::new(1..=p, p)
    }

    /// `K_i = I - {i}`.
    pub fn leave_one_out(p: usize, i: usize) -> Result<Self, CovError> {
        Self::new((1..=p).filter(|&j| j != i), p)
    }

    /// Decodes a bitmask where bit `j - 1` marks variable `j`.
    pub fn from_mask(mask: u64, p: usize) -> Result<Self, CovError> {
        Self::new((1..=p).filter(|&j| mask >> (j - 1) & 1 == 1), p)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.labels.len() == self.p
    }

    pub fn contains(&self, label: usize) -> bool {
        self.labels.binary_search(&label).is_ok()
    }

    pub fn is_superset_of(&self, other: &[usize]) -> bool {
        other.iter().all(|&j| self.contains(j))
    }

    fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels.iter().map(|&j| j - 1)
    }
}

/// Empirical covariances with sample-mean centering and divisor `n`.
pub fn empirical_covariances(data: &Dataset) -> Result<CovarianceSuite, CovError> {
    let n = data.n();
    if n < 2 {
        return Err(CovError::InsufficientSamples {
            required: 2,
            actual: n,
        });
    }
    let xc = center_columns(data.x());
    let yc = center_columns(data.y());
    let inv_n = 1.0 / n as f64;
    let v1 = symmetrize(&(xc.tr_mul(&xc) * inv_n));
    let v12 = xc.tr_mul(&yc) * inv_n;
    CovarianceSuite::new(v1, v12, Provenance::Empirical)
}

fn center_columns(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    let n = m.nrows() as f64;
    for mut col in out.column_iter_mut() {
        let mean = col.sum() / n;
        col.add_scalar_mut(-mean);
    }
    out
}

/// `V1 = sigma`, `V12 = sigma B^T`.
pub fn population_covariances(model: &PopulationModel) -> CovarianceSuite {
    let v12 = model.sigma() * model.b().transpose();
    CovarianceSuite::new(model.sigma().clone(), v12, Provenance::Population)
        .expect("population model invariants guarantee a valid suite")
}

/// `Pi_K` with the default condition cap.
pub fn projector(v1: &DMatrix<f64>, k: &VariableSubset) -> Result<DMatrix<f64>, CovError> {
    projector_with_cap(v1, k, DEFAULT_CONDITION_CAP)
}

/// `Pi_K = A_K^T (A_K V1 A_K^T)^-1 A_K`, materialized as a `p x p` matrix.
///
/// The principal submatrix is inverted through a Cholesky factorization
/// after its spectral condition number has been checked against `cap`.
pub fn projector_with_cap(
    v1: &DMatrix<f64>,
    k: &VariableSubset,
    cap: f64,
) -> Result<DMatrix<f64>, CovError> {
    let p = v1.nrows();
    if k.p() != p {
        return Err(CovError::DimensionMismatch {
            what: "subset ambient dimension",
            expected: p.to_string(),
            actual: k.p().to_string(),
        });
    }
    let idx: Vec<usize> = k.positions().collect();
    let m = idx.len();
    let sub = DMatrix::from_fn(m, m, |a, b| v1[(idx[a], idx[b])]);
    let sub = symmetrize(&sub);

    let singular = |condition: f64| CovError::SingularSubmatrix {
        subset: k.labels().to_vec(),
        condition,
    };

    let eig = SymmetricEigen::new(sub.clone()).eigenvalues;
    let lo = eig.min();
    let hi = eig.max();
    if !(lo > 0.0) {
        return Err(singular(f64::INFINITY));
    }
    let condition = hi / lo;
    if !(condition <= cap) {
        return Err(singular(condition));
    }
    let inv = Cholesky::new(sub)
        .ok_or_else(|| singular(condition))?
        .inverse();

    let mut pi = DMatrix::zeros(p, p);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            pi[(i, j)] = inv[(a, b)];
        }
    }
    Ok(pi)
}

/// `delta_K = V12 - V1 Pi_K V12`.
pub fn residual_operator(
    suite: &CovarianceSuite,
    k: &VariableSubset,
) -> Result<DMatrix<f64>, CovError> {
    let pi = projector(suite.v1(), k)?;
    Ok(suite.v12() - suite.v1() * (pi * suite.v12()))
}

/// `xi_K`, the Frobenius norm of [`residual_operator`].
pub fn criterion(suite: &CovarianceSuite, k: &VariableSubset) -> Result<f64, CovError> {
    Ok(residual_operator(suite, k)?.norm())
}

/// Labels `j` whose coefficient column `b[., j]` is not identically zero.
pub fn relevant_set(b: &DMatrix<f64>) -> Vec<usize> {
    b.column_iter()
        .enumerate()
        .filter(|(_, col)| col.iter().any(|&v| v != 0.0))
        .map(|(j, _)| j + 1)
        .collect()
}
