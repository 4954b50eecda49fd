//! Penalized ordering of variables and estimation of the relevant set.
//!
//! The procedure has two stages. Leave-one-out scores
//! `phi_i = xi_hat(I - {i}) + f_n(i)` rank the variables. Then nested-prefix
//! scores `psi_i = xi_hat(J_i) + g_n(.)`, where `J_i` holds the first `i`
//! ranked variables, pick the dimensionality `s_hat` as their smallest
//! argmin. The selected set is the first `s_hat` ranked variables.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covariance::{
    criterion, empirical_covariances, CovError, CovarianceSuite, Dataset, VariableSubset,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectionError {
    #[error("invalid penalty schedule: {0}")]
    InvalidPenalty(String),

    #[error("selection needs at least 2 predictors, got {0}")]
    TooFewVariables(usize),

    #[error("sigma_hat is not a permutation of 1..={p}: {perm:?}")]
    InvalidPermutation { perm: Vec<usize>, p: usize },

    #[error("covariance estimation failed: {0}")]
    Covariance(#[source] CovError),

    #[error("leave-one-out score for variable {variable} failed: {source}")]
    LeaveOneOut {
        variable: usize,
        #[source]
        source: CovError,
    },

    #[error("prefix score for the first {prefix_len} ranked variables failed: {source}")]
    Prefix {
        prefix_len: usize,
        #[source]
        source: CovError,
    },
}

/// `f(i) = i^-exponent`, strictly decreasing for `exponent > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DecreasingShape {
    exponent: f64,
}

/// `g(i) = i^exponent`, strictly increasing for `exponent > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct IncreasingShape {
    exponent: f64,
}

impl DecreasingShape {
    pub const INVERSE: Self = Self { exponent: 1.0 };

    pub fn power(exponent: f64) -> Result<Self, SelectionError> {
        if exponent.is_finite() && exponent > 0.0 {
            Ok(Self { exponent })
        } else {
            Err(SelectionError::InvalidPenalty(format!(
                "decreasing shape exponent must be positive, got {exponent}"
            )))
        }
    }

    pub fn eval(&self, i: usize) -> f64 {
        (i as f64).powf(-self.exponent)
    }
}

impl IncreasingShape {
    pub const LINEAR: Self = Self { exponent: 1.0 };

    pub fn power(exponent: f64) -> Result<Self, SelectionError> {
        if exponent.is_finite() && exponent > 0.0 {
            Ok(Self { exponent })
        } else {
            Err(SelectionError::InvalidPenalty(format!(
                "increasing shape exponent must be positive, got {exponent}"
            )))
        }
    }

    pub fn eval(&self, i: usize) -> f64 {
        (i as f64).powf(self.exponent)
    }
}

fn parse_power(s: &str) -> Option<f64> {
    s.strip_prefix("pow:").and_then(|e| e.trim().parse().ok())
}

impl FromStr for DecreasingShape {
    type Err = SelectionError;

    /// Accepts `inverse`, `inverse-sqrt` or `pow:<a>` for `i^-a`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inverse" => Ok(Self::INVERSE),
            "inverse-sqrt" => Self::power(0.5),
            other => match parse_power(other) {
                Some(a) => Self::power(a),
                None => Err(SelectionError::InvalidPenalty(format!(
                    "unknown decreasing shape `{other}` (expected inverse, inverse-sqrt or pow:<a>)"
                ))),
            },
        }
    }
}

impl FromStr for IncreasingShape {
    type Err = SelectionError;

    /// Accepts `linear`, `sqrt`, `quadratic` or `pow:<b>` for `i^b`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "linear" => Ok(Self::LINEAR),
            "sqrt" => Self::power(0.5),
            "quadratic" => Self::power(2.0),
            other => match parse_power(other) {
                Some(b) => Self::power(b),
                None => Err(SelectionError::InvalidPenalty(format!(
                    "unknown increasing shape `{other}` (expected linear, sqrt, quadratic or pow:<b>)"
                ))),
            },
        }
    }
}

impl fmt::Display for DecreasingShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 1.0 {
            f.write_str("inverse")
        } else if self.exponent == 0.5 {
            f.write_str("inverse-sqrt")
        } else {
            write!(f, "pow:{}", self.exponent)
        }
    }
}

impl fmt::Display for IncreasingShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 1.0 {
            f.write_str("linear")
        } else if self.exponent == 0.5 {
            f.write_str("sqrt")
        } else if self.exponent == 2.0 {
            f.write_str("quadratic")
        } else {
            write!(f, "pow:{}", self.exponent)
        }
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl TryFrom<String> for $t {
            type Error = SelectionError;
            fn try_from(s: String) -> Result<Self, Self::Error> {
                s.parse()
            }
        }

        impl From<$t> for String {
            fn from(v: $t) -> String {
                v.to_string()
            }
        }
    };
}

string_serde!(DecreasingShape);
string_serde!(IncreasingShape);

/// What the size penalty `g_n` is evaluated at for the `i`-th prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyArg {
    /// The prefix length `i`.
    #[default]
    Rank,
    /// The label `sigma_hat(i)` of the variable added at step `i`.
    Label,
}

/// Scale of the criterion term inside the prefix scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PsiScale {
    /// `xi_hat(J_i)^2`. Under `xi = 0` this is `O_p(1/n)`, so any size
    /// penalty decaying as `n^-beta` with `beta < 1` dominates it.
    #[default]
    Squared,
    /// `xi_hat(J_i)` itself, which is `O_p(n^-1/2)` under `xi = 0`.
    Norm,
}

impl FromStr for PenaltyArg {
    type Err = SelectionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "rank" => Ok(Self::Rank),
            "label" => Ok(Self::Label),
            other => Err(SelectionError::InvalidPenalty(format!(
                "penalty argument must be `rank` or `label`, got `{other}`"
            ))),
        }
    }
}

impl FromStr for PsiScale {
    type Err = SelectionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "squared" => Ok(Self::Squared),
            "norm" => Ok(Self::Norm),
            other => Err(SelectionError::InvalidPenalty(format!(
                "psi scale must be `squared` or `norm`, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for PenaltyArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rank => "rank",
            Self::Label => "label",
        })
    }
}

impl fmt::Display for PsiScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Squared => "squared",
            Self::Norm => "norm",
        })
    }
}

/// The penalty families `f_n(i) = n^-f_rate f_shape(i)` and
/// `g_n(i) = n^-g_rate g_shape(i)`, plus how they enter the prefix scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySchedule {
    f_rate: f64,
    f_shape: DecreasingShape,
    g_rate: f64,
    g_shape: IncreasingShape,
    penalty_arg: PenaltyArg,
    psi_scale: PsiScale,
}

impl Default for PenaltySchedule {
    /// `f_n(i) = n^-1/4 / i`, `g_n(i) = n^-3/4 i`.
    fn default() -> Self {
        Self {
            f_rate: 0.25,
            f_shape: DecreasingShape::INVERSE,
            g_rate: 0.75,
            g_shape: IncreasingShape::LINEAR,
            penalty_arg: PenaltyArg::default(),
            psi_scale: PsiScale::default(),
        }
    }
}

impl PenaltySchedule {
    /// Requires `0 < f_rate < 1/2` and `0 < g_rate < 1`.
    pub fn new(
        f_rate: f64,
        f_shape: DecreasingShape,
        g_rate: f64,
        g_shape: IncreasingShape,
    ) -> Result<Self, SelectionError> {
        if !(f_rate > 0.0 && f_rate < 0.5) {
            return Err(SelectionError::InvalidPenalty(format!(
                "f_rate must lie in (0, 1/2), got {f_rate}"
            )));
        }
        if !(g_rate > 0.0 && g_rate < 1.0) {
            return Err(SelectionError::InvalidPenalty(format!(
                "g_rate must lie in (0, 1), got {g_rate}"
            )));
        }
        Ok(Self {
            f_rate,
            f_shape,
            g_rate,
            g_shape,
            penalty_arg: PenaltyArg::default(),
            psi_scale: PsiScale::default(),
        })
    }

    pub fn with_penalty_arg(mut self, arg: PenaltyArg) -> Self {
        self.penalty_arg = arg;
        self
    }

    pub fn with_psi_scale(mut self, scale: PsiScale) -> Self {
        self.psi_scale = scale;
        self
    }

    /// Re-checks every invariant, including strict monotonicity of both
    /// shapes evaluated on `1..=p`.
    pub fn validate(&self, p: usize) -> Result<(), SelectionError> {
        Self::new(self.f_rate, self.f_shape, self.g_rate, self.g_shape)?;
        for i in 1..p {
            let (f0, f1) = (self.f_shape.eval(i), self.f_shape.eval(i + 1));
            if !(f0 > f1 && f1 > 0.0) {
                return Err(SelectionError::InvalidPenalty(format!(
                    "f_shape is not strictly decreasing and positive at {i}"
                )));
            }
            let (g0, g1) = (self.g_shape.eval(i), self.g_shape.eval(i + 1));
            if !(g1 > g0 && g0 > 0.0) {
                return Err(SelectionError::InvalidPenalty(format!(
                    "g_shape is not strictly increasing and positive at {i}"
                )));
            }
        }
        Ok(())
    }

    pub fn f_rate(&self) -> f64 {
        self.f_rate
    }

    pub fn g_rate(&self) -> f64 {
        self.g_rate
    }

    pub fn f_shape(&self) -> DecreasingShape {
        self.f_shape
    }

    pub fn g_shape(&self) -> IncreasingShape {
        self.g_shape
    }

    pub fn penalty_arg(&self) -> PenaltyArg {
        self.penalty_arg
    }

    pub fn psi_scale(&self) -> PsiScale {
        self.psi_scale
    }

    pub fn f_n(&self, n: f64, i: usize) -> f64 {
        n.powf(-self.f_rate) * self.f_shape.eval(i)
    }

    pub fn g_n(&self, n: f64, i: usize) -> f64 {
        n.powf(-self.g_rate) * self.g_shape.eval(i)
    }
}

impl fmt::Display for PenaltySchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "f_rate={} f_shape={} g_rate={} g_shape={} penalty_arg={} psi_scale={}",
            self.f_rate, self.f_shape, self.g_rate, self.g_shape, self.penalty_arg, self.psi_scale
        )
    }
}

/// Output of the full selection pipeline.
///
/// `phi[j - 1]` is the score of variable `j`; `psi[i - 1]` is the score of
/// the prefix of length `i`. `sigma_hat` and `selected` hold 1-based labels,
/// `selected` in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub phi: Vec<f64>,
    pub sigma_hat: Vec<usize>,
    pub psi: Vec<f64>,
    pub s_hat: usize,
    pub selected: Vec<usize>,
    pub n: usize,
}

impl SelectionResult {
    pub fn p(&self) -> usize {
        self.phi.len()
    }

    /// Whether the variable ranked at position `rank` (1-based) is selected.
    pub fn is_selected_rank(&self, rank: usize) -> bool {
        rank <= self.s_hat
    }
}

/// Leave-one-out scores `phi_i = xi_hat(I - {i}) + f_n(i)`.
pub fn phi_scores(
    suite: &CovarianceSuite,
    n: usize,
    pen: &PenaltySchedule,
) -> Result<Vec<f64>, SelectionError> {
    let p = suite.p();
    if p < 2 {
        return Err(SelectionError::TooFewVariables(p));
    }
    let nf = n as f64;
    (1..=p)
        .map(|i| {
            let k = VariableSubset::leave_one_out(p, i).map_err(SelectionError::Covariance)?;
            let xi = criterion(suite, &k)
                .map_err(|source| SelectionError::LeaveOneOut { variable: i, source })?;
            Ok(xi + pen.f_n(nf, i))
        })
        .collect()
}

// -0.0 and 0.0 must compare equal; NaN sorts last.
fn sort_key(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Labels sorted by non-increasing score; exact ties go to the smaller
/// label first.
pub fn order_permutation(phi: &[f64]) -> Vec<usize> {
    let mut labels: Vec<usize> = (1..=phi.len()).collect();
    labels.sort_by(|&a, &b| {
        sort_key(phi[b - 1])
            .total_cmp(&sort_key(phi[a - 1]))
            .then(a.cmp(&b))
    });
    labels
}

fn check_permutation(perm: &[usize], p: usize) -> Result<(), SelectionError> {
    let mut seen = vec![false; p];
    let ok = perm.len() == p
        && perm.iter().all(|&j| {
            if j == 0 || j > p || seen[j - 1] {
                false
            } else {
                seen[j - 1] = true;
                true
            }
        });
    if ok {
        Ok(())
    } else {
        Err(SelectionError::InvalidPermutation {
            perm: perm.to_vec(),
            p,
        })
    }
}

/// Prefix scores `psi_i = c(xi_hat(J_i)) + g_n(a_i)` with
/// `J_i = {sigma_hat(1), ..., sigma_hat(i)}`. The criterion transform `c`
/// and the penalty argument `a_i` come from the schedule.
///
/// The full prefix `J_p = I` has criterion exactly zero, so `psi_p` is the
/// bare penalty.
pub fn psi_scores(
    suite: &CovarianceSuite,
    sigma_hat: &[usize],
    n: usize,
    pen: &PenaltySchedule,
) -> Result<Vec<f64>, SelectionError> {
    let p = suite.p();
    check_permutation(sigma_hat, p)?;
    let nf = n as f64;
    (1..=p)
        .map(|i| {
            let xi = if i == p {
                0.0
            } else {
                let k = VariableSubset::new(sigma_hat[..i].iter().copied(), p)
                    .map_err(SelectionError::Covariance)?;
                criterion(suite, &k)
                    .map_err(|source| SelectionError::Prefix { prefix_len: i, source })?
            };
            let term = match pen.psi_scale() {
                PsiScale::Squared => xi * xi,
                PsiScale::Norm => xi,
            };
            let arg = match pen.penalty_arg() {
                PenaltyArg::Rank => i,
                PenaltyArg::Label => sigma_hat[i - 1],
            };
            Ok(term + pen.g_n(nf, arg))
        })
        .collect()
}

/// Smallest 1-based position attaining the minimum of `psi`.
pub fn dimensionality(psi: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in psi.iter().enumerate() {
        if v < psi[best] {
            best = i;
        }
    }
    best + 1
}

/// Runs the ordering and dimensionality stages on a precomputed suite, with
/// penalties evaluated at sample size `n`.
pub fn select_from_suite(
    suite: &CovarianceSuite,
    n: usize,
    pen: &PenaltySchedule,
) -> Result<SelectionResult, SelectionError> {
    pen.validate(suite.p())?;
    let phi = phi_scores(suite, n, pen)?;
    let sigma_hat = order_permutation(&phi);
    let psi = psi_scores(suite, &sigma_hat, n, pen)?;
    let s_hat = dimensionality(&psi);
    let mut selected = sigma_hat[..s_hat].to_vec();
    selected.sort_unstable();
    Ok(SelectionResult {
        phi,
        sigma_hat,
        psi,
        s_hat,
        selected,
        n,
    })
}

/// Full pipeline on a sample: empirical covariances, then
/// [`select_from_suite`] at `n = data.n()`.
pub fn select_variables(
    data: &Dataset,
    pen: &PenaltySchedule,
) -> Result<SelectionResult, SelectionError> {
    let suite = empirical_covariances(data).map_err(SelectionError::Covariance)?;
    select_from_suite(&suite, data.n(), pen)
}
