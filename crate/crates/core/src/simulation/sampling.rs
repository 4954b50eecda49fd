use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::seed::rng_from_seed;
use super::SimulationError;
use crate::covariance::{Dataset, PopulationModel};

/// Gaussian sampler for a [`PopulationModel`], with the square-root factors
/// of both covariances computed once.
#[derive(Debug, Clone)]
pub struct GaussianDesign {
    b: DMatrix<f64>,
    x_factor: DMatrix<f64>,
    noise_factor: DMatrix<f64>,
}

impl GaussianDesign {
    pub fn new(model: &PopulationModel) -> Result<Self, SimulationError> {
        let x_factor = Cholesky::new(model.sigma().clone())
            .ok_or(SimulationError::Factorization("sigma"))?
            .l();
        Ok(Self {
            b: model.b().clone(),
            x_factor,
            noise_factor: psd_sqrt(model.noise_cov()),
        })
    }

    pub fn p(&self) -> usize {
        self.b.ncols()
    }

    pub fn q(&self) -> usize {
        self.b.nrows()
    }

    /// Draws `n` rows. Per row, `p` standard normals feed `x = L z` and then
    /// `q` more feed `eps = M w`; `y = B x + eps`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset, SimulationError> {
        let (p, q) = (self.p(), self.q());
        let mut rng = rng_from_seed(seed);
        let mut x = DMatrix::zeros(n, p);
        let mut y = DMatrix::zeros(n, q);
        let mut z = DVector::zeros(p);
        let mut w = DVector::zeros(q);
        for k in 0..n {
            z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            w.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            let xk = &self.x_factor * &z;
            let yk = &self.b * &xk + &self.noise_factor * &w;
            x.row_mut(k).copy_from(&xk.transpose());
            y.row_mut(k).copy_from(&yk.transpose());
        }
        Ok(Dataset::new(x, y)?)
    }
}

/// Symmetric square root `V diag(sqrt(max(l, 0))) V^T`.
fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let d = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
}

/// Samples `n` observations from `model`, deterministically in `seed`.
pub fn sample_dataset(
    model: &PopulationModel,
    n: usize,
    seed: u64,
) -> Result<Dataset, SimulationError> {
    GaussianDesign::new(model)?.sample(n, seed)
}
