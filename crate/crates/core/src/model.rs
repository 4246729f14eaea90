//! Ground-truth signals, noisy point observations and SNR calibration.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng;
use crate::spectral::GraphFilter;

/// One real value per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal(pub DVector<f64>);

impl Signal {
    pub fn new(values: DVector<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("signal has non-finite entries".into()));
        }
        Ok(Signal(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn energy(&self) -> f64 {
        self.0.norm_squared()
    }
}

/// Additive white Gaussian noise with precision `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    beta: f64,
}

impl NoiseModel {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Parameter(format!("noise precision must be positive, got {beta}")));
        }
        Ok(NoiseModel { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn std_dev(&self) -> f64 {
        self.beta.recip().sqrt()
    }
}

/// Draws `f ~ N(0, alpha^-1 H^-2)` using the spectral square root
/// `U diag(1 / (sqrt(alpha) h)) z`.
pub fn sample_prior_with<R: Rng + ?Sized>(filter: &GraphFilter, alpha: f64, rng: &mut R) -> Result<Signal> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    let scale = alpha.sqrt();
    let z = DVector::from_fn(filter.n(), |k, _| {
        let g: f64 = StandardNormal.sample(rng);
        g / (scale * filter.response()[k])
    });
    Ok(Signal(&filter.spectrum().eigenvectors * z))
}

pub fn sample_prior(filter: &GraphFilter, alpha: f64, seed: u64) -> Result<Signal> {
    sample_prior_with(filter, alpha, &mut rng::substream(seed, &[]))
}

/// `f[node] + w`, `w ~ N(0, 1 / beta)`.
pub fn observe<R: Rng + ?Sized>(f: &Signal, node: usize, noise: NoiseModel, rng: &mut R) -> Result<f64> {
    if node >= f.len() {
        return Err(Error::Parameter(format!("node {node} out of range for n = {}", f.len())));
    }
    let w: f64 = StandardNormal.sample(rng);
    Ok(f.0[node] + w * noise.std_dev())
}

/// Expected per-node signal power `tr(alpha^-1 H^-2) / N`.
pub fn expected_signal_power(filter: &GraphFilter, alpha: f64) -> f64 {
    filter.inverse_h2_trace() / (alpha * filter.n() as f64)
}

/// Noise precision giving the requested SNR, where SNR is the expected
/// per-node signal power divided by the noise variance.
pub fn beta_for_snr(filter: &GraphFilter, alpha: f64, snr_db: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    if !snr_db.is_finite() {
        return Err(Error::Parameter(format!("snr_db must be finite, got {snr_db}")));
    }
    Ok(10f64.powf(snr_db / 10.0) / expected_signal_power(filter, alpha))
}
