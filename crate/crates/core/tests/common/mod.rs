//! Reference computations that do not go through the library's inference
//! code: dense joint-Gaussian conditioning, direct multivariate normal
//! densities and a textbook N-dimensional EM loop.

#![allow(dead_code)]

use active_gsp::graph::{build_random_geometric, build_watts_strogatz, combinatorial_laplacian};
use active_gsp::spectral::{design_highpass, eigendecompose, FilterDesign, GraphFilter};
use active_gsp::{HyperParams, ObservationLog, SymmetricMatrix};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub const LN_2PI: f64 = 1.8378770664093453;

/// Sampling matrix with one row per logged observation.
pub fn sampling_matrix(log: &ObservationLog) -> DMatrix<f64> {
    let mut psi = DMatrix::zeros(log.len(), log.n());
    for (r, &(node, _)) in log.entries().iter().enumerate() {
        psi[(r, node)] = 1.0;
    }
    psi
}

pub fn stacked_y(log: &ObservationLog) -> DVector<f64> {
    DVector::from_iterator(log.len(), log.entries().iter().map(|&(_, v)| v))
}

/// Prior covariance `(alpha H^2)^-1` by LU inversion.
pub fn prior_cov(h2: &SymmetricMatrix, alpha: f64) -> DMatrix<f64> {
    (h2.as_matrix() * alpha).try_inverse().expect("H^2 invertible")
}

/// Conditions the joint normal of `(f, y_s)` on `y_s`.
pub fn condition(h2: &SymmetricMatrix, log: &ObservationLog, p: HyperParams) -> (DVector<f64>, DMatrix<f64>) {
    let prior = prior_cov(h2, p.alpha);
    if log.is_empty() {
        return (DVector::zeros(log.n()), prior);
    }
    let psi = sampling_matrix(log);
    let cross = &prior * psi.transpose();
    let s = &psi * &cross + DMatrix::identity(log.len(), log.len()) / p.beta;
    let s_inv = s.try_inverse().expect("marginal covariance invertible");
    let gain = &cross * s_inv;
    let mu = &gain * stacked_y(log);
    let cov = &prior - &gain * cross.transpose();
    (mu, cov)
}

/// log N(x; 0, cov) evaluated with LU determinant and inverse.
pub fn mvn_logpdf(x: &DVector<f64>, cov: &DMatrix<f64>) -> f64 {
    let k = x.len() as f64;
    let det = cov.determinant();
    let inv = cov.clone().try_inverse().unwrap();
    -0.5 * (k * LN_2PI + det.ln() + (x.transpose() * inv * x)[0])
}

/// Marginal density of the stacked observations.
pub fn evidence_oracle(h2: &SymmetricMatrix, log: &ObservationLog, p: HyperParams) -> f64 {
    if log.is_empty() {
        return 0.0;
    }
    let psi = sampling_matrix(log);
    let cov = &psi * prior_cov(h2, p.alpha) * psi.transpose()
        + DMatrix::identity(log.len(), log.len()) / p.beta;
    mvn_logpdf(&stacked_y(log), &cov)
}

/// One EM update written directly from the stacked model: posterior by
/// conditioning, then the closed-form maximizers.
pub fn em_update_oracle(h2: &SymmetricMatrix, log: &ObservationLog, p: HyperParams) -> HyperParams {
    let (mu, c) = condition(h2, log, p);
    let h2m = h2.as_matrix();
    let n = log.n() as f64;
    let m = log.len() as f64;
    let psi = sampling_matrix(log);
    let r = stacked_y(log) - &psi * &mu;
    let alpha = n / ((h2m * &c).trace() + (mu.transpose() * h2m * &mu)[0]);
    let beta = m / (r.norm_squared() + (psi.transpose() * &psi * &c).trace());
    HyperParams { alpha, beta: beta.min(1e12) }
}

/// Random connected graph on `n` nodes from one of the two families.
pub fn small_filter<R: Rng>(rng: &mut R, n: usize, floor_eps: f64) -> GraphFilter {
    let seed: u64 = rng.random();
    let g = if rng.random_bool(0.5) && n >= 4 {
        build_watts_strogatz(n, 2, 0.5, seed).unwrap()
    } else {
        build_random_geometric(n, 0.9, 0.5, seed).unwrap()
    };
    let spec = eigendecompose(&combinatorial_laplacian(&g)).unwrap();
    let design = FilterDesign {
        cutoff_frac: rng.random_range(0.2..0.6),
        transition_frac: rng.random_range(0.0..0.4),
        floor_eps,
    };
    design_highpass(spec, &design).unwrap()
}

/// Log with `m` observations at uniformly random nodes (repeats allowed).
pub fn random_log<R: Rng>(rng: &mut R, n: usize, m: usize) -> ObservationLog {
    let mut log = ObservationLog::new(n);
    for _ in 0..m {
        log.push(rng.random_range(0..n), rng.random_range(-3.0..3.0)).unwrap();
    }
    log
}

pub fn max_abs(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}
