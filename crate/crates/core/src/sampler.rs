//! Sequential node selection: the active uncertainty-sampling loop and the
//! uniform random baseline, sharing one estimation pipeline.

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{self, EmOptions, HyperParams, ObservationLog, Posterior, PriorPrecision};
use crate::matrix::SymmetricMatrix;
use crate::model::{self, NoiseModel, Signal};
use crate::rng::{self, Purpose, StreamRng};
use crate::spectral::GraphFilter;

/// How the first node is chosen, before any data exists.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FirstNodeRule {
    /// argmax of `diag(H^-2)`; independent of `alpha`.
    #[default]
    MaxPriorVariance,
    Random,
}

/// Hyperparameter handling during a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", deny_unknown_fields)]
pub enum HyperMode {
    /// Re-estimate by EM after every observation, warm-started from the
    /// previous estimate; `init` seeds the very first fit.
    Estimate { init: HyperParams },
    /// Skip EM and use these values throughout.
    Fixed { params: HyperParams },
}

impl Default for HyperMode {
    fn default() -> Self {
        HyperMode::Estimate {
            init: HyperParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerConfig {
    pub m_max: usize,
    /// Threshold on `tr(C) / mu^T mu`; `None` disables the stopping rule.
    pub stop_c: Option<f64>,
    pub em: EmOptions,
    pub first_node_rule: FirstNodeRule,
    pub min_samples_before_stop: usize,
    pub hyper: HyperMode,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            m_max: 100,
            stop_c: None,
            em: EmOptions::default(),
            first_node_rule: FirstNodeRule::default(),
            min_samples_before_stop: 5,
            hyper: HyperMode::default(),
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m_max == 0 {
            return Err(Error::Parameter("m_max must be at least 1".into()));
        }
        if let Some(c) = self.stop_c {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Parameter(format!("stop_c must be positive, got {c}")));
            }
        }
        self.em.validate()?;
        match self.hyper {
            HyperMode::Estimate { init } => init.validate(),
            HyperMode::Fixed { params } => params.validate(),
        }
    }
}

/// Read-only per-graph state shared by all trials.
#[derive(Debug, Clone)]
pub struct SamplingContext {
    prior: PriorPrecision,
    prior_variances: DVector<f64>,
}

impl SamplingContext {
    pub fn new(filter: &GraphFilter) -> Self {
        let prior = PriorPrecision::from_filter(filter);
        let prior_variances = prior.cov_unit().diagonal();
        SamplingContext {
            prior,
            prior_variances,
        }
    }

    pub fn n(&self) -> usize {
        self.prior.n()
    }

    pub fn h2(&self) -> &SymmetricMatrix {
        self.prior.h2()
    }

    pub fn prior(&self) -> &PriorPrecision {
        &self.prior
    }

    /// `diag(H^-2)`
    pub fn prior_variances(&self) -> &DVector<f64> {
        &self.prior_variances
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Budget,
    Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub node: usize,
    pub y: f64,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub em_iters: usize,
    pub trace_c: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialTrace {
    pub records: Vec<StepRecord>,
    pub stop_reason: StopReason,
    /// Posterior mean after the last step.
    pub estimate: DVector<f64>,
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax_lowest(values: &DVector<f64>) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Node with the largest predictive variance `C_nn + 1/beta`.
///
/// The noise term is the same for every node, so the argmax is taken over
/// `diag(C)` directly.
pub fn select_next(posterior: &Posterior, _params: HyperParams) -> usize {
    argmax_lowest(&posterior.variances())
}

/// `tr(C) / mu^T mu <= c`, guarded against tiny estimates and too few samples.
pub fn stopping_reached(posterior: &Posterior, samples: usize, config: &SamplerConfig) -> bool {
    let Some(c) = config.stop_c else {
        return false;
    };
    let energy = posterior.mu.norm_squared();
    samples >= config.min_samples_before_stop && energy > 1e-12 && posterior.trace_cov() / energy <= c
}

/// `||estimate - truth|| / ||truth||`.
pub fn relative_error(estimate: &DVector<f64>, truth: &Signal) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::Parameter(format!(
            "estimate has {} entries, truth has {}",
            estimate.len(),
            truth.len()
        )));
    }
    let norm = truth.values().norm();
    if norm == 0.0 {
        return Err(Error::Parameter("truth signal has zero norm".into()));
    }
    Ok((estimate - truth.values()).norm() / norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Selection {
    Uncertainty,
    Uniform,
}

/// One trial of the active sampling loop.
pub fn run_active(
    ctx: &SamplingContext,
    truth: &Signal,
    noise: NoiseModel,
    config: &SamplerConfig,
    seed: u64,
) -> Result<TrialTrace> {
    run(ctx, truth, noise, config, seed, Selection::Uncertainty)
}

/// Same pipeline as [`run_active`] with each node drawn uniformly at random
/// (with replacement).
pub fn run_random(
    ctx: &SamplingContext,
    truth: &Signal,
    noise: NoiseModel,
    config: &SamplerConfig,
    seed: u64,
) -> Result<TrialTrace> {
    run(ctx, truth, noise, config, seed, Selection::Uniform)
}

fn run(
    ctx: &SamplingContext,
    truth: &Signal,
    noise: NoiseModel,
    config: &SamplerConfig,
    seed: u64,
    selection: Selection,
) -> Result<TrialTrace> {
    config.validate()?;
    let n = ctx.n();
    if truth.len() != n {
        return Err(Error::Parameter(format!(
            "truth has {} entries but the graph has {n} nodes",
            truth.len()
        )));
    }
    let mut select_rng: StreamRng = rng::substream(seed, &[Purpose::Selection as u64]);
    let mut noise_rng: StreamRng = rng::substream(seed, &[Purpose::Noise as u64]);

    let (mut params, estimate) = match config.hyper {
        HyperMode::Estimate { init } => (init, true),
        HyperMode::Fixed { params } => (params, false),
    };
    let mut node = match (selection, config.first_node_rule) {
        (Selection::Uncertainty, FirstNodeRule::MaxPriorVariance) => argmax_lowest(ctx.prior_variances()),
        _ => select_rng.random_range(0..n),
    };

    let mut log = ObservationLog::new(n);
    let mut records = Vec::with_capacity(config.m_max);
    let mut stop_reason = StopReason::Budget;
    let mut estimate_mu = DVector::zeros(n);
    for t in 1..=config.m_max {
        let y = model::observe(truth, node, noise, &mut noise_rng)?;
        log.push(node, y)?;
        let (post, em_iters) = if estimate {
            let fit = inference::em_fit_with(ctx.prior(), &log, params, &config.em)?;
            params = fit.params;
            (fit.posterior, fit.iterations)
        } else {
            (inference::posterior(ctx.h2(), &log, params)?, 0)
        };
        records.push(StepRecord {
            t,
            node,
            y,
            alpha_hat: params.alpha,
            beta_hat: params.beta,
            em_iters,
            trace_c: post.trace_cov(),
            rel_error: relative_error(&post.mu, truth)?,
        });
        let next = match selection {
            Selection::Uncertainty => select_next(&post, params),
            Selection::Uniform => select_rng.random_range(0..n),
        };
        let stop = stopping_reached(&post, log.len(), config);
        estimate_mu = post.mu;
        if stop {
            stop_reason = StopReason::Threshold;
            break;
        }
        node = next;
    }
    Ok(TrialTrace {
        records,
        stop_reason,
        estimate: estimate_mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn post_with_diag(d: &[f64], mu: &[f64]) -> Posterior {
        let n = d.len();
        let cov = SymmetricMatrix::symmetrize(nalgebra::DMatrix::from_diagonal(&DVector::from_row_slice(d))).unwrap();
        assert_eq!(mu.len(), n);
        Posterior {
            mu: DVector::from_row_slice(mu),
            cov,
        }
    }

    #[test]
    fn selects_largest_variance() {
        let p = post_with_diag(&[1.0, 2.0, 3.0], &[0.0; 3]);
        assert_eq!(select_next(&p, HyperParams::default()), 2);
        let tie = post_with_diag(&[5.0, 5.0, 1.0], &[0.0; 3]);
        assert_eq!(select_next(&tie, HyperParams::default()), 0);
        for beta in [1e-6, 1.0, 1e6] {
            assert_eq!(select_next(&p, HyperParams::new(1.0, beta).unwrap()), 2);
        }
    }

    #[test]
    fn stopping_rule() {
        let config = SamplerConfig {
            stop_c: Some(0.01),
            min_samples_before_stop: 5,
            ..Default::default()
        };
        // tr(C) = 0.5, mu^T mu = 100
        let p = post_with_diag(&[0.25, 0.25], &[6.0, 8.0]);
        assert!(stopping_reached(&p, 5, &config));
        assert!(!stopping_reached(&p, 4, &config));
        let zero = post_with_diag(&[0.25, 0.25], &[0.0, 0.0]);
        assert!(!stopping_reached(&zero, 10, &config));
        let off = SamplerConfig { stop_c: None, ..config.clone() };
        assert!(!stopping_reached(&p, 10, &off));
        let strict = SamplerConfig { stop_c: Some(0.001), ..config };
        assert!(!stopping_reached(&p, 10, &strict));
    }

    #[test]
    fn relative_error_cases() {
        let truth = Signal::new(DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_eq!(relative_error(truth.values(), &truth).unwrap(), 0.0);
        assert_eq!(relative_error(&DVector::zeros(2), &truth).unwrap(), 1.0);
        let e = relative_error(&DVector::from_vec(vec![0.0, 1.0]), &truth).unwrap();
        assert!((e - 2f64.sqrt()).abs() < 1e-15);
        let zero = Signal::new(DVector::zeros(2)).unwrap();
        assert!(relative_error(&DVector::zeros(2), &zero).is_err());
        assert!(relative_error(&DVector::zeros(3), &truth).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SamplerConfig { m_max: 0, ..Default::default() }.validate().is_err());
        assert!(SamplerConfig { stop_c: Some(0.0), ..Default::default() }.validate().is_err());
        let bad = HyperMode::Fixed { params: HyperParams { alpha: 0.0, beta: 1.0 } };
        assert!(SamplerConfig { hyper: bad, ..Default::default() }.validate().is_err());
    }
}
