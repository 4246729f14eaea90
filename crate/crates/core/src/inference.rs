//! Gaussian posterior, predictive and evidence computations for the model
//!
//! ```text
//! f ~ N(0, (alpha H^2)^-1),    y_s = Psi f + w,    w ~ N(0, beta^-1 I)
//! ```
//!
//! and expectation-maximization for `(alpha, beta)`.
//!
//! Everything is expressed through the sufficient statistics of the
//! observation log: `Psi^T Psi = diag(counts)`, `Psi^T y_s = sums`, and the
//! per-node scatter of repeated observations around their mean.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{log_det, SymmetricMatrix};
use crate::spectral::GraphFilter;

/// Upper bound on the noise precision estimate.
pub const BETA_CAP: f64 = 1e12;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Running record of sampled nodes and observed values.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationLog {
    entries: Vec<(usize, f64)>,
    counts: Vec<u32>,
    sums: DVector<f64>,
    /// Sum of squared deviations from the node mean, per node.
    scatter: DVector<f64>,
}

impl ObservationLog {
    pub fn new(n: usize) -> Self {
        ObservationLog {
            entries: Vec::new(),
            counts: vec![0; n],
            sums: DVector::zeros(n),
            scatter: DVector::zeros(n),
        }
    }

    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut log = Self::new(n);
        for (node, value) in entries {
            log.push(node, value)?;
        }
        Ok(log)
    }

    pub fn push(&mut self, node: usize, value: f64) -> Result<()> {
        if node >= self.n() {
            return Err(Error::Parameter(format!("node {node} out of range for n = {}", self.n())));
        }
        if !value.is_finite() {
            return Err(Error::Parameter(format!("observation {value} is not finite")));
        }
        let c = self.counts[node];
        if c > 0 {
            let delta = value - self.sums[node] / c as f64;
            self.scatter[node] += delta * delta * c as f64 / (c + 1) as f64;
        }
        self.counts[node] = c + 1;
        self.sums[node] += value;
        self.entries.push((node, value));
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    /// Total number of observations `M`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    /// Diagonal of `Psi^T Psi`.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// `Psi^T y_s`.
    pub fn sums(&self) -> &DVector<f64> {
        &self.sums
    }

    pub fn scatter(&self) -> &DVector<f64> {
        &self.scatter
    }

    /// `||y_s - Psi mu||^2`, from the sufficient statistics.
    pub fn residual_sq(&self, mu: &DVector<f64>) -> f64 {
        let mut total = 0.0;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                let c = c as f64;
                let gap = self.sums[i] / c - mu[i];
                total += self.scatter[i] + c * gap * gap;
            }
        }
        total
    }

    /// `tr(Psi^T Psi C)`.
    pub fn weighted_trace(&self, cov: &SymmetricMatrix) -> f64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| c as f64 * cov.get(i, i))
            .sum()
    }

    fn counts_vector(&self) -> DVector<f64> {
        DVector::from_iterator(self.n(), self.counts.iter().map(|&c| c as f64))
    }
}

/// Signal precision `alpha` and noise precision `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperParams {
    pub alpha: f64,
    pub beta: f64,
}

impl HyperParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let p = HyperParams { alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if ok(self.alpha) && ok(self.beta) {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "hyperparameters must be positive and finite, got alpha = {}, beta = {}",
                self.alpha, self.beta
            )))
        }
    }
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams { alpha: 1.0, beta: 1.0 }
    }
}

/// Gaussian posterior over the signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub mu: DVector<f64>,
    pub cov: SymmetricMatrix,
}

impl Posterior {
    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn variances(&self) -> DVector<f64> {
        self.cov.diagonal()
    }

    pub fn trace_cov(&self) -> f64 {
        self.cov.trace()
    }
}

/// `H^2` together with the quantities EM needs from it: the unit-alpha
/// prior covariance `H^-2` and `ln det H^2`.
#[derive(Debug, Clone)]
pub struct PriorPrecision {
    h2: SymmetricMatrix,
    cov_unit: SymmetricMatrix,
    log_det_h2: f64,
}

impl PriorPrecision {
    /// From `H^2` alone, by Cholesky.
    pub fn from_h2(h2: SymmetricMatrix) -> Result<Self> {
        let chol = h2
            .cholesky()
            .map_err(|_| Error::Numerical("H^2 is not positive definite".into()))?;
        let log_det_h2 = log_det(&chol);
        let cov_unit = SymmetricMatrix::symmetrize(chol.inverse())?;
        Ok(PriorPrecision {
            h2,
            cov_unit,
            log_det_h2,
        })
    }

    /// From a designed filter, exactly in its spectral basis.
    pub fn from_filter(filter: &GraphFilter) -> Self {
        let inv_sq = filter.response().map(|h| 1.0 / (h * h));
        PriorPrecision {
            h2: filter.h2().clone(),
            cov_unit: filter.spectrum().assemble(&inv_sq),
            log_det_h2: filter.log_det_h2(),
        }
    }

    pub fn n(&self) -> usize {
        self.h2.n()
    }

    pub fn h2(&self) -> &SymmetricMatrix {
        &self.h2
    }

    /// `H^-2`
    pub fn cov_unit(&self) -> &SymmetricMatrix {
        &self.cov_unit
    }

    pub fn log_det_h2(&self) -> f64 {
        self.log_det_h2
    }
}

struct EStep {
    posterior: Posterior,
    log_det_precision: f64,
}

fn check_dims(n: usize, log: &ObservationLog) -> Result<()> {
    if n != log.n() {
        return Err(Error::Parameter(format!(
            "H^2 is {n}x{n} but the log covers {} nodes",
            log.n()
        )));
    }
    Ok(())
}

fn e_step(h2: &SymmetricMatrix, log: &ObservationLog, params: HyperParams) -> Result<EStep> {
    let precision = h2
        .scaled(params.alpha)
        .add_diagonal(&(log.counts_vector() * params.beta));
    let chol = precision.cholesky().map_err(|_| {
        Error::Numerical(format!(
            "posterior precision not SPD at alpha = {}, beta = {}",
            params.alpha, params.beta
        ))
    })?;
    let mu = chol.solve(&(log.sums() * params.beta));
    let cov = SymmetricMatrix::symmetrize(chol.inverse())?;
    Ok(EStep {
        posterior: Posterior { mu, cov },
        log_det_precision: log_det(&chol),
    })
}

/// `C = (alpha H^2 + beta Psi^T Psi)^-1`, `mu = beta C Psi^T y_s`.
pub fn posterior(h2: &SymmetricMatrix, log: &ObservationLog, params: HyperParams) -> Result<Posterior> {
    params.validate()?;
    check_dims(h2.n(), log)?;
    Ok(e_step(h2, log, params)?.posterior)
}

/// Predictive mean and variance of a fresh observation at every node:
/// `mu_n` and `C_nn + 1 / beta`.
pub fn predictive(posterior: &Posterior, params: HyperParams) -> (DVector<f64>, DVector<f64>) {
    let noise_var = params.beta.recip();
    (posterior.mu.clone(), posterior.variances().add_scalar(noise_var))
}

/// `ln p(y_s | Psi, alpha, beta)`, the density of `y_s` under
/// `N(0, beta^-1 I + Psi (alpha H^2)^-1 Psi^T)`.
///
/// Evaluated through the posterior precision `A = alpha H^2 + beta Psi^T Psi`:
///
/// ```text
/// 2 ln p = N ln alpha + M ln beta + ln|H^2| - ln|A|
///          - beta ||y_s - Psi mu||^2 - alpha mu^T H^2 mu - M ln 2 pi
/// ```
pub fn log_evidence(h2: &SymmetricMatrix, log: &ObservationLog, params: HyperParams) -> Result<f64> {
    params.validate()?;
    check_dims(h2.n(), log)?;
    if log.is_empty() {
        return Ok(0.0);
    }
    let e = e_step(h2, log, params)?;
    let n = log.n() as f64;
    let m = log.len() as f64;
    let mu = &e.posterior.mu;
    Ok(0.5
        * (n * params.alpha.ln() + m * params.beta.ln() + h2.log_det_spd()?
            - e.log_det_precision
            - params.beta * log.residual_sq(mu)
            - params.alpha * h2.quadratic_form(mu)
            - m * LN_2PI))
}

/// Stopping rule and iteration cap for [`em_fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmOptions {
    /// Stop once both `|new - old| / old` fall below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EmOptions {
    fn default() -> Self {
        EmOptions {
            tol: 1e-6,
            max_iter: 200,
        }
    }
}

impl EmOptions {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 || self.max_iter == 0 {
            return Err(Error::Parameter(format!(
                "EM needs tol > 0 and max_iter >= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EmResult {
    pub params: HyperParams,
    /// Posterior at the final `params`.
    pub posterior: Posterior,
    /// Number of M-steps taken.
    pub iterations: usize,
    pub converged: bool,
    /// Parameter iterates, starting with the initial value.
    pub path: Vec<HyperParams>,
    /// Log evidence at each entry of `path`.
    pub evidence_trace: Vec<f64>,
}

fn rel_change(new: f64, old: f64) -> f64 {
    (new - old).abs() / old.abs()
}

/// The data seen through the observed nodes only.
///
/// With `S` the set of observed nodes, `c` their counts and `G = H^-2`, the
/// matrix `B = D_c^{1/2} G_SS D_c^{1/2}` does not depend on `(alpha, beta)`.
/// Given its eigenpairs `(lambda_k, v_k)` and `z = V^T D_c^{1/2} ybar`, every
/// E-step quantity is a sum over `k` of rational functions of
/// `rho = beta / alpha`:
///
/// ```text
/// tr(H^2 C)          = (N - |S| + sum 1/(1+rho l)) / alpha
/// mu^T H^2 mu        = rho^2 sum l z^2 / (1+rho l)^2
/// ||y_s - Psi mu||^2 = scatter + sum z^2 / (1+rho l)^2
/// tr(Psi^T Psi C)    = sum rho l / (1+rho l) / beta
/// ```
struct ObservedBasis {
    n: f64,
    m: f64,
    observed: f64,
    scatter: f64,
    lambda: Vec<f64>,
    z_sq: Vec<f64>,
}

struct EmStep {
    next: HyperParams,
    log_evidence: f64,
}

impl ObservedBasis {
    fn new(prior: &PriorPrecision, log: &ObservationLog) -> Result<Self> {
        let nodes: Vec<usize> = (0..log.n()).filter(|&i| log.counts[i] > 0).collect();
        let k = nodes.len();
        let sqrt_c: Vec<f64> = nodes.iter().map(|&i| (log.counts[i] as f64).sqrt()).collect();
        let g = prior.cov_unit();
        let b = DMatrix::from_fn(k, k, |a, b| sqrt_c[a] * g.get(nodes[a], nodes[b]) * sqrt_c[b]);
        let b = SymmetricMatrix::symmetrize(b)?;
        let eig = SymmetricEigen::try_new(b.into_inner(), f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Numerical("eigensolver failed on observed block".into()))?;
        // D_c^{1/2} ybar = sums / sqrt(c)
        let scaled = DVector::from_fn(k, |a, _| log.sums[nodes[a]] / sqrt_c[a]);
        let z = eig.eigenvectors.tr_mul(&scaled);
        Ok(ObservedBasis {
            n: log.n() as f64,
            m: log.len() as f64,
            observed: k as f64,
            scatter: nodes.iter().map(|&i| log.scatter[i]).sum(),
            lambda: eig.eigenvalues.iter().map(|l| l.max(0.0)).collect(),
            z_sq: z.iter().map(|v| v * v).collect(),
        })
    }

    /// Log evidence at `p` and the M-step update from the posterior at `p`.
    fn step(&self, p: HyperParams) -> Result<EmStep> {
        let rho = p.beta / p.alpha;
        let mut shrink_sum = 0.0; // sum 1/(1+rho l)
        let mut log_det = 0.0; // sum ln(1+rho l)
        let mut quad = 0.0; // sum z^2/(1+rho l)
        let mut resid = 0.0; // sum z^2/(1+rho l)^2
        let mut smooth = 0.0; // sum l z^2/(1+rho l)^2
        for (&l, &zz) in self.lambda.iter().zip(&self.z_sq) {
            let d = 1.0 + rho * l;
            let inv = 1.0 / d;
            shrink_sum += inv;
            log_det += d.ln();
            quad += zz * inv;
            resid += zz * inv * inv;
            smooth += l * zz * inv * inv;
        }
        let log_evidence = 0.5
            * (self.m * (p.beta.ln() - LN_2PI) - p.beta * self.scatter - log_det - p.beta * quad);

        let tr_h2c = (self.n - self.observed + shrink_sum) / p.alpha;
        let mu_h2_mu = rho * rho * smooth;
        let tr_psi_c = (self.observed - shrink_sum) / p.beta;
        let alpha = self.n / (tr_h2c + mu_h2_mu);
        let beta = (self.m / (self.scatter + resid + tr_psi_c)).min(BETA_CAP);
        let next = HyperParams::new(alpha, beta).map_err(|_| {
            Error::Numerical(format!("EM produced invalid estimates alpha = {alpha}, beta = {beta}"))
        })?;
        Ok(EmStep { next, log_evidence })
    }
}

/// Maximum-likelihood `(alpha, beta)` by EM, started from `init`.
///
/// E-step: posterior at the current estimate. M-step:
///
/// ```text
/// alpha' = N / (tr(H^2 C) + mu^T H^2 mu)
/// beta'  = M / (||y_s - Psi mu||^2 + tr(Psi^T Psi C))
/// ```
///
/// iterated until both relative changes drop below `opts.tol`.
pub fn em_fit(
    h2: &SymmetricMatrix,
    log: &ObservationLog,
    init: HyperParams,
    opts: &EmOptions,
) -> Result<EmResult> {
    check_dims(h2.n(), log)?;
    em_fit_with(&PriorPrecision::from_h2(h2.clone())?, log, init, opts)
}

/// [`em_fit`] with the prior quantities precomputed.
pub fn em_fit_with(
    prior: &PriorPrecision,
    log: &ObservationLog,
    init: HyperParams,
    opts: &EmOptions,
) -> Result<EmResult> {
    init.validate()?;
    opts.validate()?;
    check_dims(prior.n(), log)?;
    if log.is_empty() {
        return Err(Error::Precondition("EM needs at least one observation".into()));
    }
    let basis = ObservedBasis::new(prior, log)?;

    let mut params = init;
    let mut path = vec![init];
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let step = basis.step(params)?;
        trace.push(step.log_evidence);
        let next = step.next;
        iterations += 1;
        converged = rel_change(next.alpha, params.alpha) < opts.tol
            && rel_change(next.beta, params.beta) < opts.tol;
        params = next;
        path.push(params);
        if converged {
            break;
        }
    }
    trace.push(basis.step(params)?.log_evidence);
    let posterior = e_step(prior.h2(), log, params)?.posterior;
    Ok(EmResult {
        params,
        posterior,
        iterations,
        converged,
        path,
        evidence_trace: trace,
    })
}
