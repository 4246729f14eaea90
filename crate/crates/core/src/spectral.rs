//! Graph Fourier basis and spectral-domain filter design.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

/// Eigenpairs of a symmetric PSD matrix, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors as columns. Each column's first entry with
    /// magnitude above `1e-12` is positive.
    pub eigenvectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.n() - 1]
    }

    /// `U diag(values) U^T`.
    pub fn assemble(&self, values: &DVector<f64>) -> SymmetricMatrix {
        SymmetricMatrix::from_spectral(&self.eigenvectors, values)
    }
}

/// Full symmetric eigendecomposition.
///
/// Eigenvalues that come out slightly negative from round-off are clamped to
/// zero; anything below `-1e-9 * max(1, |lambda|_max)` is rejected as not PSD.
pub fn eigendecompose(l: &SymmetricMatrix) -> Result<Spectrum> {
    let n = l.n();
    if n == 0 {
        return Err(Error::Parameter("empty matrix".into()));
    }
    let eig = SymmetricEigen::try_new(l.as_matrix().clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let scale = eig.eigenvalues.amax().max(1.0);
    let mut values = DVector::zeros(n);
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[src];
        if lambda < -1e-9 * scale {
            return Err(Error::Parameter(format!(
                "matrix is not positive semidefinite (eigenvalue {lambda})"
            )));
        }
        values[k] = lambda.max(0.0);
        let mut col = eig.eigenvectors.column(src).into_owned();
        if let Some(first) = col.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
        vectors.set_column(k, &col);
    }
    Ok(Spectrum {
        eigenvalues: values,
        eigenvectors: vectors,
    })
}

/// Parameters of the ramp high-pass response, as fractions of the largest
/// graph frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterDesign {
    pub cutoff_frac: f64,
    pub transition_frac: f64,
    pub floor_eps: f64,
}

impl Default for FilterDesign {
    fn default() -> Self {
        FilterDesign {
            cutoff_frac: 0.3,
            transition_frac: 0.2,
            floor_eps: 1e-3,
        }
    }
}

impl FilterDesign {
    pub fn validate(&self) -> Result<()> {
        let FilterDesign {
            cutoff_frac,
            transition_frac,
            floor_eps,
        } = *self;
        if !(cutoff_frac > 0.0 && cutoff_frac < 1.0) {
            return Err(Error::Parameter(format!("cutoff_frac {cutoff_frac} not in (0, 1)")));
        }
        if !(transition_frac >= 0.0 && transition_frac.is_finite()) {
            return Err(Error::Parameter(format!("transition_frac {transition_frac} must be >= 0")));
        }
        if !(floor_eps > 0.0 && floor_eps < 1.0) {
            return Err(Error::Parameter(format!("floor_eps {floor_eps} not in (0, 1)")));
        }
        if cutoff_frac + 0.5 * transition_frac > 1.0 {
            return Err(Error::Parameter(format!(
                "passband is empty: cutoff_frac + transition_frac / 2 = {} > 1",
                cutoff_frac + 0.5 * transition_frac
            )));
        }
        Ok(())
    }

    /// Response at graph frequency `lambda` for a spectrum topping out at
    /// `lambda_max`.
    pub fn response_at(&self, lambda: f64, lambda_max: f64) -> f64 {
        let center = self.cutoff_frac * lambda_max;
        let width = self.transition_frac * lambda_max;
        let lo = center - 0.5 * width;
        let hi = center + 0.5 * width;
        let raw = if lambda <= lo {
            0.0
        } else if lambda >= hi {
            1.0
        } else {
            (lambda - lo) / width
        };
        raw.clamp(self.floor_eps, 1.0)
    }
}

/// A unit-gain high-pass filter `H = U diag(h) U^T` together with `H^2`.
#[derive(Debug, Clone)]
pub struct GraphFilter {
    spectrum: Spectrum,
    response: DVector<f64>,
    h: SymmetricMatrix,
    h2: SymmetricMatrix,
    floor_eps: f64,
    cutoff: f64,
    transition_width: f64,
}

impl GraphFilter {
    /// Filter with an arbitrary response. The response must be nondecreasing
    /// in frequency, lie in `[floor_eps, 1]` and reach 1.
    pub fn from_response(spectrum: Spectrum, response: DVector<f64>, floor_eps: f64) -> Result<Self> {
        Self::build(spectrum, response, floor_eps, f64::NAN, f64::NAN)
    }

    fn build(
        spectrum: Spectrum,
        response: DVector<f64>,
        floor_eps: f64,
        cutoff: f64,
        transition_width: f64,
    ) -> Result<Self> {
        if response.len() != spectrum.n() {
            return Err(Error::Parameter("response length does not match spectrum".into()));
        }
        if !(floor_eps > 0.0 && floor_eps <= 1.0) {
            return Err(Error::Parameter(format!("floor_eps {floor_eps} not in (0, 1]")));
        }
        if response.iter().any(|&h| !(h >= floor_eps && h <= 1.0)) {
            return Err(Error::Parameter("response outside [floor_eps, 1]".into()));
        }
        if response.max() != 1.0 {
            return Err(Error::Parameter("response must have unit gain".into()));
        }
        if response.as_slice().windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Parameter("response must be nondecreasing".into()));
        }
        let h = spectrum.assemble(&response);
        let h2 = spectrum.assemble(&response.map(|v| v * v));
        Ok(GraphFilter {
            spectrum,
            response,
            h,
            h2,
            floor_eps,
            cutoff,
            transition_width,
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `h(lambda_k)` for each eigenvalue, ascending frequency.
    pub fn response(&self) -> &DVector<f64> {
        &self.response
    }

    pub fn h(&self) -> &SymmetricMatrix {
        &self.h
    }

    pub fn h2(&self) -> &SymmetricMatrix {
        &self.h2
    }

    pub fn floor_eps(&self) -> f64 {
        self.floor_eps
    }

    /// Cutoff frequency in Laplacian units; NaN for custom responses.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn transition_width(&self) -> f64 {
        self.transition_width
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    /// `diag(H^-2)`: per-node prior variance at `alpha = 1`.
    pub fn prior_variances(&self) -> DVector<f64> {
        let u = &self.spectrum.eigenvectors;
        DVector::from_fn(self.n(), |i, _| {
            u.row(i)
                .iter()
                .zip(self.response.iter())
                .map(|(x, h)| x * x / (h * h))
                .sum()
        })
    }

    /// `tr(H^-2) = sum_k h_k^-2`.
    pub fn inverse_h2_trace(&self) -> f64 {
        self.response.iter().map(|h| 1.0 / (h * h)).sum()
    }

    /// `ln det H^2 = 2 sum_k ln h_k`.
    pub fn log_det_h2(&self) -> f64 {
        2.0 * self.response.iter().map(|h| h.ln()).sum::<f64>()
    }
}

/// Ramp high-pass design: `h = floor_eps` below `lambda_c - w/2`, `h = 1`
/// above `lambda_c + w/2`, linear in between, clamped to `[floor_eps, 1]`.
pub fn design_highpass(spectrum: Spectrum, design: &FilterDesign) -> Result<GraphFilter> {
    design.validate()?;
    let lambda_max = spectrum.lambda_max();
    if lambda_max.is_nan() || lambda_max <= 0.0 {
        return Err(Error::Parameter("spectrum has no positive frequency".into()));
    }
    let response = spectrum.eigenvalues.map(|l| design.response_at(l, lambda_max));
    GraphFilter::build(
        spectrum,
        response,
        design.floor_eps,
        design.cutoff_frac * lambda_max,
        design.transition_frac * lambda_max,
    )
}

/// Prior covariance `alpha^-1 H^-2 = U diag(1 / (alpha h^2)) U^T`.
pub fn prior_covariance(filter: &GraphFilter, alpha: f64) -> Result<SymmetricMatrix> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
    }
    let values = filter.response.map(|h| 1.0 / (alpha * h * h));
    Ok(filter.spectrum.assemble(&values))
}
