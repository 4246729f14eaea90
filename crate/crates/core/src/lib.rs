//! Online active sampling of approximately bandlimited graph signals.
//!
//! A signal on the vertices of a weighted graph is modelled by a Gaussian
//! random field whose precision is `alpha * H^2`, with `H` a unit-gain
//! high-pass graph filter. Nodes are observed one at a time under Gaussian
//! noise of precision `beta`. After every observation both precisions are
//! re-estimated by expectation-maximization and the next node is the one
//! with the largest predictive variance.
//!
//! Module map:
//!
//! * [`graph`]: Watts-Strogatz and random geometric generators, Laplacians,
//!   edge-list IO.
//! * [`spectral`]: eigendecomposition and spectral high-pass filter design.
//! * [`model`]: prior sampling, noisy point observations, SNR calibration.
//! * [`inference`]: posterior, predictive, evidence and EM.
//! * [`sampler`]: the sequential sampling loop and the random baseline.
//! * [`harness`]: seeded multi-trial experiments, CSV traces and aggregates.

pub mod error;
pub mod graph;
pub mod harness;
pub mod inference;
pub mod matrix;
pub mod model;
pub mod rng;
pub mod sampler;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::Graph;
pub use inference::{EmOptions, EmResult, HyperParams, ObservationLog, Posterior};
pub use matrix::SymmetricMatrix;
pub use model::{NoiseModel, Signal};
pub use sampler::{SamplerConfig, SamplingContext, TrialTrace};
pub use spectral::{FilterDesign, GraphFilter, Spectrum};
