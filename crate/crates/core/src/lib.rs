//! Bayesian node-level outlier detection on graph signals.
//!
//! A graph signal is modelled as an IGMRF-smooth latent component plus a
//! sparse spike-and-slab outlier term and Gaussian noise. Posterior outlier
//! probabilities come from a Gibbs sampler ([`sampler`]); a brute-force
//! enumeration-plus-quadrature posterior ([`oracle`]) checks it on tiny
//! graphs. [`bench`] reproduces the simulation study against a local median
//! filtering baseline ([`baselines`]).
//!
//! Numeric code is generic over [`Real`] (`f32`, `f64`); the aliases below
//! fix it to `f64`, which is what the benchmark harness and CLI use.

pub mod baselines;
pub mod bench;
pub mod config;
pub mod error;
pub mod generate;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod robust;
pub mod sampler;
pub mod scalar;
pub mod spectrum;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Graph = graph::Graph<f64>;
pub type LaplacianSpectrum = spectrum::LaplacianSpectrum<f64>;
pub type GroundTruth = synth::GroundTruth<f64>;
pub type ChainState = sampler::ChainState<f64>;
pub type PosteriorSummary = sampler::PosteriorSummary<f64>;
