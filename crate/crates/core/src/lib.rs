//! Consensus-lab: a numerical laboratory for multi-agent consensus dynamics.
//!
//! The crate builds the network Laplacians of four model families (path,
//! 2D grid, dense periodic band, fractional), integrates the first- and
//! second-order consensus dynamics, analyzes spectra against closed forms,
//! synthesizes minimal-energy controls to consensus through finite-horizon
//! Gramians, and realizes the two continuum limits (graph limit to non-local
//! diffusion, mean-field limit to non-local transport) together with the
//! subordination identity that bridges them.
//!
//! All numerical kernels are generic over the [`scalar::Scalar`] type;
//! `f64` is the working default and [`dd::Dd`] (double-double) extends the
//! dynamic range where Gramian spectra collapse below `f64` resolution.

pub mod control;
pub mod csvio;
pub mod dd;
pub mod dynamics;
pub mod error;
pub mod limits;
pub mod linalg;
pub mod network;
pub mod profile;
pub mod rng;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Concrete `f64` aliases for the main value types.
pub type Mat64 = linalg::Mat<f64>;
pub type NetworkModel64 = network::NetworkModel<f64>;
pub type ControlPattern64 = network::ControlPattern<f64>;
pub type Spectrum64 = spectral::Spectrum<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
pub type Gramian64 = control::Gramian<f64>;
pub type DistributionField64 = limits::DistributionField<f64>;
pub type EmpiricalMeasure64 = limits::EmpiricalMeasure<f64>;

/// Concrete `f32` aliases.
pub type Mat32 = linalg::Mat<f32>;
pub type NetworkModel32 = network::NetworkModel<f32>;
pub type Trajectory32 = dynamics::Trajectory<f32>;

/// Double-double aliases for the high-dynamic-range paths.
pub type MatDd = linalg::Mat<dd::Dd>;
pub type NetworkModelDd = network::NetworkModel<dd::Dd>;
pub type GramianDd = control::Gramian<dd::Dd>;
