//! Information-geometric reactivity of multipartite qubit states.
//!
//! Detector outcomes of a state are turned into Shannon-entropy based
//! distances, areas and volumes; averaging these over detector directions
//! yields the reactivity (mean boundary content over mean volume). Reference
//! correlation measures (concurrence, global quantum discord, quantum
//! relative entropy) are provided for comparison.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

#![forbid(unsafe_code)]

pub mod avg;
pub mod corrmeasures;
pub mod error;
pub mod infogeom;
pub mod measure;
pub mod props;
pub mod qcore;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrix = qcore::ComplexMatrix<f64>;
pub type DensityMatrix = qcore::DensityMatrix<f64>;
pub type KrausChannel = qcore::KrausChannel<f64>;
pub type Direction = measure::Direction<f64>;
pub type DetectorSetting = measure::DetectorSetting<f64>;
pub type OutcomeDistribution = measure::OutcomeDistribution<f64>;
pub type EntropyProfile = infogeom::EntropyProfile<f64>;
pub type AveragingMode = avg::AveragingMode<f64>;
pub type MeanEstimate = avg::MeanEstimate<f64>;
pub type ReactivityResult = avg::ReactivityResult<f64>;
pub type DiscordSearchConfig = corrmeasures::DiscordSearchConfig<f64>;
pub type DiscordResult = corrmeasures::DiscordResult<f64>;

pub type DensityMatrixF32 = qcore::DensityMatrix<f32>;
pub type AveragingModeF32 = avg::AveragingMode<f32>;
