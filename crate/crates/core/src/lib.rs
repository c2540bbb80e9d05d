//! Finite Blaschke products with zeros clustering at the unit circle, their
//! boundary derivatives, distribution functions on the circle, logarithmic
//! means, and model-space kernel combinations.
//!
//! Points of the closed disc are stored as `(1 - |z|, arg z)` so that zeros
//! within `1e-30` of the circle keep full relative precision.

pub mod blaschke;
pub mod boundary;
pub mod disc;
pub mod error;
pub mod logmean;
pub mod modelspace;
pub mod zeroseq;

pub use blaschke::BlaschkeProduct;
pub use boundary::{make_grid, BoundaryGrid, BoundaryNode, DistributionProfile, WeakSummary};
pub use disc::DiscPoint;
pub use error::{Error, Result};
pub use logmean::{LogMean, LogMeanCurve};
pub use modelspace::{ClaimStatistic, Interpolant, ModelFunction, WitnessRow, WitnessWeight};
pub use num_complex::Complex64;
pub use zeroseq::{AngleRule, Zero, ZeroSequence};
