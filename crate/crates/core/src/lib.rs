//! Center-outward distribution and quantile functions estimated by discrete
//! optimal transport, their log-sum-exp smoothing, and the multivariate risk
//! measures built on them.
//!
//! Pipeline:
//!
//! 1. [`grids`] builds reference points in the open unit ball.
//! 2. [`transport`] couples the sample with one or more grids by optimal
//!    assignment and averages the grid images.
//! 3. [`smooth`] solves for the convex potential of the coupling and
//!    evaluates its smoothed version, gradient map and Jacobian.
//! 4. [`risk`], [`volumes`] and [`tails`] derive maximal-correlation risk,
//!    quantile-region volumes and extreme-value-index estimates.
//! 5. [`simulate`] provides benchmark distributions with known quantiles and
//!    [`io`]/[`pipeline`] connect everything to files.
//!
//! The numeric core is generic over [`Scalar`] (`f32`/`f64`); the aliases
//! below fix the common `f64` instantiations.

pub mod error;
pub mod grids;
pub mod io;
mod linalg;
pub mod pipeline;
pub mod points;
pub mod risk;
pub mod rng;
pub mod scalar;
pub mod simulate;
pub mod smooth;
pub mod tails;
pub mod transport;
pub mod volumes;

pub use error::{Error, Result};
pub use grids::{Grid, GridKind, GridSpec};
pub use points::PointSet;
pub use risk::RiskReport;
pub use scalar::Scalar;
pub use smooth::{CenterOutwardFit, XiPolicy};
pub use tails::{EviEstimates, YSeries};
pub use transport::{Coupling, PairSet, Sample};
pub use volumes::VolumeCurve;

pub type Fit = CenterOutwardFit<f64>;
pub type Fit32 = CenterOutwardFit<f32>;
pub type Sample64 = Sample<f64>;
pub type Sample32 = Sample<f32>;
pub type Grid64 = Grid<f64>;
pub type Grid32 = Grid<f32>;
