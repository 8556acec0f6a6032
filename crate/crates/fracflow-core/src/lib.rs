//! Nonlocal curvature and fractional mean curvature flow at desk scale.
//!
//! The crate evolves discretized sets and graphs under the flow driven by the
//! s-fractional mean curvature, computes nonlocal perimeters, and numerically
//! certifies the decay inequalities of an explicit time-dependent modulus of
//! continuity together with its finite regularization time.
//!
//! Everything is plain `f64` on 2d lattices (periodic in `x`, truncated in
//! `x_d`). Kernel sums are O(N^2) by design; the weight tables and antipodal
//! pairing keep the constants small enough for grids up to 256^2.

pub mod boundary;
pub mod curvature;
pub mod error;
pub mod experiment;
pub mod graph_flow;
pub mod grid;
pub mod kernel;
pub mod level_set;
pub mod modulus_family;
pub mod monitor;
pub mod params;
pub mod quad;
pub mod rng;

pub use boundary::{BoundaryPair, Modulus, Seam};
pub use error::FracflowError;
pub use grid::{IndicatorGrid, Tail};
pub use params::{FlowParams, QuadratureConfig};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, FracflowError>;
