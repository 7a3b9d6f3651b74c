//! Numerical toolkit for isotropic log-concave measures: convex bodies,
//! density families, samplers, convex calculus on grids, level sets,
//! perimeters and Brunn–Minkowski checks.

pub mod bodies;
pub mod bm_verify;
pub mod calculus;
pub mod catalog;
pub mod densities;
pub mod error;
pub mod estimate;
pub mod level_sets;
pub mod linalg;
pub mod perimeter;
pub mod quad;
pub mod region;
pub mod sampler;
pub mod scalar;
pub mod special;

pub use error::{LcError, Result};
pub use estimate::MCEstimate;
pub use scalar::Real;

pub type ConvexBody64 = bodies::ConvexBody<f64>;
pub type ConvexBody32 = bodies::ConvexBody<f32>;
pub type Polytope64 = bodies::Polytope<f64>;
pub type Density = densities::LogConcaveDensity;
