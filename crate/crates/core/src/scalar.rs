//! Scalar abstraction shared by the geometric and grid-calculus layers.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar usable by the generic geometry: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal or computed constant.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative tolerance suitable for geometric predicates at this precision.
    fn geom_eps() -> Self;
}

impl Real for f32 {
    fn geom_eps() -> Self {
        1e-5
    }
}

impl Real for f64 {
    fn geom_eps() -> Self {
        1e-10
    }
}
