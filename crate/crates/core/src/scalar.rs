//! Scalar abstraction for the quadrature and linear-algebra primitives.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type the numerical primitives are generic over: `f32` or `f64`.
///
/// The solver layer works in `f64`; the Jacobi, interpolation and dense
/// linear-algebra code accepts either.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` constant into `Self`.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable")
    }

    /// Converts a count or index into `Self`.
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Newton stopping tolerance on a node: `1e-15` or a few ulps, whichever is larger.
    fn node_tolerance() -> Self {
        Self::lit(1e-15).max(Self::epsilon() * Self::lit(4.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}
