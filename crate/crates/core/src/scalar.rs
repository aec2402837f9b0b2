//! Scalar abstraction so the model, analytics, and simulation layers can run
//! on `f32` or `f64`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};
use rand::distr::uniform::SampleUniform;

/// Floating-point scalar used for durations (minutes), data sizes (Mbit),
/// rates (Mbit/s), and probabilities. Implemented by `f32` and `f64`.
pub trait Scalar:
    Float + FromPrimitive + SampleUniform + Debug + Display + Send + Sync + 'static
{
    /// Convert an `f64` constant into this scalar type.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("constant not representable in scalar type")
    }

    /// Convert an integer count into this scalar type.
    fn from_count(n: u32) -> Self {
        Self::from_u32(n).expect("count not representable in scalar type")
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + SampleUniform + Debug + Display + Send + Sync + 'static
{
}
