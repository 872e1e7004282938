//! Scalar abstraction for the statistics kernels.
//!
//! The real-valued math in this crate (log-likelihood, log-ratio, Pearson)
//! is generic over the floating scalar so it can run at `f32` or `f64`.
//! Everything downstream uses the crate-level [`crate::Score`] alias.

use num_traits::{Float, FromPrimitive};

/// Floating scalar usable by the statistics kernels.
pub trait Real: Float + FromPrimitive + std::iter::Sum + std::fmt::Debug {
    /// Lossless for counts below the mantissa width, which covers any
    /// corpus this crate can hold in memory.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable as scalar")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + std::iter::Sum + std::fmt::Debug {}
