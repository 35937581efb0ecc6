//! Scalar abstraction for the probability-domain math.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar used throughout the soft-decision chain.
///
/// Implemented for `f32` and `f64`; everything downstream of the channel
/// (beliefs, decoder metrics, rate estimates) is generic over it.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant, panicking only on genuinely
    /// unrepresentable inputs (never for finite values).
    fn rc(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant")
    }

    /// Smallest log-probability kept finite: `ln(min_positive)`.
    ///
    /// Probabilities at or below `min_positive` underflow to zero anyway, so
    /// clamping log-domain values here loses nothing while keeping arithmetic
    /// (`0 * log_floor`, subtraction chains) free of NaNs.
    fn log_floor() -> Self {
        Self::min_positive_value().ln()
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_conversion_roundtrips() {
        assert_eq!(<f64 as Real>::rc(0.25), 0.25);
        assert_eq!(<f32 as Real>::rc(0.25), 0.25f32);
    }

    #[test]
    fn log_floor_is_finite_and_its_exp_is_negligible() {
        let f64_floor = <f64 as Real>::log_floor();
        assert!(f64_floor.is_finite());
        let p = f64_floor.exp();
        assert!(p > 0.0 && p < 1e-300);
        // Doubling the floor underflows to an exact zero.
        assert_eq!((2.0 * f64_floor).exp(), 0.0);
        let f32_floor = <f32 as Real>::log_floor();
        assert!(f32_floor.is_finite());
        assert_eq!((2.0f32 * f32_floor).exp(), 0.0);
    }
}
