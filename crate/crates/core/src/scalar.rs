//! Scalar abstraction shared by every numerical routine.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Real floating-point scalar the model is generic over.
pub trait Real: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal, panicking only for values the type cannot hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal out of range for scalar type")
    }

    /// Converts an index into the scalar type.
    #[inline]
    fn idx(n: usize) -> Self {
        Self::from_usize(n).expect("index out of range for scalar type")
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Positive root of `a·x² + b·x − c = 0` for `a, b, c ≥ 0`, in the conjugate form
/// `2c / (b + sqrt(b² + 4ac))` that never subtracts nearly equal quantities.
///
/// Returns zero when `c = 0`, and `NaN` when `a = b = 0` (no finite root).
#[inline]
pub fn positive_root<T: Real>(a: T, b: T, c: T) -> T {
    if c == T::zero() {
        return T::zero();
    }
    let four = T::lit(4.0);
    let disc = (b * b + four * a * c).sqrt();
    (c + c) / (b + disc)
}
