//! One-step maps of the rescaled ratio `b̃_n` for constant solutions.

use crate::error::{DyadicError, Result};
use crate::scalar::{positive_root, Real};
use crate::shell::ModelParams;

/// Cached powers of `k_1` used by the ratio maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioStepParams<T: Real> {
    /// `k_1^{4/3}`
    pub k1_43: T,
    /// `k_1^{-4/3}`
    pub k1_m43: T,
    pub delta1: T,
    pub delta2: T,
}

impl<T: Real> RatioStepParams<T> {
    pub fn from_params(params: &ModelParams<T>) -> Self {
        let k1_43 = params.k1_pow(T::lit(4.0 / 3.0));
        Self { k1_43, k1_m43: T::one() / k1_43, delta1: params.delta1(), delta2: params.delta2() }
    }

    /// Derivative of the forward map at its fixed point 1.
    pub fn forward_slope_at_one(&self) -> T {
        let (d1k, d2) = (self.delta1 * self.k1_43, self.delta2);
        -(d1k + d1k + d2) / (d2 + d2 + d1k)
    }
}

/// `b̃_(n+1)` from `b̃_n`:
/// the positive root of `δ2 x² + δ1 k_1^{4/3} x = δ1 k_1^{4/3} b^{-2} + δ2 b^{-1}`.
pub fn forward_ratio_step<T: Real>(b: T, p: &RatioStepParams<T>) -> Result<T> {
    if p.delta2 == T::zero() {
        return Err(DyadicError::Branch(
            "forward ratio map needs delta2 > 0; the delta2 = 0 solution is C_F k_n^{-1/3}".into(),
        ));
    }
    check_ratio(b)?;
    Ok(forward_unchecked(b, p))
}

/// Forward map without the `δ2 > 0` guard; reduces to `b^{-2}` when `δ2 = 0`.
#[inline]
pub(crate) fn forward_unchecked<T: Real>(b: T, p: &RatioStepParams<T>) -> T {
    let inv = T::one() / b;
    let lin = p.delta1 * p.k1_43;
    positive_root(p.delta2, lin, lin * inv * inv + p.delta2 * inv)
}

/// `b̃_n` from `b̃_(n+1)` in backward variables `ã_(n−1)/ã_n`:
/// the positive root of `δ1 x² + δ2 k_1^{-4/3} x = δ2 k_1^{-4/3} b^{-2} + δ1 b^{-1}`.
pub fn backward_ratio_step<T: Real>(b_next: T, p: &RatioStepParams<T>) -> Result<T> {
    if p.delta1 == T::zero() {
        return Err(DyadicError::Branch(
            "backward ratio map needs delta1 > 0; pure Obukhov is handled by the forward map".into(),
        ));
    }
    check_ratio(b_next)?;
    Ok(backward_unchecked(b_next, p))
}

#[inline]
pub(crate) fn backward_unchecked<T: Real>(b: T, p: &RatioStepParams<T>) -> T {
    let inv = T::one() / b;
    let lin = p.delta2 * p.k1_m43;
    positive_root(p.delta1, lin, lin * inv * inv + p.delta1 * inv)
}

fn check_ratio<T: Real>(b: T) -> Result<()> {
    if b.is_finite() && b > T::zero() {
        Ok(())
    } else {
        Err(DyadicError::InvalidState(format!("ratio must be positive and finite, got {b}")))
    }
}

/// `b̃_1, b̃_2, ...` from repeated forward steps (`count` values including the seed).
pub fn forward_ratio_iterates<T: Real>(b1: T, p: &RatioStepParams<T>, count: usize) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(count);
    let mut b = b1;
    for i in 0..count {
        if i > 0 {
            b = forward_ratio_step(b, p)?;
        }
        out.push(b);
    }
    Ok(out)
}

/// Backward iterates from a seed at shell `n_top` down to shell 1; entry `i` is shell `i + 1`.
pub fn backward_ratio_iterates<T: Real>(seed: T, p: &RatioStepParams<T>, n_top: usize) -> Result<Vec<T>> {
    let mut out = vec![T::zero(); n_top];
    let mut b = seed;
    out[n_top - 1] = b;
    for n in (1..n_top).rev() {
        b = backward_ratio_step(b, p)?;
        out[n - 1] = b;
    }
    Ok(out)
}
