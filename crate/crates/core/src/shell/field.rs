use serde::Serialize;

use super::params::ModelParams;
use crate::error::{DyadicError, Result};
use crate::scalar::Real;

/// Time-stamped truncated velocity vector `Y_0..Y_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellField<T: Real> {
    pub time: T,
    pub values: Vec<T>,
}

impl<T: Real> ShellField<T> {
    pub fn new(time: T, values: Vec<T>) -> Result<Self> {
        let field = Self { time, values };
        field.check_finite()?;
        Ok(field)
    }

    pub fn zeros(time: T, n_shells: usize) -> Self {
        Self { time, values: vec![T::zero(); n_shells + 1] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if !self.time.is_finite() {
            return Err(DyadicError::InvalidState(format!("non-finite time {}", self.time)));
        }
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(n) => Err(DyadicError::InvalidState(format!(
                "non-finite value {} at shell {n}",
                self.values[n]
            ))),
            None => Ok(()),
        }
    }

    pub(crate) fn check_len(&self, params: &ModelParams<T>) -> Result<()> {
        if self.values.len() != params.n_shells() + 1 {
            return Err(DyadicError::InvalidState(format!(
                "field has {} entries, model expects {}",
                self.values.len(),
                params.n_shells() + 1
            )));
        }
        Ok(())
    }
}

/// `Σ Y_n²`.
pub fn energy<T: Real>(field: &ShellField<T>) -> T {
    field.values.iter().fold(T::zero(), |acc, &y| acc + y * y)
}

/// `Σ 2^(2sn) Y_n²`; overflow saturates at `+∞`.
pub fn sobolev_norm_sq<T: Real>(field: &ShellField<T>, s: T) -> T {
    let two_s = s + s;
    field
        .values
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (n, &y)| {
            if y == T::zero() {
                acc
            } else {
                acc + (two_s * T::idx(n)).exp2() * y * y
            }
        })
}

/// Time derivative of the truncated model with `Y_(N+1) = 0`.
pub fn rhs<T: Real>(field: &ShellField<T>, params: &ModelParams<T>) -> Result<Vec<T>> {
    rhs_with_tail(field, params, T::zero())
}

/// Time derivative with a prescribed value for the ghost shell `Y_(N+1)`.
pub fn rhs_with_tail<T: Real>(field: &ShellField<T>, params: &ModelParams<T>, tail: T) -> Result<Vec<T>> {
    field.check_len(params)?;
    field.check_finite()?;
    if !tail.is_finite() {
        return Err(DyadicError::InvalidState(format!("non-finite ghost value {tail}")));
    }
    let mut out = vec![T::zero(); field.values.len()];
    rhs_into(&field.values, params, tail, &mut out);
    Ok(out)
}

/// Unchecked kernel shared with the integrator. `y.len() == out.len() == N+1`.
pub(crate) fn rhs_into<T: Real>(y: &[T], params: &ModelParams<T>, tail: T, out: &mut [T]) {
    let d1 = params.delta1();
    let d2 = params.delta2();
    let last = y.len() - 1;
    for n in 0..=last {
        let prev = if n == 0 { T::zero() } else { y[n - 1] };
        let next = if n == last { tail } else { y[n + 1] };
        let kn = params.k(n);
        let kn1 = params.k(n + 1);
        let km1 = if n == 0 { T::zero() } else { params.k(n - 1) };
        let kp = kn * prev * prev - kn1 * y[n] * next;
        let ob = kn * next * next - km1 * y[n] * prev;
        out[n] = d1 * kp - d2 * ob;
    }
    out[0] = out[0] + params.forcing();
}
