//! Katz–Pavlovic self-similar recursion.

use crate::error::{DyadicError, Result};
use crate::scalar::Real;

/// `a_(n+1) = 2^{−βn} + a_(n−1)²/(2^β a_n)`.
pub fn kp_forward_step<T: Real>(a_prev: T, a_cur: T, n: usize, beta: T) -> Result<T> {
    if a_cur == T::zero() {
        return Err(DyadicError::Domain(format!(
            "a_{n} = 0; leading-zero blocks must be handled before the recursion"
        )));
    }
    if n < 1 {
        return Err(DyadicError::param("n", "shell index must be at least 1"));
    }
    Ok((-beta * T::idx(n)).exp2() + a_prev * a_prev / (beta.exp2() * a_cur))
}

/// `a_0 = 0, a_1, ..., a_depth` from the recursion.
pub fn kp_sequence<T: Real>(a1: T, beta: T, depth: usize) -> Result<Vec<T>> {
    let mut a = vec![T::zero(), a1];
    for n in 1..depth {
        let next = kp_forward_step(a[n - 1], a[n], n, beta)?;
        a.push(next);
    }
    a.truncate(depth + 1);
    Ok(a)
}
