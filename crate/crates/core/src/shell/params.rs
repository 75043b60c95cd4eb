use serde::Serialize;

use crate::error::{DyadicError, Result};
use crate::scalar::Real;

/// Full parameterization of the truncated model.
///
/// Wavenumbers `k_n = 2^(βn)` for `0 ≤ n ≤ N+1` are computed once at construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams<T: Real> {
    beta: T,
    delta1: T,
    delta2: T,
    forcing: T,
    n_shells: usize,
    #[serde(skip)]
    wavenumbers: Vec<T>,
}

impl<T: Real> ModelParams<T> {
    pub fn new(beta: T, delta1: T, delta2: T, forcing: T, n_shells: usize) -> Result<Self> {
        if !(beta.is_finite() && beta > T::zero()) {
            return Err(DyadicError::param("beta", format!("must be positive and finite, got {beta}")));
        }
        if !(delta1.is_finite() && delta1 >= T::zero()) {
            return Err(DyadicError::param("delta1", format!("must be nonnegative, got {delta1}")));
        }
        if !(delta2.is_finite() && delta2 >= T::zero()) {
            return Err(DyadicError::param("delta2", format!("must be nonnegative, got {delta2}")));
        }
        if delta1 == T::zero() && delta2 == T::zero() {
            return Err(DyadicError::param("delta1", "delta1 and delta2 cannot both vanish"));
        }
        if !(forcing.is_finite() && forcing >= T::zero()) {
            return Err(DyadicError::param("forcing", format!("must be nonnegative, got {forcing}")));
        }
        if n_shells < 2 {
            return Err(DyadicError::param("n_shells", format!("must be at least 2, got {n_shells}")));
        }
        let wavenumbers: Vec<T> = (0..=n_shells + 1).map(|n| k_raw(beta, n)).collect();
        if !wavenumbers.iter().all(|k| k.is_finite()) {
            return Err(DyadicError::param("n_shells", "wavenumber k_(N+1) overflows"));
        }
        Ok(Self { beta, delta1, delta2, forcing, n_shells, wavenumbers })
    }

    /// Same model with another forcing.
    pub fn with_forcing(&self, forcing: T) -> Result<Self> {
        Self::new(self.beta, self.delta1, self.delta2, forcing, self.n_shells)
    }

    /// Same model with another truncation.
    pub fn with_shells(&self, n_shells: usize) -> Result<Self> {
        Self::new(self.beta, self.delta1, self.delta2, self.forcing, n_shells)
    }

    /// Same model with other coupling coefficients.
    pub fn with_deltas(&self, delta1: T, delta2: T) -> Result<Self> {
        Self::new(self.beta, delta1, delta2, self.forcing, self.n_shells)
    }

    pub fn beta(&self) -> T {
        self.beta
    }
    pub fn delta1(&self) -> T {
        self.delta1
    }
    pub fn delta2(&self) -> T {
        self.delta2
    }
    pub fn forcing(&self) -> T {
        self.forcing
    }
    pub fn n_shells(&self) -> usize {
        self.n_shells
    }

    /// `k_n`, from the cache when `n ≤ N+1`.
    #[inline]
    pub fn k(&self, n: usize) -> T {
        match self.wavenumbers.get(n) {
            Some(&k) => k,
            None => k_raw(self.beta, n),
        }
    }

    /// `k_1 = 2^β`.
    #[inline]
    pub fn k1(&self) -> T {
        self.wavenumbers[1]
    }

    /// `k_1^p`.
    pub fn k1_pow(&self, p: T) -> T {
        (self.beta * p).exp2()
    }

    /// Cached `k_0..k_(N+1)`.
    pub fn wavenumbers(&self) -> &[T] {
        &self.wavenumbers
    }
}

#[inline]
fn k_raw<T: Real>(beta: T, n: usize) -> T {
    (beta * T::idx(n)).exp2()
}

/// `k_n = 2^(βn)`.
pub fn wavenumber<T: Real>(n: usize, params: &ModelParams<T>) -> T {
    params.k(n)
}
