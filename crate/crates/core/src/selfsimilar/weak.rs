//! Weak/strong sequences and the truncated pull-back for `β = 1`.

use serde::Serialize;

use crate::error::{DyadicError, Result};
use crate::scalar::Real;

/// `ζ_n = 2^{−n}·2^{(n−2)/3}`.
pub fn zeta<T: Real>(n: usize) -> T {
    let n = T::idx(n);
    (-n + (n - T::two()) / T::lit(3.0)).exp2()
}

/// `M = Σ_(n≥1) ζ_n = 2^{−4/3}/(1 − 2^{−2/3})`.
pub fn zeta_sum<T: Real>() -> T {
    T::lit(-4.0 / 3.0).exp2() / (T::one() - T::lit(-2.0 / 3.0).exp2())
}

/// `ã_n = a_n 2^{n/3}`.
pub fn weak_from_strong<T: Real>(a: &[T]) -> Vec<T> {
    let third = T::one() / T::lit(3.0);
    a.iter().enumerate().map(|(n, &x)| x * (T::idx(n) * third).exp2()).collect()
}

/// `a_n = ã_n 2^{−n/3}`.
pub fn strong_from_weak<T: Real>(tilde: &[T]) -> Vec<T> {
    let third = T::one() / T::lit(3.0);
    tilde.iter().enumerate().map(|(n, &x)| x * (-T::idx(n) * third).exp2()).collect()
}

/// `max_n |ã_(n+1) − ã_(n−1)²/ã_n − ζ_n|` over interior shells with `ã_n > 0`.
pub fn weak_defect<T: Real>(tilde: &[T]) -> T {
    (1..tilde.len().saturating_sub(1))
        .filter(|&n| tilde[n] > T::zero())
        .map(|n| (tilde[n + 1] - tilde[n - 1] * tilde[n - 1] / tilde[n] - zeta::<T>(n)).abs())
        .fold(T::zero(), |m, x| m.max(x))
}

/// Result of the truncated reversed recursion `ã_(n−1)² = ã_n (ã_(n+1) − ζ_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakSequence<T: Real> {
    /// `ã_0..ã_(N+1)`; entries below a failure are left at zero.
    pub values: Vec<T>,
    /// `ζ_1..ζ_N`
    pub zeta: Vec<T>,
    pub start_l: T,
    pub well_defined: bool,
    /// Shell `n` whose step hit a negative radicand.
    pub failed_at: Option<usize>,
}

impl<T: Real> WeakSequence<T> {
    pub fn strong(&self) -> Vec<T> {
        strong_from_weak(&self.values)
    }

    pub fn truncation(&self) -> usize {
        self.values.len() - 2
    }

    /// Nondecreasing and inside `[L − M, L]`.
    pub fn is_confined(&self) -> bool {
        let m = zeta_sum::<T>();
        let lo = self.start_l - m;
        self.values.windows(2).all(|w| w[0] <= w[1])
            && self.values.iter().all(|&x| x >= lo && x <= self.start_l)
    }
}

pub fn backward_truncated<T: Real>(l: T, n_top: usize) -> Result<WeakSequence<T>> {
    if n_top <= 2 {
        return Err(DyadicError::param("N", format!("must exceed 2, got {n_top}")));
    }
    if !(l > T::zero() && l.is_finite()) {
        return Err(DyadicError::param("L", format!("must be positive, got {l}")));
    }
    let zeta: Vec<T> = (1..=n_top).map(zeta::<T>).collect();
    let mut values = vec![T::zero(); n_top + 2];
    values[n_top + 1] = l;
    values[n_top] = l;
    let mut failed_at = None;
    for n in (1..=n_top).rev() {
        let gap = values[n + 1] - zeta[n - 1];
        if gap < T::zero() {
            failed_at = Some(n);
            break;
        }
        values[n - 1] = (values[n] * gap).sqrt();
    }
    Ok(WeakSequence { values, zeta, start_l: l, well_defined: failed_at.is_none(), failed_at })
}

/// Boundary `I^(N)` between failing and well-defined starting values, bracketed to `tol`.
///
/// Returns the succeeding endpoint and its sequence.
pub fn find_l_star<T: Real>(n_top: usize, tol: T) -> Result<(T, WeakSequence<T>)> {
    if n_top < 10 {
        return Err(DyadicError::param("N", format!("must be at least 10, got {n_top}")));
    }
    if !(tol > T::zero()) {
        return Err(DyadicError::param("tol", "must be positive"));
    }
    let mut lo = T::zero();
    let mut hi = zeta_sum::<T>();
    if !backward_truncated(hi, n_top)?.well_defined {
        return Err(DyadicError::NoSolution("L = M does not give a well-defined sequence".into()));
    }
    while hi - lo >= tol {
        let mid = (lo + hi) / T::two();
        if mid <= lo || mid >= hi {
            break;
        }
        if backward_truncated(mid, n_top)?.well_defined {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, backward_truncated(hi, n_top)?))
}

/// Summary of `H^s` partial sums of a strong sequence (`β = 1`, terms `2^{2sn} a_n²`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HsProfile<T: Real> {
    pub partial_sums: Vec<T>,
    /// Geometric mean of consecutive term ratios over the window.
    pub term_ratio: T,
    /// `2^{2s − 2/3}`, the ratio of the K41 profile.
    pub k41_ratio: T,
    /// Geometric tail estimate `t_last·r/(1 − r)`, infinite for `r ≥ 1`.
    pub tail_bound: T,
}

impl<T: Real> HsProfile<T> {
    /// Decaying geometric terms with the K41 ratio.
    pub fn is_cauchy(&self, tol: T) -> bool {
        self.term_ratio < T::one() && (self.term_ratio - self.k41_ratio).abs() < tol && self.tail_bound.is_finite()
    }
}

/// `H^s` diagnostics over shells `from..=to` of a strong sequence.
pub fn hs_profile<T: Real>(strong: &[T], s: T, from: usize, to: usize) -> Result<HsProfile<T>> {
    if !(from >= 1 && from < to && to < strong.len()) {
        return Err(DyadicError::param("to", "window must satisfy 1 ≤ from < to < len"));
    }
    let terms: Vec<T> = strong
        .iter()
        .enumerate()
        .map(|(n, &a)| (T::two() * s * T::idx(n)).exp2() * a * a)
        .collect();
    let mut partial_sums = Vec::with_capacity(terms.len());
    let mut acc = T::zero();
    for &t in &terms {
        acc = acc + t;
        partial_sums.push(acc);
    }
    if !(terms[from] > T::zero()) {
        return Err(DyadicError::InvalidState(format!("term {from} is not positive")));
    }
    let term_ratio = ((terms[to] / terms[from]).ln() / T::idx(to - from)).exp();
    let k41_ratio = (T::two() * s - T::lit(2.0 / 3.0)).exp2();
    let tail_bound = if term_ratio < T::one() {
        terms[to] * term_ratio / (T::one() - term_ratio)
    } else {
        T::infinity()
    };
    Ok(HsProfile { partial_sums, term_ratio, k41_ratio, tail_bound })
}
