use super::params::ModelParams;
use super::sequence::{CoefficientSequence, SequenceKind};
use crate::error::{DyadicError, Result};
use crate::scalar::Real;

/// Stationary relations for a constant solution `a_0..a_N`.
///
/// Entry 0 is `δ1 k_1 a_0 a_1 + δ2 a_1² − F`; entry `n` for `1 ≤ n ≤ N−1` is the shell-`n` balance.
pub fn stationary_residual<T: Real>(values: &[T], params: &ModelParams<T>) -> Vec<T> {
    stationary_terms(values, params).into_iter().map(|(r, _)| r).collect()
}

/// Residual divided by the sum of absolute term magnitudes (zero where all terms vanish).
pub fn stationary_residual_relative<T: Real>(values: &[T], params: &ModelParams<T>) -> Vec<T> {
    stationary_terms(values, params).into_iter().map(|(r, s)| relative(r, s)).collect()
}

fn stationary_terms<T: Real>(a: &[T], params: &ModelParams<T>) -> Vec<(T, T)> {
    if a.len() < 2 {
        return Vec::new();
    }
    let (d1, d2) = (params.delta1(), params.delta2());
    let mut out = Vec::with_capacity(a.len() - 1);
    let t = [d1 * params.k1() * a[0] * a[1], d2 * a[1] * a[1], params.forcing()];
    out.push((t[0] + t[1] - t[2], t.iter().map(|x| x.abs()).fold(T::zero(), |s, x| s + x)));
    for n in 1..a.len() - 1 {
        let (kn, kn1, km1) = (params.k(n), params.k(n + 1), params.k(n - 1));
        let t = [
            d1 * kn * a[n - 1] * a[n - 1],
            -d1 * kn1 * a[n] * a[n + 1],
            -d2 * kn * a[n + 1] * a[n + 1],
            d2 * km1 * a[n] * a[n - 1],
        ];
        out.push(sum_terms(&t));
    }
    out
}

/// Self-similar relations for `a_0..a_N`: entry `n` for `1 ≤ n ≤ N−1` is
/// `a_n/k_n + δ1(a_(n−1)² − k_1 a_n a_(n+1)) − δ2(a_(n+1)² − k_1^{-1} a_n a_(n−1))`.
/// Entry 0 carries no relation and is always zero.
pub fn selfsimilar_residual<T: Real>(values: &[T], params: &ModelParams<T>) -> Vec<T> {
    selfsimilar_terms(values, params).into_iter().map(|(r, _)| r).collect()
}

pub fn selfsimilar_residual_relative<T: Real>(values: &[T], params: &ModelParams<T>) -> Vec<T> {
    selfsimilar_terms(values, params).into_iter().map(|(r, s)| relative(r, s)).collect()
}

fn selfsimilar_terms<T: Real>(a: &[T], params: &ModelParams<T>) -> Vec<(T, T)> {
    if a.len() < 2 {
        return Vec::new();
    }
    let (d1, d2, k1) = (params.delta1(), params.delta2(), params.k1());
    let mut out = Vec::with_capacity(a.len() - 1);
    out.push((T::zero(), T::zero()));
    for n in 1..a.len() - 1 {
        let t = [
            a[n] / params.k(n),
            d1 * a[n - 1] * a[n - 1],
            -d1 * k1 * a[n] * a[n + 1],
            -d2 * a[n + 1] * a[n + 1],
            d2 * a[n] * a[n - 1] / k1,
        ];
        out.push(sum_terms(&t));
    }
    out
}

fn sum_terms<T: Real>(t: &[T]) -> (T, T) {
    t.iter().fold((T::zero(), T::zero()), |(s, m), &x| (s + x, m + x.abs()))
}

fn relative<T: Real>(r: T, scale: T) -> T {
    if scale == T::zero() {
        r.abs()
    } else {
        r.abs() / scale
    }
}

impl<T: Real> CoefficientSequence<T> {
    /// Residual of the relation matching the sequence kind.
    pub fn residual(&self, params: &ModelParams<T>) -> Vec<T> {
        match self.kind() {
            SequenceKind::Constant => stationary_residual(self.values(), params),
            SequenceKind::SelfSimilar => selfsimilar_residual(self.values(), params),
        }
    }

    /// Relative residual of the relation matching the sequence kind.
    pub fn relative_residual(&self, params: &ModelParams<T>) -> Vec<T> {
        match self.kind() {
            SequenceKind::Constant => stationary_residual_relative(self.values(), params),
            SequenceKind::SelfSimilar => selfsimilar_residual_relative(self.values(), params),
        }
    }

    /// Largest relative residual, or an error if it exceeds `tol`.
    pub fn check_residual(&self, params: &ModelParams<T>, tol: T) -> Result<T> {
        let worst = self
            .relative_residual(params)
            .into_iter()
            .fold(T::zero(), |m, r| if r > m { r } else { m });
        if worst > tol {
            return Err(DyadicError::InvalidState(format!("residual {worst} exceeds {tol}")));
        }
        Ok(worst)
    }
}
