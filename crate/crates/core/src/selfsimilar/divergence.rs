//! Parity-resolved divergence of a sequence from a reference.

use serde::Serialize;

use crate::error::{DyadicError, Result};
use crate::scalar::Real;
use crate::shell::ModelParams;

/// Smallest parity slope, in bits per shell, counted as exponential divergence.
pub const ALPHA_MIN: f64 = 0.05;
/// Shells in the trailing fit window, at minimum.
pub const MIN_FIT_SHELLS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DivergenceProfile {
    OddUp,
    EvenUp,
    Converged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceFit<T: Real> {
    pub profile: DivergenceProfile,
    /// Least-squares slope of `log2(b_n/a_n)` over odd shells of the window.
    pub odd_slope: T,
    pub even_slope: T,
    /// `max |log2(b_n/a_n)|` over the last quarter of comparable shells.
    pub tail_deviation: T,
    /// First and last comparable shells.
    pub shells: (usize, usize),
}

/// Compares `seq` (`b_n`) against `reference` (`a_n`) shell by shell.
pub fn divergence_fit<T: Real>(seq: &[T], reference: &[T]) -> Result<DivergenceFit<T>> {
    if seq.len() != reference.len() || seq.len() < 8 {
        return Err(DyadicError::InvalidState(format!(
            "sequences must share a length of at least 8 (got {} and {})",
            seq.len(),
            reference.len()
        )));
    }
    let ok = |n: usize| {
        let (b, a) = (seq[n], reference[n]);
        b > T::zero() && a > T::zero() && b.is_finite() && a.is_finite() && (b / a).is_finite()
    };
    let first = (0..seq.len())
        .find(|&n| ok(n))
        .ok_or_else(|| DyadicError::Indeterminate("no comparable shells".into()))?;
    let end = (first..seq.len()).find(|&n| !ok(n)).unwrap_or(seq.len());
    let count = end - first;
    if count < 8 {
        return Err(DyadicError::Indeterminate(format!(
            "only {count} comparable shells before overflow; use a reference closer to the sequence"
        )));
    }
    let d: Vec<(usize, T)> = (first..end).map(|n| (n, (seq[n] / reference[n]).log2())).collect();

    let quarter = (count / 4).max(1);
    let tail_deviation = d[count - quarter..].iter().map(|&(_, x)| x.abs()).fold(T::zero(), |m, x| m.max(x));

    let window = MIN_FIT_SHELLS.max(count / 2).min(count);
    let w = &d[count - window..];
    let odd_slope = parity_slope(w, 1);
    let even_slope = parity_slope(w, 0);
    let shells = (first, end - 1);

    let alpha = T::lit(ALPHA_MIN);
    let profile = if tail_deviation < T::lit(0.01) {
        DivergenceProfile::Converged
    } else if odd_slope >= alpha && even_slope <= -alpha {
        DivergenceProfile::OddUp
    } else if even_slope >= alpha && odd_slope <= -alpha {
        DivergenceProfile::EvenUp
    } else {
        return Err(DyadicError::Indeterminate(format!(
            "odd slope {odd_slope}, even slope {even_slope} over shells {}..={}; try a deeper sequence",
            w[0].0,
            w[w.len() - 1].0
        )));
    };
    Ok(DivergenceFit { profile, odd_slope, even_slope, tail_deviation, shells })
}

pub fn divergence_classify<T: Real>(seq: &[T], reference: &[T]) -> Result<DivergenceProfile> {
    divergence_fit(seq, reference).map(|f| f.profile)
}

fn parity_slope<T: Real>(pts: &[(usize, T)], parity: usize) -> T {
    let sel: Vec<(T, T)> = pts.iter().filter(|(n, _)| n % 2 == parity).map(|&(n, y)| (T::idx(n), y)).collect();
    if sel.len() < 2 {
        return T::zero();
    }
    let k = T::idx(sel.len());
    let mx = sel.iter().fold(T::zero(), |s, p| s + p.0) / k;
    let my = sel.iter().fold(T::zero(), |s, p| s + p.1) / k;
    let (sxy, sxx) = sel
        .iter()
        .fold((T::zero(), T::zero()), |(a, b), &(x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    sxy / sxx
}

/// K41 profile `C k_n^{-1/3}` with `C` read off the last comparable shell of `seq`.
pub fn k41_reference<T: Real>(seq: &[T], params: &ModelParams<T>) -> Vec<T> {
    let third = T::one() / T::lit(3.0);
    let tilde = |n: usize| seq[n] * params.k(n).powf(third);
    let c = (0..seq.len())
        .rev()
        .map(tilde)
        .find(|x| x.is_finite() && *x > T::zero())
        .unwrap_or(T::one());
    (0..seq.len()).map(|n| c * params.k(n).powf(-third)).collect()
}
