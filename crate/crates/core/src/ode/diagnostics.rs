//! Post-processing checks on sampled trajectories.

use serde::Serialize;

use super::integrator::{HaltReason, Trajectory};
use crate::error::{DyadicError, Result};
use crate::scalar::Real;
use crate::shell::sobolev_norm_sq;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlowupTrigger {
    NormThreshold,
    StepCollapse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupReport<T: Real> {
    pub detected: bool,
    /// First sample past the threshold, or the halt time after a step collapse.
    pub t_estimate: Option<T>,
    pub trigger: Option<BlowupTrigger>,
    pub s_norm_used: T,
    /// Largest `H^s` norm squared over the samples.
    pub peak_norm: T,
}

pub fn detect_blowup<T: Real>(trajectory: &Trajectory<T>, s: T, threshold: T) -> BlowupReport<T> {
    let mut peak = T::zero();
    for sample in &trajectory.samples {
        let norm = sobolev_norm_sq(sample, s);
        if norm > peak {
            peak = norm;
        }
        if norm > threshold {
            return BlowupReport {
                detected: true,
                t_estimate: Some(sample.time),
                trigger: Some(BlowupTrigger::NormThreshold),
                s_norm_used: s,
                peak_norm: peak,
            };
        }
    }
    let stats = &trajectory.integrator_stats;
    if matches!(stats.halt, HaltReason::StepCollapse | HaltReason::NonFiniteState) {
        return BlowupReport {
            detected: true,
            t_estimate: Some(trajectory.end()),
            trigger: Some(BlowupTrigger::StepCollapse),
            s_norm_used: s,
            peak_norm: peak,
        };
    }
    BlowupReport { detected: false, t_estimate: None, trigger: None, s_norm_used: s, peak_norm: peak }
}

/// Minimum number of samples inside the window for [`variation_check`].
pub const MIN_WINDOW_SAMPLES: usize = 8;

/// Mismatch between `Y_n(t1)` and the variation-of-constants representation
/// built from the samples on `[t0, t1]`.
///
/// The window is snapped inward to the sample grid. The rate integral is a
/// composite trapezoid; the source term is linearly interpolated and integrated
/// exactly against the exponential kernel on each sample interval, which keeps
/// the rule exact for constant paths.
pub fn variation_check<T: Real>(trajectory: &Trajectory<T>, n: usize, t0: T, t1: T) -> Result<T> {
    let params = &trajectory.params;
    let big_n = params.n_shells();
    if n < 1 || n + 1 > big_n {
        return Err(DyadicError::param("n", format!("shell must lie in 1..={}, got {n}", big_n - 1)));
    }
    if !(t0 < t1) || t0 < trajectory.start() || t1 > trajectory.end() {
        return Err(DyadicError::param("t0", "window must satisfy start ≤ t0 < t1 ≤ end"));
    }
    let window: Vec<_> = trajectory.samples.iter().filter(|s| s.time >= t0 && s.time <= t1).collect();
    if window.len() < MIN_WINDOW_SAMPLES {
        return Err(DyadicError::InsufficientSamples { found: window.len(), required: MIN_WINDOW_SAMPLES });
    }
    let (d1, d2) = (params.delta1(), params.delta2());
    let (kn, kn1, km1) = (params.k(n), params.k(n + 1), params.k(n - 1));
    let rate = |y: &[T]| d1 * kn1 * y[n + 1] - d2 * km1 * y[n - 1];
    let source = |y: &[T]| kn * (d1 * y[n - 1] * y[n - 1] - d2 * y[n + 1] * y[n + 1]);

    // cumulative G(s) = ∫_{t0}^{s} rate
    let half = T::lit(0.5);
    let mut g_cum = Vec::with_capacity(window.len());
    g_cum.push(T::zero());
    for w in window.windows(2) {
        let dt = w[1].time - w[0].time;
        let prev = g_cum[g_cum.len() - 1];
        g_cum.push(prev + half * dt * (rate(&w[0].values) + rate(&w[1].values)));
    }
    let g_total = g_cum[g_cum.len() - 1];

    let mut integral = T::zero();
    for j in 0..window.len() - 1 {
        let dt = window[j + 1].time - window[j].time;
        let x = g_cum[j + 1] - g_cum[j];
        let (phi1, chi) = kernel_weights(x);
        let (h0, h1) = (source(&window[j].values), source(&window[j + 1].values));
        let decay = (-(g_total - g_cum[j + 1])).exp();
        integral = integral + decay * dt * (h0 * chi + h1 * (phi1 - chi));
    }
    let first = window[0].values[n];
    let last = window[window.len() - 1].values[n];
    let predicted = first * (-g_total).exp() + integral;
    Ok((last - predicted).abs())
}

/// `φ1(x) = (1 − e^{−x})/x` and `χ(x) = ∫_0^1 w e^{−xw} dw`.
fn kernel_weights<T: Real>(x: T) -> (T, T) {
    if x.abs() < T::lit(1e-3) {
        let x2 = x * x;
        let x3 = x2 * x;
        let phi1 = T::one() - x / T::lit(2.0) + x2 / T::lit(6.0) - x3 / T::lit(24.0);
        let chi = T::lit(0.5) - x / T::lit(3.0) + x2 / T::lit(8.0) - x3 / T::lit(30.0);
        (phi1, chi)
    } else {
        let em = (-x).exp();
        let phi1 = (T::one() - em) / x;
        let chi = (T::one() - em * (T::one() + x)) / (x * x);
        (phi1, chi)
    }
}

/// Samples and shells `n ∈ 1..=N` where `δ1 Y_(n−1)² − δ2 Y_(n+1)² < 0`.
pub fn positivity_probe<T: Real>(trajectory: &Trajectory<T>) -> Vec<(T, usize)> {
    let params = &trajectory.params;
    let (d1, d2) = (params.delta1(), params.delta2());
    let mut out = Vec::new();
    for sample in &trajectory.samples {
        let y = &sample.values;
        let last = y.len() - 1;
        for n in 1..=last {
            let next = if n == last { trajectory.boundary.value(sample.time) } else { y[n + 1] };
            if d1 * y[n - 1] * y[n - 1] - d2 * next * next < T::zero() {
                out.push((sample.time, n));
            }
        }
    }
    out
}
