//! Dormand–Prince 5(4) integrator with step-size control and sampled output.

use serde::Serialize;

use crate::error::{DyadicError, Result};
use crate::scalar::Real;
use crate::shell::{rhs_into, sobolev_norm_sq, ModelParams, ShellField};

/// Value used for the ghost shell `Y_(N+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Boundary<T: Real> {
    /// `Y_(N+1) = 0`; the Galerkin truncation, energy conserving when unforced.
    Truncated,
    /// `Y_(N+1) = a`, the next coefficient of a constant solution.
    Constant(T),
    /// `Y_(N+1) = a/(t − t0)`, the next coefficient of a self-similar solution.
    SelfSimilar { a: T, t0: T },
}

impl<T: Real> Boundary<T> {
    #[inline]
    pub fn value(&self, t: T) -> T {
        match *self {
            Boundary::Truncated => T::zero(),
            Boundary::Constant(a) => a,
            Boundary::SelfSimilar { a, t0 } => a / (t - t0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HaltReason {
    Completed,
    StepCollapse,
    NonFiniteState,
    NormThreshold,
    MaxSteps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorStats<T: Real> {
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    /// Smallest step chosen by the controller (steps shortened to hit a sample time excluded).
    pub min_step: T,
    pub halt: HaltReason,
}

impl<T: Real> IntegratorStats<T> {
    pub fn truncated(&self) -> bool {
        self.halt != HaltReason::Completed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions<T: Real> {
    pub t_end: T,
    pub rel_tol: T,
    pub abs_tol: T,
    /// Output spacing; defaults to a hundredth of the span.
    pub sample_interval: Option<T>,
    pub boundary: Boundary<T>,
    /// Stop once `sobolev_norm_sq(Y, s)` exceeds the threshold: `(s, threshold)`.
    pub stop_norm: Option<(T, T)>,
    pub max_steps: usize,
}

impl<T: Real> IntegrateOptions<T> {
    pub fn new(t_end: T, rel_tol: T, abs_tol: T) -> Self {
        Self {
            t_end,
            rel_tol,
            abs_tol,
            sample_interval: None,
            boundary: Boundary::Truncated,
            stop_norm: None,
            max_steps: 20_000_000,
        }
    }

    pub fn samples_every(mut self, dt: T) -> Self {
        self.sample_interval = Some(dt);
        self
    }

    pub fn boundary(mut self, boundary: Boundary<T>) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn stop_when_norm_exceeds(mut self, s: T, threshold: T) -> Self {
        self.stop_norm = Some((s, threshold));
        self
    }

    pub fn max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }
}

/// Sampled solution path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<T: Real> {
    pub params: ModelParams<T>,
    pub boundary: Boundary<T>,
    pub samples: Vec<ShellField<T>>,
    pub integrator_stats: IntegratorStats<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.time).collect()
    }

    pub fn start(&self) -> T {
        self.samples[0].time
    }

    pub fn end(&self) -> T {
        self.samples[self.samples.len() - 1].time
    }

    pub fn last(&self) -> &ShellField<T> {
        &self.samples[self.samples.len() - 1]
    }
}

/// Integrates with a hundred evenly spaced samples and the truncated boundary.
pub fn integrate<T: Real>(
    initial: &ShellField<T>,
    params: &ModelParams<T>,
    t_end: T,
    rel_tol: T,
    abs_tol: T,
) -> Result<Trajectory<T>> {
    integrate_with(initial, params, &IntegrateOptions::new(t_end, rel_tol, abs_tol))
}

// Dormand–Prince tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Tableau<T> {
    c: [T; 7],
    a: [[T; 6]; 7],
    e: [T; 7],
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        Self {
            c: C.map(T::lit),
            a: A.map(|row| row.map(T::lit)),
            e: E.map(T::lit),
        }
    }
}

pub fn integrate_with<T: Real>(
    initial: &ShellField<T>,
    params: &ModelParams<T>,
    opts: &IntegrateOptions<T>,
) -> Result<Trajectory<T>> {
    initial.check_len(params)?;
    initial.check_finite()?;
    let t0 = initial.time;
    let span = opts.t_end - t0;
    if !(span > T::zero()) {
        return Err(DyadicError::param("t_end", format!("must exceed start time {t0}")));
    }
    for (name, tol) in [("rel_tol", opts.rel_tol), ("abs_tol", opts.abs_tol)] {
        if !(tol > T::zero() && tol < T::one()) {
            return Err(DyadicError::param(name, format!("must lie in (0, 1), got {tol}")));
        }
    }
    let dt = opts.sample_interval.unwrap_or(span / T::lit(100.0));
    if !(dt > T::zero()) {
        return Err(DyadicError::param("sample_interval", "must be positive"));
    }
    let n_samples = (span / dt).ceil().to_usize().unwrap_or(usize::MAX).max(1);
    let sample_time = |j: usize| if j >= n_samples { opts.t_end } else { t0 + dt * T::idx(j) };

    let tab = Tableau::<T>::new();
    let dim = initial.values.len();
    let eval = |t: T, y: &[T], out: &mut [T]| rhs_into(y, params, opts.boundary.value(t), out);

    let mut y = initial.values.clone();
    let mut t = t0;
    let mut k: Vec<Vec<T>> = vec![vec![T::zero(); dim]; 7];
    let mut stage = vec![T::zero(); dim];
    let mut y_new = vec![T::zero(); dim];
    eval(t, &y, &mut k[0]);

    let mut samples = vec![initial.clone()];
    let mut stats = IntegratorStats {
        steps_accepted: 0,
        steps_rejected: 0,
        min_step: T::infinity(),
        halt: HaltReason::Completed,
    };
    if let Some(bad) = k[0].iter().position(|v| !v.is_finite()) {
        return Err(DyadicError::InvalidState(format!("non-finite derivative at shell {bad}")));
    }

    let mut h = initial_step(&y, &k[0], opts).min(dt);
    let collapse = T::lit(1e-14) * span;
    let safety = T::lit(0.9);
    let (fac_min, fac_max) = (T::lit(0.2), T::lit(5.0));
    let fifth = T::lit(0.2);
    let mut next_sample = 1usize;
    let mut last_err_finite = true;

    while next_sample <= n_samples {
        if stats.steps_accepted + stats.steps_rejected >= opts.max_steps {
            stats.halt = HaltReason::MaxSteps;
            break;
        }
        if h < collapse {
            stats.halt = if last_err_finite { HaltReason::StepCollapse } else { HaltReason::NonFiniteState };
            break;
        }
        let target = sample_time(next_sample);
        let clamped = t + h >= target;
        let step = if clamped { target - t } else { h };

        for s in 1..7 {
            for i in 0..dim {
                let mut acc = T::zero();
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc = acc + tab.a[s][j] * kj[i];
                }
                stage[i] = y[i] + step * acc;
            }
            eval(t + tab.c[s] * step, &stage, &mut k[s]);
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
        }

        let mut err = T::zero();
        for i in 0..dim {
            let mut e = T::zero();
            for (j, kj) in k.iter().enumerate() {
                e = e + tab.e[j] * kj[i];
            }
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            let r = (step * e).abs() / scale;
            if !(r <= err) {
                err = r;
            }
        }
        last_err_finite = err.is_finite();

        let factor = if !err.is_finite() {
            fac_min
        } else if err == T::zero() {
            fac_max
        } else {
            (safety * err.powf(-fifth)).max(fac_min).min(fac_max)
        };

        if err.is_finite() && err <= T::one() {
            stats.steps_accepted += 1;
            if !clamped && step < stats.min_step {
                stats.min_step = step;
            }
            t = if clamped { target } else { t + step };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            if !clamped {
                h = step * factor;
            } else {
                h = h.max(step * factor);
            }
            if clamped {
                samples.push(ShellField { time: t, values: y.clone() });
                next_sample += 1;
            }
            if let Some((s, threshold)) = opts.stop_norm {
                let current = ShellField { time: t, values: y.clone() };
                if sobolev_norm_sq(&current, s) > threshold {
                    if !clamped {
                        samples.push(current);
                    }
                    stats.halt = HaltReason::NormThreshold;
                    break;
                }
            }
        } else {
            stats.steps_rejected += 1;
            h = step * factor.min(T::one());
        }
    }

    if stats.min_step == T::infinity() {
        stats.min_step = T::zero();
    }
    Ok(Trajectory { params: params.clone(), boundary: opts.boundary, samples, integrator_stats: stats })
}

/// Starting step from the scaled sizes of the state and its derivative.
fn initial_step<T: Real>(y: &[T], f: &[T], opts: &IntegrateOptions<T>) -> T {
    let (mut d0, mut d1) = (T::zero(), T::zero());
    for (&yi, &fi) in y.iter().zip(f) {
        let sc = opts.abs_tol + opts.rel_tol * yi.abs();
        d0 = d0.max((yi / sc).abs());
        d1 = d1.max((fi / sc).abs());
    }
    let tiny = T::lit(1e-5);
    if d0 < tiny || d1 < tiny {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    }
}
