//! Constant solutions of the forced model.

use serde::Serialize;

use super::ratio::{backward_unchecked, forward_unchecked, RatioStepParams};
use crate::error::{DyadicError, Result};
use crate::scalar::{positive_root, Real};
use crate::shell::{
    normalized, regime_classify, stationary_residual_relative, CoefficientSequence, ModelParams, RegimeTag,
    SequenceKind,
};
use crate::shooting::{bisect, classify_growth, log_grid, runaway_parity, sign_changes, stable_prefix, GrowthClass};

/// Largest oracle depth for shooting on `a_0`.
pub const MAX_SHOOT_DEPTH: usize = 60;

/// `a_1` from `δ1 k_1 a_0 a_1 + δ2 a_1² = F`.
pub fn a1_from_forcing<T: Real>(a0: T, params: &ModelParams<T>) -> Result<T> {
    let f = params.forcing();
    if !(f > T::zero()) {
        return Err(DyadicError::param("forcing", "constant solutions need F > 0"));
    }
    if !(a0.is_finite() && a0 >= T::zero()) {
        return Err(DyadicError::param("a0", format!("must be finite and nonnegative, got {a0}")));
    }
    let lin = params.delta1() * params.k1() * a0;
    if params.delta2() == T::zero() && lin == T::zero() {
        return Err(DyadicError::NoSolution("delta2 = 0 and delta1·a0 = 0 leave F unbalanced".into()));
    }
    Ok(positive_root(params.delta2(), lin, f))
}

/// Forward ratio recursion from `a_0`, returning `a_0..a_depth`.
///
/// Stops early after the first coefficient that is zero or non-finite.
pub fn constant_forward<T: Real>(a0: T, params: &ModelParams<T>, depth: usize) -> Result<Vec<T>> {
    let p = RatioStepParams::from_params(params);
    let a1 = a1_from_forcing(a0, params)?;
    let k13 = params.k1_pow(T::one() / T::lit(3.0));
    let mut a = Vec::with_capacity(depth + 1);
    a.push(a0);
    a.push(a1);
    let mut b = a1 / a0 * k13;
    for _ in 2..=depth {
        let last = a[a.len() - 1];
        if !(last.is_finite() && last > T::zero() && b.is_finite() && b > T::zero()) {
            break;
        }
        b = forward_unchecked(b, &p);
        a.push(last * b / k13);
    }
    Ok(a)
}

/// Obukhov-dominant construction: one solution for every `a_0 > 0`.
pub fn build_constant_solution<T: Real>(a0: T, params: &ModelParams<T>) -> Result<CoefficientSequence<T>> {
    let regime = regime_classify(params)?;
    match regime.tag {
        RegimeTag::ObukhovDominant | RegimeTag::PureObukhov | RegimeTag::CriticalRatio => {}
        tag => {
            return Err(DyadicError::RegimeMismatch {
                regime: tag.to_string(),
                hint: "the forward construction needs delta1/delta2 below k1^(-4/3); use find_unique_constant".into(),
            })
        }
    }
    if !(a0 > T::zero() && a0.is_finite()) {
        return Err(DyadicError::param("a0", format!("must be positive, got {a0}")));
    }
    let depth = params.n_shells();
    let a = constant_forward(a0, params, depth)?;
    if a.len() != depth + 1 || !a.iter().all(|x| x.is_finite() && *x > T::zero()) {
        return Err(DyadicError::NoSolution(format!("forward recursion left the positive reals before shell {depth}")));
    }
    let c = a[depth] * params.k(depth).powf(T::one() / T::lit(3.0));
    CoefficientSequence::new(a, SequenceKind::Constant, regime, Some(c), None)
}

/// Shooting outcome for the unique constant solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniqueConstant<T: Real> {
    /// Pull-back reconstruction over `a_0..a_N`.
    pub sequence: CoefficientSequence<T>,
    /// Midpoint of the final bisection bracket on `a_0`.
    pub root: T,
    pub bracket_width: T,
    /// `a_0` implied by the pull-back ratios and the forcing relation.
    pub pullback_a0: T,
    /// Shells over which the forward sequence from `root` was still reliable.
    pub forward_shells: usize,
    /// Largest `|b̃_n(forward) − b̃_n(pull-back)|` over those shells.
    pub tail_agreement: T,
    /// Median-rule classification of the forward sequence from `root`.
    pub forward_growth: GrowthClass,
}

/// Unique constant solution for `δ1/δ2 ≥ k_1^{-4/3}` (including `δ2 = 0`).
///
/// Bisects on `a_0` with the runaway parity of the forward sequence (`depth ≤ 60` shells)
/// as the sign oracle. The returned sequence is rebuilt from the stable backward ratio
/// recursion, pulled down from shell `N + 200`, with `a_0` fixed by the forcing relation;
/// it must agree with the shooting root.
pub fn find_unique_constant<T: Real>(
    params: &ModelParams<T>,
    depth: usize,
    bracket: Option<(T, T)>,
) -> Result<UniqueConstant<T>> {
    let regime = regime_classify(params)?;
    match regime.tag {
        RegimeTag::KPDominant | RegimeTag::OutsideSelfSimilarBand | RegimeTag::PureKP | RegimeTag::CriticalRatio => {}
        tag => {
            return Err(DyadicError::RegimeMismatch {
                regime: tag.to_string(),
                hint: "every a0 > 0 gives a solution here; use build_constant_solution".into(),
            })
        }
    }
    if !(params.forcing() > T::zero()) {
        return Err(DyadicError::param("forcing", "constant solutions need F > 0"));
    }
    if !(4..=MAX_SHOOT_DEPTH).contains(&depth) {
        return Err(DyadicError::param("depth", format!("must lie in 4..={MAX_SHOOT_DEPTH}, got {depth}")));
    }
    let oracle = |a0: T| {
        constant_forward(a0, params, depth)
            .ok()
            .and_then(|a| runaway_parity(&normalized(&a, params)))
    };
    let (lo, hi) = match bracket {
        Some(b) => b,
        None => {
            let scale = (params.forcing() / (params.delta1() + params.delta2())).sqrt();
            let grid = log_grid(T::lit(1e-6) * scale, T::lit(1e6) * scale, 4);
            let changes = sign_changes(&grid, oracle);
            *changes.first().ok_or_else(|| {
                DyadicError::Bracketing(format!(
                    "no parity change of the forward sequence for a0 in [{}, {}]",
                    grid[0],
                    grid[grid.len() - 1]
                ))
            })?
        }
    };
    let (lo, hi) = bisect(lo, hi, T::lit(1e-14), oracle).ok_or_else(|| {
        DyadicError::Bracketing(format!(
            "endpoints a0 = {lo} and a0 = {hi} run away along the same parity ({:?}, {:?})",
            oracle(lo),
            oracle(hi)
        ))
    })?;
    let root = (lo + hi) / T::two();

    // pull-back in backward variables ã_(n−1)/ã_n
    let n = params.n_shells();
    let p = RatioStepParams::from_params(params);
    let forward = constant_forward(root, params, depth)?;
    let forward_tilde = normalized(&forward, params);
    let fwd_ratios: Vec<T> = forward_tilde.windows(2).map(|w| w[1] / w[0]).collect();
    let keep = stable_prefix(&fwd_ratios, T::lit(1e-6));
    let seed = if keep > 0 { T::one() / fwd_ratios[keep - 1] } else { T::two() };
    let top = n.max(depth) + 200;
    let mut back = vec![T::zero(); top + 1];
    back[top] = seed;
    for m in (1..top).rev() {
        back[m] = if p.delta1 > T::zero() {
            backward_unchecked(back[m + 1], &p)
        } else {
            T::one() / forward_unchecked(T::one() / back[m + 1], &p)
        };
    }
    let k13 = params.k1_pow(T::one() / T::lit(3.0));
    let rho = T::one() / (back[1] * k13);
    let pullback_a0 = (params.forcing() / (params.delta1() * params.k1() * rho + params.delta2() * rho * rho)).sqrt();
    let mut a = Vec::with_capacity(n + 1);
    a.push(pullback_a0);
    for m in 1..=n {
        let prev = a[m - 1];
        a.push(prev / (back[m] * k13));
    }

    let mismatch = (pullback_a0 - root).abs() / root;
    if mismatch > T::lit(1e-9) {
        return Err(DyadicError::NoSolution(format!(
            "shooting root {root} and pull-back a0 {pullback_a0} disagree (relative {mismatch})"
        )));
    }
    let tail_agreement = (0..keep)
        .map(|i| (fwd_ratios[i] - T::one() / back[i + 1]).abs())
        .fold(T::zero(), |m, x| m.max(x));

    let c = a[n] * params.k(n).powf(T::one() / T::lit(3.0));
    let sequence = CoefficientSequence::new(a, SequenceKind::Constant, regime, Some(c), None)?;
    Ok(UniqueConstant {
        sequence,
        root,
        bracket_width: hi - lo,
        pullback_a0,
        forward_shells: keep,
        tail_agreement,
        forward_growth: classify_growth(&forward_tilde),
    })
}

/// Closed-form K41 profile `a_n = C k_n^{-1/3}` with `C² = F/(δ1 k_1^{2/3} + δ2 k_1^{-2/3})`;
/// it solves every stationary relation for `n ≥ 1` and the forcing relation.
pub fn k41_profile<T: Real>(params: &ModelParams<T>) -> Result<(T, Vec<T>)> {
    let f = params.forcing();
    if !(f > T::zero()) {
        return Err(DyadicError::param("forcing", "constant solutions need F > 0"));
    }
    let c = (f
        / (params.delta1() * params.k1_pow(T::lit(2.0 / 3.0)) + params.delta2() * params.k1_pow(T::lit(-2.0 / 3.0))))
    .sqrt();
    let third = T::one() / T::lit(3.0);
    let a = (0..=params.n_shells()).map(|n| c * params.k(n).powf(-third)).collect();
    Ok((c, a))
}

/// Plateau estimate of `C = lim a_n k_n^{1/3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct K41Estimate<T: Real> {
    /// `a_N k_N^{1/3}`
    pub constant: T,
    /// Largest relative departure from `constant` over the last quarter of shells.
    pub drift: T,
}

impl<T: Real> K41Estimate<T> {
    pub fn is_plateau(&self, tol: T) -> bool {
        self.drift < tol
    }
}

pub fn k41_constant<T: Real>(values: &[T], params: &ModelParams<T>) -> Result<K41Estimate<T>> {
    if values.len() < 10 {
        return Err(DyadicError::InvalidState(format!("need at least 10 coefficients, got {}", values.len())));
    }
    let tilde = normalized(values, params);
    let last = tilde.len() - 1;
    let constant = tilde[last];
    if !(constant > T::zero() && constant.is_finite()) {
        return Err(DyadicError::InvalidState(format!("tail value {constant} is not positive and finite")));
    }
    let start = tilde.len() - tilde.len() / 4;
    let drift = tilde[start..]
        .iter()
        .map(|&x| ((x - constant) / constant).abs())
        .fold(T::zero(), |m, x| m.max(x));
    Ok(K41Estimate { constant, drift })
}

/// Largest relative stationary residual of a constant sequence.
pub fn max_relative_residual<T: Real>(values: &[T], params: &ModelParams<T>) -> T {
    stationary_residual_relative(values, params).into_iter().fold(T::zero(), |m, x| m.max(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d1: f64, d2: f64, f: f64, n: usize) -> ModelParams<f64> {
        ModelParams::new(1.0, d1, d2, f, n).unwrap()
    }

    #[test]
    fn a1_examples() {
        assert_eq!(a1_from_forcing(1.0, &params(1.0, 0.0, 2.0, 4)).unwrap(), 1.0);
        assert_eq!(a1_from_forcing(3.7, &params(0.0, 1.0, 4.0, 4)).unwrap(), 2.0);
        assert!((a1_from_forcing(1.0, &params(1.0, 1.0, 3.0, 4)).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(a1_from_forcing(0.0, &params(1.0, 0.0, 1.0, 4)), Err(DyadicError::NoSolution(_))));
        assert!(a1_from_forcing(1.0, &params(1.0, 1.0, 0.0, 4)).is_err());
    }

    #[test]
    fn closed_form_constant() {
        let (c, a) = k41_profile(&params(1.0, 1.0, 1.0, 30)).unwrap();
        assert!((c - 0.671_555_238_458_9).abs() < 1e-12);
        assert!(max_relative_residual(&a, &params(1.0, 1.0, 1.0, 30)) < 1e-14);
        let (c0, _) = k41_profile(&params(1.0, 0.0, 1.0, 30)).unwrap();
        assert!((c0 - 2f64.powf(-1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn obukhov_build_residual_and_plateau() {
        let p = params(0.1, 1.0, 1.0, 60);
        let s = build_constant_solution(1.0, &p).unwrap();
        assert_eq!(s.len(), 61);
        assert!(max_relative_residual(s.values(), &p) < 1e-12);
        let est = k41_constant(s.values(), &p).unwrap();
        assert!(est.drift < 1e-6);
        assert!((est.constant - s.k41_constant().unwrap()).abs() < 1e-14);
    }

    #[test]
    fn pure_obukhov_decouples_a1() {
        let p = params(0.0, 1.0, 1.0, 30);
        let s = build_constant_solution(7.0, &p).unwrap();
        assert!((s.values()[1] - 1.0).abs() < 1e-15);
        assert!(max_relative_residual(s.values(), &p) < 1e-10);
    }

    #[test]
    fn regime_guards() {
        let kp = params(1.0, 1.0, 1.0, 20);
        assert!(matches!(build_constant_solution(1.0, &kp), Err(DyadicError::RegimeMismatch { .. })));
        let ob = params(0.1, 1.0, 1.0, 20);
        assert!(matches!(find_unique_constant(&ob, 40, None), Err(DyadicError::RegimeMismatch { .. })));
        assert!(find_unique_constant(&kp, 80, None).is_err());
    }

    #[test]
    fn unique_constant_matches_closed_form() {
        let p = params(1.0, 1.0, 1.0, 40);
        let u = find_unique_constant(&p, 60, None).unwrap();
        let (c, exact) = k41_profile(&p).unwrap();
        assert!(u.bracket_width < 1e-12 * u.root);
        assert!((u.root - c).abs() / c < 1e-12);
        for (x, y) in u.sequence.values().iter().zip(&exact) {
            assert!((x - y).abs() / y < 1e-12);
        }
        assert!(u.tail_agreement < 1e-5);
    }

    #[test]
    fn bad_bracket_is_reported() {
        let p = params(1.0, 1.0, 1.0, 20);
        let e = find_unique_constant(&p, 60, Some((1.0, 2.0))).unwrap_err();
        assert!(matches!(e, DyadicError::Bracketing(_)));
    }

    #[test]
    fn k41_examples() {
        let p = params(1.0, 0.0, 1.0, 30);
        let (c, a) = k41_profile(&p).unwrap();
        let e = k41_constant(&a, &p).unwrap();
        assert!((e.constant - c).abs() < 1e-14 && e.drift < 1e-14);
        let wrong: Vec<f64> = (0..31).map(|n| 0.9f64.powi(n)).collect();
        let e = k41_constant(&wrong, &p).unwrap();
        assert!(e.drift > 0.1 && !e.is_plateau(1e-4));
        assert!(k41_constant(&[1.0; 9], &p).is_err());
    }
}
