//! Self-similar sequences of the mixed model.

use serde::Serialize;

use super::divergence::{divergence_fit, k41_reference, DivergenceProfile};
use super::kp::kp_forward_step;
use crate::error::{DyadicError, Result};
use crate::scalar::{positive_root, Real};
use crate::shell::{
    normalized, regime_classify, selfsimilar_band, CoefficientSequence, ModelParams, RegimeTag, SelfSimilarBand,
    SequenceKind,
};
use crate::shooting::{bisect, log_grid, runaway_parity, sign_changes, stable_prefix};
use crate::stationary::{k41_constant, K41Estimate};

/// Largest oracle depth for shooting on `a_1`.
pub const MAX_SHOOT_DEPTH: usize = 60;
/// Time origin attached to generated sequences.
pub const DEFAULT_T_ORIGIN: f64 = -1.0;

/// Positive root `a_(n+1)` of
/// `δ2 x² + δ1 k_1 a_n x = δ1 a_(n−1)² + δ2 k_1^{-1} a_n a_(n−1) + a_n/k_n`.
pub fn mixed_forward_step<T: Real>(a_prev: T, a_cur: T, n: usize, params: &ModelParams<T>) -> Result<T> {
    if !(a_cur > T::zero()) {
        return Err(DyadicError::Domain(format!("a_{n} = {a_cur} must be positive")));
    }
    let (d1, d2, k1) = (params.delta1(), params.delta2(), params.k1());
    if d2 == T::zero() {
        // δ2 = 0 is the KP recursion after scaling by s = δ1 k_1
        let s = d1 * k1;
        return Ok(kp_forward_step(s * a_prev, s * a_cur, n, params.beta())? / s);
    }
    let c = d1 * a_prev * a_prev + d2 * a_cur * a_prev / k1 + a_cur / params.k(n);
    Ok(positive_root(d2, d1 * k1 * a_cur, c))
}

/// `a_0..a_depth` with `a_0 = ... = a_(n0) = 0`, `a_(n0+1) = seed` and forward steps after.
///
/// Generation stops after the first non-finite or vanishing term.
pub fn selfsimilar_forward<T: Real>(seed: T, params: &ModelParams<T>, depth: usize, leading_zeros: usize) -> Result<Vec<T>> {
    if !(seed > T::zero() && seed.is_finite()) {
        return Err(DyadicError::param("a1", format!("seed must be positive, got {seed}")));
    }
    if depth <= leading_zeros + 1 {
        return Err(DyadicError::param("depth", "must exceed the leading-zero block"));
    }
    let mut a = vec![T::zero(); leading_zeros + 1];
    a.push(seed);
    for n in leading_zeros + 1..depth {
        let next = mixed_forward_step(a[n - 1], a[n], n, params)?;
        a.push(next);
        if !(next.is_finite() && next > T::zero()) {
            break;
        }
    }
    Ok(a)
}

fn check_depth<T: Real>(params: &ModelParams<T>, depth: usize) -> Result<()> {
    if params.beta() * T::idx(depth) > T::lit(900.0) {
        return Err(DyadicError::param("depth", format!("β·depth must stay below 900, got depth {depth}")));
    }
    Ok(())
}

/// One sequence per `a_1 > 0` in the band `k_1^{-4} ≤ δ1/δ2 < k_1^{-4/3}`.
pub fn build_selfsimilar<T: Real>(a1: T, params: &ModelParams<T>, depth: usize) -> Result<CoefficientSequence<T>> {
    let band = selfsimilar_band(params)?;
    if band != SelfSimilarBand::MultiSolution {
        return Err(DyadicError::RegimeMismatch {
            regime: band.to_string(),
            hint: "forward generation needs k1^(-4) <= delta1/delta2 < k1^(-4/3); use shoot_selfsimilar above it".into(),
        });
    }
    check_depth(params, depth)?;
    let a = selfsimilar_forward(a1, params, depth, 0)?;
    if a.len() != depth + 1 || !a[1..].iter().all(|x| x.is_finite() && *x > T::zero()) {
        return Err(DyadicError::NoSolution(format!("recursion left the positive reals before shell {depth}")));
    }
    let c = k41_constant(&a, params)?.constant;
    CoefficientSequence::new(a, SequenceKind::SelfSimilar, regime_classify(params)?, Some(c), Some(T::lit(DEFAULT_T_ORIGIN)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootRoot<T: Real> {
    pub root: T,
    pub bracket_width: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootResult<T: Real> {
    /// Selected `a_1`: the largest root, which continues the `δ2 = 0` branch.
    pub root: T,
    pub bracket_width: T,
    /// Forward sequence from `root`, cut where roundoff growth becomes visible.
    pub sequence: CoefficientSequence<T>,
    pub divergence_profile: DivergenceProfile,
    /// Every parity change found in the scan, refined, in increasing order.
    pub roots: Vec<ShootRoot<T>>,
    pub k41: K41Estimate<T>,
    pub tail_check: TailCheck<T>,
}

/// Parity of the runaway of the forward sequence from `a1`.
pub fn selfsimilar_parity<T: Real>(a1: T, params: &ModelParams<T>, depth: usize) -> Option<usize> {
    selfsimilar_forward(a1, params, depth, 0).ok().and_then(|a| runaway_parity(&normalized(&a, params)))
}

/// Bisection on `a_1` for `δ1/δ2 > k_1^{-4/3}` (including `δ2 = 0`).
///
/// Scans `a_1 ∈ [1e-6, 1e6]` at eight points per decade, refines every parity change and
/// keeps the largest root.
pub fn shoot_selfsimilar<T: Real>(params: &ModelParams<T>, depth: usize) -> Result<ShootResult<T>> {
    let regime = regime_classify(params)?;
    match regime.tag {
        RegimeTag::KPDominant | RegimeTag::OutsideSelfSimilarBand | RegimeTag::PureKP => {}
        tag => {
            return Err(DyadicError::RegimeMismatch {
                regime: tag.to_string(),
                hint: "shooting needs delta1/delta2 above k1^(-4/3); use build_selfsimilar in the band below".into(),
            })
        }
    }
    if !(8..=MAX_SHOOT_DEPTH).contains(&depth) {
        return Err(DyadicError::param("depth", format!("must lie in 8..={MAX_SHOOT_DEPTH}, got {depth}")));
    }
    let oracle = |a1: T| selfsimilar_parity(a1, params, depth);
    let grid = log_grid(T::lit(1e-6), T::lit(1e6), 8);
    let changes = sign_changes(&grid, oracle);
    if changes.is_empty() {
        return Err(DyadicError::Bracketing("no parity change for a1 in [1e-6, 1e6]".into()));
    }
    let mut roots = Vec::with_capacity(changes.len());
    for (lo, hi) in changes {
        let (lo, hi) = bisect(lo, hi, T::lit(1e-14), oracle)
            .ok_or_else(|| DyadicError::Bracketing(format!("bracket [{lo}, {hi}] lost its parity change")))?;
        roots.push(ShootRoot { root: (lo + hi) / T::two(), bracket_width: hi - lo });
    }
    let best = roots[roots.len() - 1];

    let full = selfsimilar_forward(best.root, params, depth, 0)?;
    let tilde = normalized(&full, params);
    let ratios: Vec<T> = (2..tilde.len()).map(|n| tilde[n] / tilde[n - 1]).collect();
    let keep = stable_prefix(&ratios, T::lit(1e-6));
    let values: Vec<T> = full[..keep + 2].to_vec();
    let k41 = k41_constant(&values, params)?;
    let fit = divergence_fit(&values, &k41_reference(&values, params))?;
    let tail_check = backward_tail_check(&values, params)?;
    let sequence = CoefficientSequence::new(
        values,
        SequenceKind::SelfSimilar,
        regime,
        Some(k41.constant),
        Some(T::lit(DEFAULT_T_ORIGIN)),
    )?;
    Ok(ShootResult {
        root: best.root,
        bracket_width: best.bracket_width,
        sequence,
        divergence_profile: fit.profile,
        roots,
        k41,
        tail_check,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthCheck<T: Real> {
    /// `c_(n+1) > c_(n−1)` at every shell with `c_(n−1) > 0`, where `c_n = a_n k_n`.
    pub monotone: bool,
    /// `min c_(n+1)/c_(n−1)`.
    pub m_fit: T,
}

pub fn c_growth_check<T: Real>(values: &[T], params: &ModelParams<T>) -> GrowthCheck<T> {
    let c: Vec<T> = values.iter().enumerate().map(|(n, &a)| a * params.k(n)).collect();
    let mut m_fit = T::infinity();
    let mut monotone = true;
    for n in 1..c.len().saturating_sub(1) {
        if c[n - 1] > T::zero() {
            let r = c[n + 1] / c[n - 1];
            monotone &= r > T::one();
            m_fit = m_fit.min(r);
        }
    }
    GrowthCheck { monotone, m_fit }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeCheck<T: Real> {
    /// `b̃_1 ≥ b̃_3`, selecting the even-parity bound.
    pub first_ge_third: bool,
    pub bound: T,
    /// Largest ratio on the bounded parity.
    pub max_ratio: T,
}

impl<T: Real> EnvelopeCheck<T> {
    pub fn holds(&self) -> bool {
        self.max_ratio <= self.bound
    }
}

/// Envelope bound on the ratios `b̃_j = ã_(j+1)/ã_j` (`j ≥ 1`) of a self-similar sequence:
/// even `j` below `1 + sqrt(ε_1 k_1^{2/3}/δ2)` when `b̃_1 ≥ b̃_3`, otherwise odd `j`
/// below `1 + sqrt(ε_2 k_1^{2/3}/δ2)`, with `ε_n = 1/(a_n k_n)`.
pub fn envelope_check<T: Real>(values: &[T], params: &ModelParams<T>) -> Result<EnvelopeCheck<T>> {
    if values.len() < 5 || !(values[1] > T::zero() && values[2] > T::zero()) {
        return Err(DyadicError::InvalidState("need a_1, a_2 > 0 and at least five coefficients".into()));
    }
    if !(params.delta2() > T::zero()) {
        return Err(DyadicError::param("delta2", "the envelope bound needs delta2 > 0"));
    }
    let tilde = normalized(values, params);
    let ratio = |j: usize| tilde[j + 1] / tilde[j];
    let first_ge_third = ratio(1) >= ratio(3);
    let (parity, eps) = if first_ge_third {
        (0, T::one() / (values[1] * params.k(1)))
    } else {
        (1, T::one() / (values[2] * params.k(2)))
    };
    let bound = T::one() + (eps * params.k1_pow(T::lit(2.0 / 3.0)) / params.delta2()).sqrt();
    let max_ratio = (1..tilde.len() - 1)
        .filter(|j| j % 2 == parity)
        .map(ratio)
        .fold(T::zero(), |m, x| m.max(x));
    Ok(EnvelopeCheck { first_ge_third, bound, max_ratio })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailCheck<T: Real> {
    /// Backward ratios `ã_(n−1)/ã_n`, recomputed from the top shell down to shell 2.
    pub recomputed: Vec<T>,
    pub well_defined: bool,
    /// Smallest `M*` with every recomputed ratio in `[1/M*, M*]`.
    pub m_star: T,
    /// Largest relative gap between recomputed and original ratios.
    pub max_deviation: T,
}

/// Recomputes the backward ratios of a self-similar sequence from its top ratio,
/// with `ε*_n = 1/(a_n k_n)` taken from the sequence itself.
pub fn backward_tail_check<T: Real>(values: &[T], params: &ModelParams<T>) -> Result<TailCheck<T>> {
    let top = values.len() - 1;
    if top < 3 || !values[1..].iter().all(|x| *x > T::zero() && x.is_finite()) {
        return Err(DyadicError::InvalidState("tail check needs a_1..a_N positive with N ≥ 3".into()));
    }
    if !(params.delta1() > T::zero()) {
        return Err(DyadicError::param("delta1", "the backward recursion needs delta1 > 0"));
    }
    let tilde = normalized(values, params);
    let own = |n: usize| tilde[n - 1] / tilde[n];
    let (d1, d2) = (params.delta1(), params.delta2());
    let lin = d2 * params.k1_pow(T::lit(-4.0 / 3.0));
    let km23 = params.k1_pow(T::lit(-2.0 / 3.0));
    let mut recomputed = vec![own(top)];
    let mut well_defined = true;
    let mut b = own(top);
    for n in (2..top).rev() {
        let eps = T::one() / (values[n] * params.k(n));
        let c = d1 / b + lin / (b * b) - eps * km23;
        if !(c > T::zero()) {
            well_defined = false;
            break;
        }
        b = positive_root(d1, lin, c);
        recomputed.push(b);
    }
    recomputed.reverse();
    let first = top + 1 - recomputed.len();
    let m_star = recomputed.iter().fold(T::one(), |m, &x| m.max(x).max(T::one() / x));
    let max_deviation = recomputed
        .iter()
        .enumerate()
        .map(|(i, &x)| ((x - own(first + i)) / own(first + i)).abs())
        .fold(T::zero(), |m, x| m.max(x));
    Ok(TailCheck { recomputed, well_defined, m_star, max_deviation })
}
