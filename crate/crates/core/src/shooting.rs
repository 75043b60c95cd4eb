//! Helpers shared by the shooting constructions: runaway parity, growth
//! classification, stable prefixes, logarithmic scans and bisection.

use serde::Serialize;

use crate::scalar::Real;

/// Parity class (0 = even shells, 1 = odd shells) along which the normalized
/// sequence `ã_n` runs away upward.
///
/// Looks at the last shell `m` where `ã_m/ã_(m−1)` is finite and positive:
/// if that ratio exceeds one the up-parity is `m mod 2`, otherwise `m + 1 mod 2`.
/// Returns `None` when no ratio is available.
pub fn runaway_parity<T: Real>(normalized: &[T]) -> Option<usize> {
    let mut last = None;
    for m in 1..normalized.len() {
        let (prev, cur) = (normalized[m - 1], normalized[m]);
        if !(prev > T::zero() && prev.is_finite()) {
            continue;
        }
        if !(cur > T::zero() && cur.is_finite()) {
            break;
        }
        let r = cur / prev;
        if !r.is_finite() {
            break;
        }
        last = Some((m, r));
    }
    last.map(|(m, r)| if r > T::one() { m % 2 } else { (m + 1) % 2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GrowthClass {
    Bounded,
    DivergingUp { shell: usize },
    Collapsing { shell: usize },
}

impl GrowthClass {
    pub fn is_bounded(&self) -> bool {
        matches!(self, GrowthClass::Bounded)
    }
}

/// Median rule on the normalized sequence: `ã_n > 10·median(ã_(n/2..=n))` diverges up,
/// `ã_n < 0.1·median` or a nonpositive coefficient collapses. Starts at shell 4.
pub fn classify_growth<T: Real>(normalized: &[T]) -> GrowthClass {
    let (up, down) = (T::lit(10.0), T::lit(0.1));
    let first = normalized.iter().position(|&a| a > T::zero()).unwrap_or(0);
    for n in (first + 4)..normalized.len() {
        let x = normalized[n];
        if x.is_nan() || x == T::infinity() {
            return GrowthClass::DivergingUp { shell: n };
        }
        if x <= T::zero() {
            return GrowthClass::Collapsing { shell: n };
        }
        let med = median(&normalized[(n / 2).max(first)..=n]);
        if x > up * med {
            return GrowthClass::DivergingUp { shell: n };
        }
        if x < down * med {
            return GrowthClass::Collapsing { shell: n };
        }
    }
    GrowthClass::Bounded
}

pub(crate) fn median<T: Real>(xs: &[T]) -> T {
    let mut v: Vec<T> = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / T::two()
    }
}

/// Number of leading ratios worth keeping.
///
/// Locates the closest approach of `b̃_n` to 1 and cuts at the first later entry whose
/// deviation exceeds `max(floor, 4·closest)`; non-finite entries also cut.
pub fn stable_prefix<T: Real>(ratios: &[T], floor: T) -> usize {
    let finite = ratios.iter().position(|r| !(r.is_finite() && *r > T::zero())).unwrap_or(ratios.len());
    if finite == 0 {
        return 0;
    }
    let dev = |r: T| (r - T::one()).abs();
    let (mut best_i, mut best) = (0, dev(ratios[0]));
    for (i, &r) in ratios[..finite].iter().enumerate() {
        if dev(r) < best {
            best = dev(r);
            best_i = i;
        }
    }
    let thr = floor.max(T::lit(4.0) * best);
    (best_i + 1..finite).find(|&i| dev(ratios[i]) > thr).unwrap_or(finite)
}

/// `lo·10^(i/per_decade)` up to `hi`.
pub fn log_grid<T: Real>(lo: T, hi: T, per_decade: usize) -> Vec<T> {
    let decades = (hi / lo).log10();
    let steps = (decades * T::idx(per_decade)).round().to_usize().unwrap_or(0).max(1);
    (0..=steps)
        .map(|i| lo * T::lit(10.0).powf(decades * T::idx(i) / T::idx(steps)))
        .collect()
}

/// Adjacent grid pairs where the oracle changes value.
pub fn sign_changes<T: Real, F: Fn(T) -> Option<usize>>(grid: &[T], oracle: F) -> Vec<(T, T)> {
    let labels: Vec<Option<usize>> = grid.iter().map(|&x| oracle(x)).collect();
    (0..grid.len().saturating_sub(1))
        .filter(|&i| matches!((labels[i], labels[i + 1]), (Some(a), Some(b)) if a != b))
        .map(|i| (grid[i], grid[i + 1]))
        .collect()
}

/// Bisection on a two-valued oracle. Stops when `hi − lo ≤ rel_width·mid` or the
/// midpoint no longer separates the endpoints. Returns the final `(lo, hi)`.
pub fn bisect<T: Real, F: Fn(T) -> Option<usize>>(mut lo: T, mut hi: T, rel_width: T, oracle: F) -> Option<(T, T)> {
    let f_lo = oracle(lo)?;
    let f_hi = oracle(hi)?;
    if f_lo == f_hi {
        return None;
    }
    for _ in 0..400 {
        let mid = (lo + hi) / T::two();
        if hi - lo <= rel_width * mid || mid <= lo || mid >= hi {
            break;
        }
        match oracle(mid) {
            Some(v) if v == f_lo => lo = mid,
            Some(_) => hi = mid,
            None => return None,
        }
    }
    Some((lo, hi))
}
