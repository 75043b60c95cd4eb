use std::fmt;

use serde::Serialize;

use super::params::ModelParams;
use crate::error::{DyadicError, Result};
use crate::scalar::Real;

/// Regime tag from the ratio `r = δ1/δ2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegimeTag {
    /// `r < k_1^{-4/3}`
    ObukhovDominant,
    /// `r = k_1^{-4/3}`
    CriticalRatio,
    /// `k_1^{-4/3} < r ≤ 1`
    KPDominant,
    /// `r > 1`
    OutsideSelfSimilarBand,
    /// `δ2 = 0`
    PureKP,
    /// `δ1 = 0`
    PureObukhov,
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::ObukhovDominant => "obukhov_dominant",
            Self::CriticalRatio => "critical_ratio",
            Self::KPDominant => "kp_dominant",
            Self::OutsideSelfSimilarBand => "outside_selfsimilar_band",
            Self::PureKP => "pure_kp",
            Self::PureObukhov => "pure_obukhov",
        };
        f.write_str(s)
    }
}

/// Finer partition used for self-similar solutions, which also splits at `k_1^{-4}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SelfSimilarBand {
    /// `0 < r < k_1^{-4}`: no statement available.
    BelowBand,
    /// `k_1^{-4} ≤ r < k_1^{-4/3}`: one solution per `a_1 > 0`.
    MultiSolution,
    Critical,
    /// `k_1^{-4/3} < r ≤ 1`
    Unique,
    /// `r > 1`
    AboveBand,
    PureKP,
    PureObukhov,
}

impl fmt::Display for SelfSimilarBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::BelowBand => "below_band",
            Self::MultiSolution => "multi_solution",
            Self::Critical => "critical",
            Self::Unique => "unique",
            Self::AboveBand => "above_band",
            Self::PureKP => "pure_kp",
            Self::PureObukhov => "pure_obukhov",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeClass<T: Real> {
    pub tag: RegimeTag,
    /// `δ1/δ2`, infinite when `δ2 = 0`.
    pub ratio: T,
}

/// Threshold ratios `(k_1^{-4}, k_1^{-4/3}, 1)`.
pub fn thresholds<T: Real>(params: &ModelParams<T>) -> (T, T, T) {
    (params.k1_pow(T::lit(-4.0)), params.k1_pow(T::lit(-4.0 / 3.0)), T::one())
}

pub fn regime_classify<T: Real>(params: &ModelParams<T>) -> Result<RegimeClass<T>> {
    let (d1, d2) = (params.delta1(), params.delta2());
    if d1 == T::zero() && d2 == T::zero() {
        return Err(DyadicError::param("delta1", "delta1 and delta2 cannot both vanish"));
    }
    if d2 == T::zero() {
        return Ok(RegimeClass { tag: RegimeTag::PureKP, ratio: T::infinity() });
    }
    let ratio = d1 / d2;
    if d1 == T::zero() {
        return Ok(RegimeClass { tag: RegimeTag::PureObukhov, ratio });
    }
    let (_, crit, one) = thresholds(params);
    let tag = if ratio < crit {
        RegimeTag::ObukhovDominant
    } else if ratio == crit {
        RegimeTag::CriticalRatio
    } else if ratio <= one {
        RegimeTag::KPDominant
    } else {
        RegimeTag::OutsideSelfSimilarBand
    };
    Ok(RegimeClass { tag, ratio })
}

pub fn selfsimilar_band<T: Real>(params: &ModelParams<T>) -> Result<SelfSimilarBand> {
    let class = regime_classify(params)?;
    let (low, _, _) = thresholds(params);
    Ok(match class.tag {
        RegimeTag::PureKP => SelfSimilarBand::PureKP,
        RegimeTag::PureObukhov => SelfSimilarBand::PureObukhov,
        RegimeTag::ObukhovDominant if class.ratio < low => SelfSimilarBand::BelowBand,
        RegimeTag::ObukhovDominant => SelfSimilarBand::MultiSolution,
        RegimeTag::CriticalRatio => SelfSimilarBand::Critical,
        RegimeTag::KPDominant => SelfSimilarBand::Unique,
        RegimeTag::OutsideSelfSimilarBand => SelfSimilarBand::AboveBand,
    })
}
