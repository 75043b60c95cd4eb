use serde::Serialize;

use super::params::ModelParams;
use super::regime::RegimeClass;
use crate::error::{DyadicError, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SequenceKind {
    Constant,
    SelfSimilar,
}

/// Coefficients `a_0..a_N` of a constant (`Y_n = a_n`) or self-similar
/// (`Y_n = a_n/(t − t_0)`) solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSequence<T: Real> {
    values: Vec<T>,
    kind: SequenceKind,
    regime: RegimeClass<T>,
    k41_constant: Option<T>,
    t_origin: Option<T>,
}

impl<T: Real> CoefficientSequence<T> {
    pub fn new(
        values: Vec<T>,
        kind: SequenceKind,
        regime: RegimeClass<T>,
        k41_constant: Option<T>,
        t_origin: Option<T>,
    ) -> Result<Self> {
        if let Some(n) = values.iter().position(|v| !(v.is_finite() && *v >= T::zero())) {
            return Err(DyadicError::InvalidState(format!(
                "coefficient a_{n} = {} is not finite and nonnegative",
                values[n]
            )));
        }
        if kind == SequenceKind::SelfSimilar {
            if values.first().is_some_and(|&a0| a0 != T::zero()) {
                return Err(DyadicError::InvalidState("self-similar sequence needs a_0 = 0".into()));
            }
            match t_origin {
                Some(t0) if t0 < T::zero() => {}
                _ => {
                    return Err(DyadicError::InvalidState(
                        "self-similar sequence needs a negative time origin".into(),
                    ))
                }
            }
        }
        if let Some(c) = k41_constant {
            if !(c > T::zero()) {
                return Err(DyadicError::InvalidState(format!("K41 constant must be positive, got {c}")));
            }
        }
        Ok(Self { values, kind, regime, k41_constant, t_origin })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
    pub fn kind(&self) -> SequenceKind {
        self.kind
    }
    pub fn regime(&self) -> RegimeClass<T> {
        self.regime
    }
    pub fn k41_constant(&self) -> Option<T> {
        self.k41_constant
    }
    pub fn t_origin(&self) -> Option<T> {
        self.t_origin
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Replaces the time origin of a self-similar sequence.
    pub fn with_t_origin(mut self, t0: T) -> Result<Self> {
        if self.kind != SequenceKind::SelfSimilar || !(t0 < T::zero()) {
            return Err(DyadicError::InvalidState("time origin must be negative on a self-similar sequence".into()));
        }
        self.t_origin = Some(t0);
        Ok(self)
    }

    /// `ã_n = a_n·k_n^{1/3}`.
    pub fn normalized(&self, params: &ModelParams<T>) -> Vec<T> {
        normalized(&self.values, params)
    }
}

/// `ã_n = a_n·k_n^{1/3}` for a raw slice.
pub fn normalized<T: Real>(values: &[T], params: &ModelParams<T>) -> Vec<T> {
    let third = T::one() / T::lit(3.0);
    values
        .iter()
        .enumerate()
        .map(|(n, &a)| a * (params.beta() * T::idx(n) * third).exp2())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `b̃_n = ã_n/ã_(n−1)`
    Forward,
    /// `b̃_n = ã_(n−1)/ã_n`
    Backward,
}

/// Rescaled ratios `b̃_n`, indexed from `first_shell`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSequence<T: Real> {
    pub first_shell: usize,
    pub values: Vec<T>,
    pub direction: Direction,
}

impl<T: Real> RatioSequence<T> {
    pub fn new(first_shell: usize, values: Vec<T>, direction: Direction) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > T::zero())) {
            return Err(DyadicError::InvalidState(format!(
                "ratio at shell {} is {}",
                first_shell + i,
                values[i]
            )));
        }
        Ok(Self { first_shell, values, direction })
    }

    /// Ratios of a coefficient slice, starting at the first shell whose predecessor is positive.
    pub fn from_coefficients(values: &[T], params: &ModelParams<T>, direction: Direction) -> Result<Self> {
        let first = values
            .iter()
            .position(|&a| a > T::zero())
            .map(|i| i + 1)
            .ok_or_else(|| DyadicError::InvalidState("sequence has no positive entry".into()))?;
        let t = params.k1_pow(T::one() / T::lit(3.0));
        let ratios = (first..values.len())
            .map(|n| {
                let fwd = values[n] / values[n - 1] * t;
                match direction {
                    Direction::Forward => fwd,
                    Direction::Backward => T::one() / fwd,
                }
            })
            .collect();
        Self::new(first, ratios, direction)
    }

    /// `b̃_n` for shell `n`, if stored.
    pub fn get(&self, n: usize) -> Option<T> {
        n.checked_sub(self.first_shell).and_then(|i| self.values.get(i).copied())
    }

    pub fn last_shell(&self) -> usize {
        self.first_shell + self.values.len() - 1
    }
}
