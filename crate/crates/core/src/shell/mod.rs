//! Model data types, wavenumbers, right-hand side, norms and residual functionals.

mod field;
mod params;
mod regime;
mod residual;
mod sequence;

pub use field::{energy, rhs, rhs_with_tail, sobolev_norm_sq, ShellField};
pub(crate) use field::rhs_into;
pub use params::{wavenumber, ModelParams};
pub use regime::{regime_classify, selfsimilar_band, thresholds, RegimeClass, RegimeTag, SelfSimilarBand};
pub use residual::{
    selfsimilar_residual, selfsimilar_residual_relative, stationary_residual, stationary_residual_relative,
};
pub use sequence::{normalized, CoefficientSequence, Direction, RatioSequence, SequenceKind};
