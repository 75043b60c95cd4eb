//! Constant solutions of the forced model: forward construction, shooting, K41 constant.

mod constant;
mod ratio;

pub use constant::{
    a1_from_forcing, build_constant_solution, constant_forward, find_unique_constant, k41_constant, k41_profile,
    max_relative_residual, K41Estimate, UniqueConstant, MAX_SHOOT_DEPTH,
};
pub use ratio::{
    backward_ratio_iterates, backward_ratio_step, forward_ratio_iterates, forward_ratio_step, RatioStepParams,
};
