//! Self-similar coefficient sequences: the Katz–Pavlovic pull-back and the
//! mixed-model forward generation and shooting.

mod divergence;
mod kp;
mod mixed;
mod weak;

pub use divergence::{
    divergence_classify, divergence_fit, k41_reference, DivergenceFit, DivergenceProfile, ALPHA_MIN, MIN_FIT_SHELLS,
};
pub use kp::{kp_forward_step, kp_sequence};
pub use mixed::{
    backward_tail_check, build_selfsimilar, c_growth_check, envelope_check, mixed_forward_step, selfsimilar_forward,
    selfsimilar_parity, shoot_selfsimilar, EnvelopeCheck, GrowthCheck, ShootResult, ShootRoot, TailCheck,
    DEFAULT_T_ORIGIN, MAX_SHOOT_DEPTH,
};
pub use weak::{
    backward_truncated, find_l_star, hs_profile, strong_from_weak, weak_defect, weak_from_strong, zeta, zeta_sum,
    HsProfile, WeakSequence,
};
