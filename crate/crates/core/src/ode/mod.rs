//! Time integration of the truncated system and trajectory diagnostics.

mod diagnostics;
mod export;
mod integrator;

pub use diagnostics::{
    detect_blowup, positivity_probe, variation_check, BlowupReport, BlowupTrigger, MIN_WINDOW_SAMPLES,
};
pub use export::format_sig17;
pub use integrator::{
    integrate, integrate_with, Boundary, HaltReason, IntegrateOptions, IntegratorStats, Trajectory,
};
