//! Mixed dyadic shell model
//!
//! `dY_n/dt = δ1[k_n Y_(n−1)² − k_(n+1) Y_n Y_(n+1)] − δ2[k_n Y_(n+1)² − k_(n−1) Y_n Y_(n−1)]`
//! with `k_n = 2^(βn)` and a constant force `F` on shell 0.
//!
//! * [`shell`]: parameters, fields, right-hand side, norms, regimes, residuals.
//! * [`ode`]: adaptive time integration and trajectory diagnostics.
//! * [`stationary`]: constant solutions of the forced model.
//! * [`selfsimilar`]: self-similar solutions `Y_n = a_n/(t − t_0)`.
//!
//! Every routine is generic over [`Real`]; the aliases below fix the scalar to `f64`.

pub mod error;
pub mod ode;
pub mod scalar;
pub mod selfsimilar;
pub mod shell;
pub mod shooting;
pub mod stationary;

pub use error::{DyadicError, Result};
pub use scalar::Real;

pub type Params = shell::ModelParams<f64>;
pub type Field = shell::ShellField<f64>;
pub type Sequence = shell::CoefficientSequence<f64>;
pub type Ratios = shell::RatioSequence<f64>;
pub type Regime = shell::RegimeClass<f64>;
pub type Traj = ode::Trajectory<f64>;
pub type Shoot = selfsimilar::ShootResult<f64>;
pub type Weak = selfsimilar::WeakSequence<f64>;
