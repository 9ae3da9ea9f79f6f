//! Generative model core for active-inference control.
//!
//! Beliefs live in generalised coordinates (value, velocity, acceleration),
//! observations carry position and velocity, and a diagonal temporal scale β
//! couples the dynamics prior to a target. One scalar free energy ties the
//! pieces together; everything downstream (state estimation, torque control,
//! hyperparameter learning) is gradient descent on it, using the analytic
//! gradients exported here.

pub mod energy;
pub mod error;
pub mod fd;
pub mod gradcheck;
pub mod matrix;
pub mod types;

pub use energy::{compute_errors, free_energy, grad_belief, grad_beta, grad_precision};
pub use error::GmError;
pub use fd::{fd_oracle, DEFAULT_FD_STEP};
pub use matrix::{PrecisionMatrix, PrecisionSet, TemporalScale, DEFAULT_BETA_FLOOR};
pub use types::{
    BeliefGradient, ErrorSet, GeneralizedBelief, GeneralizedObservation, PrecisionGradient, Target,
};
