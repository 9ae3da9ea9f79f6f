//! Simulated plants and sensing.
//!
//! All plants integrate with the same explicit Euler scheme the controller
//! uses: both components of the state advance from pre-step values. Step
//! functions are pure; the caller owns the state.

pub mod arm;
pub mod msd;
pub mod sense;
pub mod two_link;

use nalgebra::DVector;
use thiserror::Error;

pub use arm::{surrogate_arm_step, SurrogateArmParams, ARM_JOINTS};
pub use msd::{msd_step, MsdParams};
pub use sense::{observe, NoiseSpec, Sensor};
pub use two_link::{two_link_energy, two_link_step, TwoLinkParams};

#[derive(Debug, Clone, Error)]
pub enum PlantError {
    #[error("mass matrix is numerically singular (det = {det:e})")]
    SingularMassMatrix { det: f64 },
}

/// Positions and velocities of a plant, plus simulated time.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantState {
    pub q: DVector<f64>,
    pub q_dot: DVector<f64>,
    pub t: f64,
}

impl PlantState {
    pub fn new(q: DVector<f64>, q_dot: DVector<f64>) -> Self {
        assert_eq!(q.len(), q_dot.len(), "position/velocity dimension mismatch");
        PlantState { q, q_dot, t: 0.0 }
    }

    pub fn dof(&self) -> usize {
        self.q.len()
    }

    /// Explicit Euler: q += dt q̇, q̇ += dt q̈, both from pre-step values.
    pub(crate) fn euler(&self, q_ddot: &DVector<f64>, dt: f64) -> PlantState {
        PlantState {
            q: &self.q + &self.q_dot * dt,
            q_dot: &self.q_dot + q_ddot * dt,
            t: self.t + dt,
        }
    }
}
