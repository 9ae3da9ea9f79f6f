//! Seven-joint surrogate manipulator.
//!
//! Each joint is an independent second-order system with viscous damping, a
//! gravity torque proportional to sin(q), and a payload torque through the
//! same nonlinearity:
//!
//!   q̈_j = (a_j - damping_j q̇_j - gravity_j sin q_j - coupling_j m_payload sin q_j) / inertia_j
//!
//! Joint coupling through a full mass matrix is deliberately absent; the
//! point of this plant is cheap joint-wise nonlinearity that the controller's
//! generative model does not describe, so hyperparameter adaptation has
//! something real to absorb.

use nalgebra::DVector;

use crate::PlantState;

pub const ARM_JOINTS: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateArmParams {
    pub inertia: [f64; ARM_JOINTS],
    pub damping: [f64; ARM_JOINTS],
    pub gravity_gain: [f64; ARM_JOINTS],
    pub payload_coupling: [f64; ARM_JOINTS],
    pub payload_mass: f64,
}

impl Default for SurrogateArmParams {
    fn default() -> Self {
        SurrogateArmParams {
            inertia: [1.0; ARM_JOINTS],
            damping: [0.5; ARM_JOINTS],
            // Shoulder-heavy profile: proximal joints see most of the load.
            gravity_gain: [0.0, 3.0, 2.0, 2.0, 0.5, 0.5, 0.1],
            payload_coupling: [0.0, 1.5, 1.0, 1.0, 0.3, 0.2, 0.05],
            payload_mass: 0.0,
        }
    }
}

/// One explicit Euler step of all seven joints.
pub fn surrogate_arm_step(
    state: &PlantState,
    action: &DVector<f64>,
    p: &SurrogateArmParams,
    dt: f64,
) -> PlantState {
    assert_eq!(state.dof(), ARM_JOINTS, "surrogate arm has seven joints");
    assert_eq!(action.len(), ARM_JOINTS, "action dimension mismatch");
    let q_ddot = DVector::from_fn(ARM_JOINTS, |j, _| {
        let sin_q = state.q[j].sin();
        (action[j]
            - p.damping[j] * state.q_dot[j]
            - p.gravity_gain[j] * sin_q
            - p.payload_coupling[j] * p.payload_mass * sin_q)
            / p.inertia[j]
    });
    state.euler(&q_ddot, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rest_at_zero_is_an_equilibrium() {
        let state = PlantState::new(DVector::zeros(ARM_JOINTS), DVector::zeros(ARM_JOINTS));
        let next = surrogate_arm_step(&state, &DVector::zeros(ARM_JOINTS), &Default::default(), 1e-3);
        assert_eq!(next.q, state.q);
        assert_eq!(next.q_dot, state.q_dot);
    }

    #[test]
    fn one_step_matches_jointwise_recomputation() {
        let p = SurrogateArmParams {
            payload_mass: 2.0,
            ..Default::default()
        };
        let q = DVector::from_fn(ARM_JOINTS, |j, _| 0.3 * (j as f64 + 1.0));
        let q_dot = DVector::from_fn(ARM_JOINTS, |j, _| -0.1 * j as f64);
        let a = DVector::from_fn(ARM_JOINTS, |j, _| 0.5 - 0.2 * j as f64);
        let state = PlantState::new(q.clone(), q_dot.clone());
        let dt = 1e-3;
        let next = surrogate_arm_step(&state, &a, &p, dt);
        for j in 0..ARM_JOINTS {
            let qdd = (a[j]
                - p.damping[j] * q_dot[j]
                - p.gravity_gain[j] * q[j].sin()
                - p.payload_coupling[j] * 2.0 * q[j].sin())
                / p.inertia[j];
            assert_relative_eq!(next.q[j], q[j] + dt * q_dot[j], epsilon = 1e-15);
            assert_relative_eq!(next.q_dot[j], q_dot[j] + dt * qdd, epsilon = 1e-15);
        }
    }

    #[test]
    fn payload_torque_scales_linearly_with_mass() {
        let q = DVector::from_element(ARM_JOINTS, 0.7);
        let state = PlantState::new(q.clone(), DVector::zeros(ARM_JOINTS));
        let a = DVector::zeros(ARM_JOINTS);
        let dt = 1e-3;
        let base = surrogate_arm_step(&state, &a, &Default::default(), dt);
        let loaded = surrogate_arm_step(
            &state,
            &a,
            &SurrogateArmParams {
                payload_mass: 3.0,
                ..Default::default()
            },
            dt,
        );
        let p = SurrogateArmParams::default();
        for j in 0..ARM_JOINTS {
            let expected = -dt * p.payload_coupling[j] * 3.0 * q[j].sin() / p.inertia[j];
            assert_relative_eq!(loaded.q_dot[j] - base.q_dot[j], expected, epsilon = 1e-15);
        }
    }
}
