//! Mass-spring-damper: m ẍ = a - k1 x - k2 ẋ.

use nalgebra::DVector;

use crate::PlantState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsdParams {
    pub k1: f64,
    pub k2: f64,
    pub mass: f64,
}

impl Default for MsdParams {
    fn default() -> Self {
        MsdParams {
            k1: 1.0,
            k2: 0.1,
            mass: 1.0,
        }
    }
}

/// One explicit Euler step.
pub fn msd_step(state: &PlantState, action: &DVector<f64>, p: &MsdParams, dt: f64) -> PlantState {
    assert_eq!(state.dof(), action.len(), "action dimension mismatch");
    let q_ddot = (action - &state.q * p.k1 - &state.q_dot * p.k2) / p.mass;
    state.euler(&q_ddot, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    #[test]
    fn one_step_from_the_reference_state() {
        let state = PlantState::new(dvector![-0.5], dvector![-1.0]);
        let next = msd_step(&state, &dvector![0.0], &MsdParams::default(), 1e-3);
        // q̈ = -k1 x - k2 ẋ = 0.5 + 0.1 = 0.6.
        assert_relative_eq!(next.q_dot[0], -0.9994, epsilon = 1e-15);
        assert_relative_eq!(next.q[0], -0.501, epsilon = 1e-15);
        assert_relative_eq!(next.t, 1e-3, epsilon = 1e-15);
    }

    #[test]
    fn mass_scales_the_acceleration() {
        let state = PlantState::new(dvector![0.0], dvector![0.0]);
        let p = MsdParams {
            mass: 2.0,
            ..MsdParams::default()
        };
        let next = msd_step(&state, &dvector![1.0], &p, 0.1);
        assert_relative_eq!(next.q_dot[0], 0.05, epsilon = 1e-15);
    }

    #[test]
    fn passive_oscillation_peaks_decay_monotonically() {
        let p = MsdParams::default();
        let mut state = PlantState::new(dvector![1.0], dvector![0.0]);
        let a = dvector![0.0];
        let dt = 1e-3;
        let mut peaks = Vec::new();
        let mut prev = state.clone();
        for _ in 0..30_000 {
            let next = msd_step(&prev, &a, &p, dt);
            // A sign change in velocity brackets a turning point.
            if prev.q_dot[0] * next.q_dot[0] < 0.0 {
                peaks.push(prev.q[0].abs());
            }
            prev = next;
        }
        state = prev;
        assert!(peaks.len() > 5, "expected several oscillation peaks");
        for w in peaks.windows(2) {
            assert!(
                w[1] < w[0] + 1e-9,
                "peak envelope must not grow: {} then {}",
                w[0],
                w[1]
            );
        }
        assert!(state.q[0].abs() < 1.0);
    }
}
