//! Reference controllers the active-inference limits are checked against.
//!
//! In the stiff-prior limit (β → ∞) the belief pins to the target and the
//! action flow integrates a PI law with P = κ_a Π_o' and I = κ_a Π_o; in the
//! loose-prior limit (β → 0) with control disabled the estimator is a plain
//! observation filter. Both limits get an executable counterpart here.

use aic::{AicConfig, AicError, GainSet};
use gm_core::{GmError, PrecisionMatrix, TemporalScale};
use nalgebra::DVector;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum BaselineError {
    #[error("matched PI gains need diagonal precisions")]
    NotDiagonal,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(transparent)]
    Controller(#[from] AicError),

    #[error(transparent)]
    Model(#[from] GmError),
}

/// Per-joint PID gains.
#[derive(Debug, Clone, PartialEq)]
pub struct PidGains {
    pub p: DVector<f64>,
    pub i: DVector<f64>,
    pub d: DVector<f64>,
}

impl PidGains {
    pub fn uniform(n: usize, p: f64, i: f64, d: f64) -> Self {
        PidGains {
            p: DVector::from_element(n, p),
            i: DVector::from_element(n, i),
            d: DVector::from_element(n, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }
}

/// Integrator and previous error, both starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PidState {
    pub integral: DVector<f64>,
    pub prev_error: DVector<f64>,
}

impl PidState {
    pub fn zeros(n: usize) -> Self {
        PidState {
            integral: DVector::zeros(n),
            prev_error: DVector::zeros(n),
        }
    }
}

/// One step of the discrete PID recurrence:
///
///   action    = P∘e + I∘integral + D∘(e - e_prev)/dt
///   integral += e dt
///
/// The integral is accumulated with the left-endpoint rectangle rule (the
/// current error enters it only after the action is formed). An integrated
/// control flow a' = I e + P e' stepped with explicit Euler produces exactly
/// this recurrence, so matched-gain comparisons line up tick for tick. The
/// derivative is a raw backward difference with no filtering, so the first
/// tick sees (e - 0)/dt.
pub fn pid_step(
    state: &PidState,
    error: &DVector<f64>,
    gains: &PidGains,
    dt: f64,
) -> Result<(PidState, DVector<f64>), BaselineError> {
    let n = gains.dim();
    if error.len() != n || state.integral.len() != n {
        return Err(BaselineError::DimensionMismatch {
            expected: n,
            got: error.len(),
        });
    }
    let derivative = (error - &state.prev_error) / dt;
    let action = gains.p.component_mul(error)
        + gains.i.component_mul(&state.integral)
        + gains.d.component_mul(&derivative);
    let integral = &state.integral + error * dt;
    Ok((
        PidState {
            integral,
            prev_error: error.clone(),
        },
        action,
    ))
}

/// PI gains matching the stiff-prior limit of the active-inference
/// controller: P = κ_a diag(Π_o'), I = κ_a diag(Π_o), D = 0.
pub fn matched_pi_gains(
    kappa_a: f64,
    pi_o: &PrecisionMatrix,
    pi_op: &PrecisionMatrix,
) -> Result<PidGains, BaselineError> {
    if !pi_o.is_diagonal() || !pi_op.is_diagonal() {
        return Err(BaselineError::NotDiagonal);
    }
    Ok(PidGains {
        p: pi_op.diag() * kappa_a,
        i: pi_o.diag() * kappa_a,
        d: DVector::zeros(pi_o.dim()),
    })
}

/// Diagnostic estimator configuration: β pinned at `beta_min` with the floor
/// bypassed and control disabled, leaving pure observation filtering.
pub fn pure_filter_mode(
    base: &AicConfig,
    n: usize,
    beta_min: f64,
) -> Result<(AicConfig, TemporalScale), BaselineError> {
    let gains = GainSet::new(
        base.gains.kappa_mu,
        0.0,
        base.gains.kappa_sigma,
        base.gains.kappa_tau,
    )?;
    let config = AicConfig::new(gains, base.action_limit, base.precision_floor)?;
    let beta = TemporalScale::uniform_with_floor(n, beta_min, 0.0)?;
    Ok((config, beta))
}
