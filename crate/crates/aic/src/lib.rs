//! Active-inference controller.
//!
//! One controller tick performs simultaneous Euler steps of four coupled
//! flows, every one of them derived from the same free energy F:
//!
//!   beliefs:     μ̃ ← μ̃ + dt (D μ̃ - κ_μ ∂F/∂μ̃)      (D shifts orders up)
//!   action:      a ← a + dt (-κ_a (Π_o ε_o + Π_o' ε_o'))
//!   precisions:  Π_i ← Π_i - dt κ_σ ∂F/∂Π_i          (floored, i ∈ {o, o'})
//!   time scale:  β ← max(β - dt κ_τ ∂F/∂β, β_floor)
//!
//! The action gradient uses an identity sensitivity ∂o/∂a, so the plant
//! needs no inverse model; the sign and magnitude of the observation errors
//! alone steer the torque. All four updates read the pre-tick state, so a
//! tick equals the hand-composition of its sub-steps.

use nalgebra::DVector;
use thiserror::Error;

use gm_core::{
    compute_errors, grad_belief, grad_beta, grad_precision, ErrorSet, GeneralizedBelief,
    GeneralizedObservation, GmError, PrecisionSet, Target, TemporalScale,
};

#[derive(Debug, Clone, Error)]
pub enum AicError {
    #[error(transparent)]
    Model(#[from] GmError),

    #[error("{quantity} became non-finite during {op}")]
    Diverged {
        op: &'static str,
        quantity: &'static str,
    },

    #[error("invalid controller configuration: {0}")]
    InvalidConfig(&'static str),
}

/// Learning rates for the four flows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSet {
    /// Belief learning rate, shared across the three belief orders.
    pub kappa_mu: f64,
    /// Action learning rate. Zero disables control (estimation-only runs).
    pub kappa_a: f64,
    /// Precision learning rate.
    pub kappa_sigma: f64,
    /// Temporal-scale learning rate.
    pub kappa_tau: f64,
}

impl GainSet {
    pub fn new(
        kappa_mu: f64,
        kappa_a: f64,
        kappa_sigma: f64,
        kappa_tau: f64,
    ) -> Result<Self, AicError> {
        let all = [kappa_mu, kappa_a, kappa_sigma, kappa_tau];
        if all.iter().any(|k| !k.is_finite()) {
            return Err(AicError::InvalidConfig("gains must be finite"));
        }
        if kappa_mu <= 0.0 {
            return Err(AicError::InvalidConfig("kappa_mu must be positive"));
        }
        if kappa_a < 0.0 || kappa_sigma < 0.0 || kappa_tau < 0.0 {
            return Err(AicError::InvalidConfig(
                "kappa_a, kappa_sigma and kappa_tau must be non-negative",
            ));
        }
        Ok(GainSet {
            kappa_mu,
            kappa_a,
            kappa_sigma,
            kappa_tau,
        })
    }
}

/// Which hyperparameters adapt online. The dynamics-prior precisions Π_μ and
/// Π_μ' stay fixed; their misspecification is exactly what β learning is
/// meant to absorb.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LearningSwitches {
    pub learn_pi_o: bool,
    pub learn_pi_op: bool,
    pub learn_beta: bool,
}

impl LearningSwitches {
    pub fn frozen() -> Self {
        LearningSwitches::default()
    }

    pub fn all() -> Self {
        LearningSwitches {
            learn_pi_o: true,
            learn_pi_op: true,
            learn_beta: true,
        }
    }
}

/// Static controller configuration.
#[derive(Debug, Clone)]
pub struct AicConfig {
    pub gains: GainSet,
    /// Symmetric torque clamp, applied after integration when present.
    pub action_limit: Option<f64>,
    /// Lower bound kept on learned precision diagonals.
    pub precision_floor: f64,
}

impl AicConfig {
    pub fn new(
        gains: GainSet,
        action_limit: Option<f64>,
        precision_floor: f64,
    ) -> Result<Self, AicError> {
        if let Some(limit) = action_limit {
            if !(limit.is_finite() && limit > 0.0) {
                return Err(AicError::InvalidConfig("action limit must be positive"));
            }
        }
        if !(precision_floor.is_finite() && precision_floor > 0.0) {
            return Err(AicError::InvalidConfig("precision floor must be positive"));
        }
        Ok(AicConfig {
            gains,
            action_limit,
            precision_floor,
        })
    }
}

/// Everything the controller carries between ticks.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    pub belief: GeneralizedBelief,
    pub action: DVector<f64>,
    pub precisions: PrecisionSet,
    pub beta: TemporalScale,
}

impl ControllerState {
    pub fn new(
        belief: GeneralizedBelief,
        action: DVector<f64>,
        precisions: PrecisionSet,
        beta: TemporalScale,
    ) -> Result<Self, AicError> {
        let n = belief.dim();
        for (dim, what) in [
            (action.len(), "action"),
            (precisions.dim(), "precisions"),
            (beta.dim(), "temporal scale"),
        ] {
            if dim != n {
                return Err(AicError::Model(GmError::DimensionMismatch {
                    context: what,
                    expected: n,
                    got: dim,
                }));
            }
        }
        Ok(ControllerState {
            belief,
            action,
            precisions,
            beta,
        })
    }

    pub fn dim(&self) -> usize {
        self.belief.dim()
    }
}

fn check_dt(dt: f64) -> Result<(), AicError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(AicError::InvalidConfig("dt must be positive and finite"));
    }
    Ok(())
}

fn ensure_finite(v: &DVector<f64>, op: &'static str, quantity: &'static str) -> Result<(), AicError> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(AicError::Diverged { op, quantity });
    }
    Ok(())
}

/// One Euler step of the belief flow μ̃ ← μ̃ + dt (D μ̃ - κ_μ ∂F/∂μ̃).
///
/// D shifts generalised orders up (Dμ = μ', Dμ' = μ'', Dμ'' = 0), so each
/// order drifts along the next one while descending the free energy.
pub fn estimation_step(
    cfg: &AicConfig,
    state: &ControllerState,
    obs: &GeneralizedObservation,
    target: &Target,
    dt: f64,
) -> Result<ControllerState, AicError> {
    check_dt(dt)?;
    let errors = compute_errors(&state.belief, obs, target, &state.beta)?;
    let g = grad_belief(&errors, &state.precisions, &state.beta)?;
    let k = cfg.gains.kappa_mu;
    let b = &state.belief;
    let belief = GeneralizedBelief {
        mu: &b.mu + (&b.mu_p - &g.d_mu * k) * dt,
        mu_p: &b.mu_p + (&b.mu_pp - &g.d_mu_p * k) * dt,
        mu_pp: &b.mu_pp - &g.d_mu_pp * (k * dt),
    };
    if !belief.is_finite() {
        return Err(AicError::Diverged {
            op: "estimation_step",
            quantity: "belief",
        });
    }
    Ok(ControllerState {
        belief,
        ..state.clone()
    })
}

/// One Euler step of the action flow a ← a + dt ȧ with
/// ȧ = -κ_a (Π_o (o - μ) + Π_o' (o' - μ')), clamped when a limit is set.
pub fn control_step(
    cfg: &AicConfig,
    state: &ControllerState,
    obs: &GeneralizedObservation,
    dt: f64,
) -> Result<ControllerState, AicError> {
    check_dt(dt)?;
    if obs.dim() != state.dim() {
        return Err(AicError::Model(GmError::DimensionMismatch {
            context: "observation vs controller state",
            expected: state.dim(),
            got: obs.dim(),
        }));
    }
    let eps_o = &obs.o - &state.belief.mu;
    let eps_op = &obs.o_p - &state.belief.mu_p;
    let a_dot = -(state.precisions.pi_o.mul_vec(&eps_o)
        + state.precisions.pi_op.mul_vec(&eps_op))
        * cfg.gains.kappa_a;
    let mut action = &state.action + a_dot * dt;
    if let Some(limit) = cfg.action_limit {
        action = action.map(|a| a.clamp(-limit, limit));
    }
    ensure_finite(&action, "control_step", "action")?;
    Ok(ControllerState {
        action,
        ..state.clone()
    })
}

/// One Euler step of precision learning on the flagged observation blocks:
/// Π ← Π - dt κ_σ · ½(ε εᵀ - Π⁻¹), then re-floored. Diagonal precisions stay
/// diagonal (the update reads only the gradient diagonal); dense ones are
/// re-symmetrised and eigenvalue-floored.
pub fn precision_update(
    cfg: &AicConfig,
    state: &ControllerState,
    errors: &ErrorSet,
    switches: LearningSwitches,
    dt: f64,
) -> Result<ControllerState, AicError> {
    check_dt(dt)?;
    if !(switches.learn_pi_o || switches.learn_pi_op) || cfg.gains.kappa_sigma == 0.0 {
        return Ok(state.clone());
    }
    let g = grad_precision(errors, &state.precisions)?;
    let scale = -dt * cfg.gains.kappa_sigma;
    let mut precisions = state.precisions.clone();
    if switches.learn_pi_o {
        precisions.pi_o = precisions
            .pi_o
            .add_scaled_dense(&g.d_pi_o, scale)
            .reconditioned(cfg.precision_floor);
    }
    if switches.learn_pi_op {
        precisions.pi_op = precisions
            .pi_op
            .add_scaled_dense(&g.d_pi_op, scale)
            .reconditioned(cfg.precision_floor);
    }
    ensure_finite(&precisions.pi_o.diag(), "precision_update", "pi_o")?;
    ensure_finite(&precisions.pi_op.diag(), "precision_update", "pi_op")?;
    Ok(ControllerState {
        precisions,
        ..state.clone()
    })
}

/// One Euler step of temporal-scale learning, clamped at the configured
/// floor. `belief` and `errors` are the pre-tick values, so the update stays
/// consistent with the other flows when composed into a tick.
pub fn beta_update(
    cfg: &AicConfig,
    state: &ControllerState,
    errors: &ErrorSet,
    belief: &GeneralizedBelief,
    target: &Target,
    dt: f64,
) -> Result<ControllerState, AicError> {
    check_dt(dt)?;
    let g = grad_beta(errors, &state.precisions, belief, target)?;
    let stepped = state.beta.diag() - g * (dt * cfg.gains.kappa_tau);
    ensure_finite(&stepped, "beta_update", "beta")?;
    Ok(ControllerState {
        beta: state.beta.with_diag_clamped(stepped),
        ..state.clone()
    })
}

/// One full controller tick. Every sub-step is evaluated at the pre-tick
/// state with the same pre-tick errors, then the disjoint results are merged;
/// this is exactly one explicit Euler step of the coupled flows. Returns the
/// new state together with the action to apply this tick.
pub fn controller_tick(
    cfg: &AicConfig,
    state: &ControllerState,
    obs: &GeneralizedObservation,
    target: &Target,
    dt: f64,
    switches: LearningSwitches,
) -> Result<(ControllerState, DVector<f64>), AicError> {
    let errors = compute_errors(&state.belief, obs, target, &state.beta)?;

    let estimated = estimation_step(cfg, state, obs, target, dt)?;
    let controlled = control_step(cfg, state, obs, dt)?;
    let relearned = precision_update(cfg, state, &errors, switches, dt)?;
    let beta = if switches.learn_beta && cfg.gains.kappa_tau > 0.0 {
        beta_update(cfg, state, &errors, &state.belief, target, dt)?.beta
    } else {
        state.beta.clone()
    };

    let next = ControllerState {
        belief: estimated.belief,
        action: controlled.action,
        precisions: relearned.precisions,
        beta,
    };
    let action = next.action.clone();
    Ok((next, action))
}
