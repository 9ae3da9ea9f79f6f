//! Episode configuration and the fixed-step tick loop.

use aic::{AicConfig, AicError, ControllerState, LearningSwitches, controller_tick};
use baselines::{BaselineError, PidGains, PidState, pid_step, pure_filter_mode};
use gm_core::{
    GeneralizedBelief, PrecisionSet, Target, TemporalScale, compute_errors, free_energy,
};
use nalgebra::DVector;
use plants::{
    MsdParams, PlantError, PlantState, SurrogateArmParams, TwoLinkParams, msd_step,
    surrogate_arm_step, two_link_step,
};
use plants::{NoiseSpec, Sensor};
use thiserror::Error;

use crate::log::TrajectoryLog;

/// Slack when matching schedule timestamps against tick times, which are
/// accumulated as k·dt and can land a few ulps past the written value.
const SCHEDULE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EpisodeError {
    #[error("invalid episode config: {0}")]
    InvalidConfig(&'static str),

    #[error("episode diverged at tick {tick} (t = {t:.6}): {source}")]
    Diverged {
        tick: usize,
        t: f64,
        source: DivergenceSource,
        /// Everything recorded before the failing tick.
        partial: Box<TrajectoryLog>,
    },
}

#[derive(Debug, Error)]
pub enum DivergenceSource {
    #[error(transparent)]
    Controller(#[from] AicError),

    #[error(transparent)]
    Plant(#[from] PlantError),

    #[error(transparent)]
    Baseline(#[from] BaselineError),

    #[error("plant state became non-finite")]
    NonFinitePlant,
}

/// Plant selection with its parameters.
#[derive(Debug, Clone)]
pub enum PlantModel {
    Msd(MsdParams),
    SurrogateArm(SurrogateArmParams),
    TwoLink(TwoLinkParams),
}

impl PlantModel {
    fn step(
        &self,
        state: &PlantState,
        action: &DVector<f64>,
        dt: f64,
    ) -> Result<PlantState, PlantError> {
        match self {
            PlantModel::Msd(p) => Ok(msd_step(state, action, p, dt)),
            PlantModel::SurrogateArm(p) => Ok(surrogate_arm_step(state, action, p, dt)),
            PlantModel::TwoLink(p) => two_link_step(state, action, p, dt),
        }
    }

    fn set_payload(&mut self, mass: f64) -> bool {
        match self {
            PlantModel::SurrogateArm(p) => {
                p.payload_mass = mass;
                true
            }
            _ => false,
        }
    }
}

/// Initial controller quantities for an active-inference episode.
#[derive(Debug, Clone)]
pub struct AicEpisodeSetup {
    pub config: AicConfig,
    pub initial_belief: GeneralizedBelief,
    pub precisions: PrecisionSet,
    pub beta: TemporalScale,
    pub initial_action: DVector<f64>,
}

impl AicEpisodeSetup {
    fn into_state(self) -> Result<(AicConfig, ControllerState), AicError> {
        let state = ControllerState::new(
            self.initial_belief,
            self.initial_action,
            self.precisions,
            self.beta,
        )?;
        Ok((self.config, state))
    }
}

/// Controller selection.
#[derive(Debug, Clone)]
pub enum ControllerSpec {
    /// Full active-inference controller.
    Aic(AicEpisodeSetup),
    /// Discrete PID on the position observation error.
    Pid { gains: PidGains },
    /// Estimation-only diagnostic: the setup's gains with control disabled
    /// and β pinned at `beta_min` below the usual floor.
    Filter {
        setup: AicEpisodeSetup,
        beta_min: f64,
    },
}

/// Everything one episode needs. Targets and payloads are (time, value)
/// schedules; an entry takes effect at the first tick with t ≥ its time.
#[derive(Debug, Clone)]
pub struct EpisodeConfig {
    pub plant: PlantModel,
    pub initial_state: PlantState,
    pub controller: ControllerSpec,
    pub targets: Vec<(f64, DVector<f64>)>,
    pub payloads: Vec<(f64, f64)>,
    pub dt: f64,
    pub duration: f64,
    pub noise: NoiseSpec,
    pub switches: LearningSwitches,
    /// Run the controller every this many ticks, holding the action in
    /// between. Plant and sensor always run at dt.
    pub control_every: usize,
}

impl EpisodeConfig {
    /// Common case: one plant, one controller, one fixed target, no payload
    /// schedule, controller at every tick.
    pub fn new(
        plant: PlantModel,
        initial_state: PlantState,
        controller: ControllerSpec,
        target: DVector<f64>,
        dt: f64,
        duration: f64,
        noise: NoiseSpec,
        switches: LearningSwitches,
    ) -> Self {
        EpisodeConfig {
            plant,
            initial_state,
            controller,
            targets: vec![(0.0, target)],
            payloads: Vec::new(),
            dt,
            duration,
            noise,
            switches,
            control_every: 1,
        }
    }

    fn validate(&self) -> Result<(), EpisodeError> {
        let n = self.initial_state.dof();
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(EpisodeError::InvalidConfig("dt must be positive"));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(EpisodeError::InvalidConfig("duration must be positive"));
        }
        if self.control_every == 0 {
            return Err(EpisodeError::InvalidConfig("control_every must be ≥ 1"));
        }
        if self.targets.is_empty() {
            return Err(EpisodeError::InvalidConfig("target schedule is empty"));
        }
        if self.targets[0].0 > 0.0 {
            return Err(EpisodeError::InvalidConfig(
                "first target must be in force at t = 0",
            ));
        }
        if !self.targets.windows(2).all(|w| w[0].0 <= w[1].0) {
            return Err(EpisodeError::InvalidConfig("target schedule not time-sorted"));
        }
        if !self.payloads.windows(2).all(|w| w[0].0 <= w[1].0) {
            return Err(EpisodeError::InvalidConfig("payload schedule not time-sorted"));
        }
        if !self.payloads.is_empty() && !matches!(self.plant, PlantModel::SurrogateArm(_)) {
            return Err(EpisodeError::InvalidConfig(
                "payload schedule requires the surrogate arm",
            ));
        }
        if self.targets.iter().any(|(_, mu_d)| mu_d.len() != n) {
            return Err(EpisodeError::InvalidConfig("target dimension mismatch"));
        }
        let expected = match self.plant {
            PlantModel::Msd(_) => n,
            PlantModel::SurrogateArm(_) => plants::ARM_JOINTS,
            PlantModel::TwoLink(_) => 2,
        };
        if n != expected {
            return Err(EpisodeError::InvalidConfig(
                "initial state dimension does not match the plant",
            ));
        }
        let ctrl_dim = match &self.controller {
            ControllerSpec::Aic(setup) | ControllerSpec::Filter { setup, .. } => {
                setup.initial_belief.dim()
            }
            ControllerSpec::Pid { gains } => gains.dim(),
        };
        if ctrl_dim != n {
            return Err(EpisodeError::InvalidConfig("controller dimension mismatch"));
        }
        Ok(())
    }
}

/// Number of tick rows an episode produces: ⌈duration/dt⌉, with a tolerance
/// so exact multiples are not pushed up by a rounding ulp.
pub fn tick_count(duration: f64, dt: f64) -> usize {
    let ratio = duration / dt;
    let rounded = ratio.round();
    if (ratio - rounded).abs() < 1e-9 * rounded.max(1.0) {
        rounded as usize
    } else {
        ratio.ceil() as usize
    }
}

enum ControllerRuntime {
    Aic {
        cfg: AicConfig,
        state: ControllerState,
        switches: LearningSwitches,
    },
    Pid {
        gains: PidGains,
        state: PidState,
        held: DVector<f64>,
    },
}

/// Runs the tick loop to completion.
///
/// Each tick: apply due schedule entries, observe the plant, run the
/// controller (skipped on off ticks of the rate divider), log the pre-update
/// configuration, then step the plant with the pre-update action, making the
/// whole tick one explicit Euler step of the coupled plant/controller flows.
/// The PID baseline has no action state of its own; it applies its freshly
/// computed output directly. The plant is not stepped after the final tick,
/// so the log holds exactly [`tick_count`] rows. Identical configs give
/// identical logs; the observation stream advances every tick regardless of
/// noise levels or the rate divider.
pub fn run_episode(config: &EpisodeConfig) -> Result<TrajectoryLog, EpisodeError> {
    config.validate()?;
    let n = config.initial_state.dof();
    let dt = config.dt;
    let n_ticks = tick_count(config.duration, dt);

    let mut plant = config.plant.clone();
    let mut plant_state = config.initial_state.clone();
    let mut sensor = Sensor::new(config.noise);

    let mut runtime = match config.controller.clone() {
        ControllerSpec::Aic(setup) => {
            let (cfg, state) = setup
                .into_state()
                .map_err(|e| diverged(0, 0.0, e.into(), TrajectoryLog::with_capacity(n, dt, 0)))?;
            ControllerRuntime::Aic {
                cfg,
                state,
                switches: config.switches,
            }
        }
        ControllerSpec::Filter { setup, beta_min } => {
            let (cfg, beta) = pure_filter_mode(&setup.config, n, beta_min)
                .map_err(|e| diverged(0, 0.0, e.into(), TrajectoryLog::with_capacity(n, dt, 0)))?;
            let (_, state) = AicEpisodeSetup { config: cfg.clone(), beta, ..setup }
                .into_state()
                .map_err(|e| diverged(0, 0.0, e.into(), TrajectoryLog::with_capacity(n, dt, 0)))?;
            ControllerRuntime::Aic {
                cfg,
                state,
                switches: config.switches,
            }
        }
        ControllerSpec::Pid { gains } => ControllerRuntime::Pid {
            state: PidState::zeros(gains.dim()),
            gains,
            held: DVector::zeros(n),
        },
    };

    let mut log = TrajectoryLog::with_capacity(n, dt, n_ticks);
    let mut target_idx = 0usize;
    let mut payload_idx = 0usize;
    let mut current_target = config.targets[0].1.clone();

    for tick in 0..n_ticks {
        let t = tick as f64 * dt;

        while target_idx < config.targets.len() && config.targets[target_idx].0 <= t + SCHEDULE_TOL
        {
            current_target = config.targets[target_idx].1.clone();
            target_idx += 1;
        }
        while payload_idx < config.payloads.len()
            && config.payloads[payload_idx].0 <= t + SCHEDULE_TOL
        {
            plant.set_payload(config.payloads[payload_idx].1);
            payload_idx += 1;
        }

        let obs = sensor.observe(&plant_state);
        let run_controller = tick % config.control_every == 0;

        let action = match &mut runtime {
            ControllerRuntime::Aic {
                cfg,
                state,
                switches,
            } => {
                let target = Target::new(current_target.clone())
                    .map_err(|e| diverged(tick, t, AicError::from(e).into(), log.clone()))?;
                let errors = compute_errors(&state.belief, &obs, &target, &state.beta)
                    .map_err(|e| diverged(tick, t, AicError::from(e).into(), log.clone()))?;
                let f = free_energy(&errors, &state.precisions)
                    .map_err(|e| diverged(tick, t, AicError::from(e).into(), log.clone()))?;

                log.mu.push(state.belief.mu.clone());
                log.mu_p.push(state.belief.mu_p.clone());
                log.mu_pp.push(state.belief.mu_pp.clone());
                log.free_energy.push(f);
                log.beta_diag.push(state.beta.diag().clone());
                log.pi_o_diag.push(state.precisions.pi_o.diag());
                log.pi_op_diag.push(state.precisions.pi_op.diag());

                // The plant gets the pre-update action: one explicit Euler
                // step of the coupled plant/controller flows evaluates both
                // at the pre-tick state. The action computed here is applied
                // from the next tick on.
                let applied = state.action.clone();
                if run_controller {
                    let (next, _) = controller_tick(cfg, state, &obs, &target, dt, *switches)
                        .map_err(|e| diverged(tick, t, e.into(), log.clone()))?;
                    *state = next;
                }
                applied
            }
            ControllerRuntime::Pid { gains, state, held } => {
                log.mu.push(DVector::zeros(n));
                log.mu_p.push(DVector::zeros(n));
                log.mu_pp.push(DVector::zeros(n));
                log.free_energy.push(0.0);
                log.beta_diag.push(DVector::zeros(n));
                log.pi_o_diag.push(DVector::zeros(n));
                log.pi_op_diag.push(DVector::zeros(n));

                if run_controller {
                    let error = &current_target - &obs.o;
                    let (next, action) = pid_step(state, &error, gains, dt)
                        .map_err(|e| diverged(tick, t, e.into(), log.clone()))?;
                    *state = next;
                    *held = action.clone();
                    action
                } else {
                    held.clone()
                }
            }
        };

        log.t.push(t);
        log.q.push(plant_state.q.clone());
        log.q_dot.push(plant_state.q_dot.clone());
        log.o.push(obs.o.clone());
        log.o_p.push(obs.o_p.clone());
        log.a.push(action.clone());
        log.target.push(current_target.clone());

        if tick + 1 < n_ticks {
            plant_state = plant
                .step(&plant_state, &action, dt)
                .map_err(|e| diverged(tick, t, e.into(), log.clone()))?;
            if plant_state.q.iter().chain(plant_state.q_dot.iter()).any(|x| !x.is_finite()) {
                return Err(diverged(tick, t, DivergenceSource::NonFinitePlant, log));
            }
        }
    }

    Ok(log)
}

fn diverged(tick: usize, t: f64, source: DivergenceSource, partial: TrajectoryLog) -> EpisodeError {
    EpisodeError::Diverged {
        tick,
        t,
        source,
        partial: Box::new(partial),
    }
}
