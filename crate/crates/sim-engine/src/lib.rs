//! Closed-loop episode execution.
//!
//! An episode wires one plant to one controller, runs a fixed-step tick
//! loop with optional target and payload schedules, and records every tick
//! into a [`TrajectoryLog`]. Metrics used by the experiment harness are
//! computed from that log, never from controller internals.

mod episode;
mod log;
mod metrics;

pub use episode::{
    AicEpisodeSetup, ControllerSpec, DivergenceSource, EpisodeConfig, EpisodeError, PlantModel,
    run_episode, tick_count,
};
pub use log::TrajectoryLog;
pub use metrics::{
    MetricsSummary, compute_metrics, compute_metrics_scheduled, per_joint_zero_crossings,
};
