//! Library side of the `aic-lab` binary: experiment config parsing, run and
//! sweep orchestration, and plot emission. The binary in `main.rs` is a thin
//! argument-parsing shell over these modules so integration tests can drive
//! the same code paths directly.

pub mod config;
pub mod plot;
pub mod runner;

pub use config::{
    episode_seed, load_experiment, parse_experiment, CliError, Experiment, ExperimentFile,
    SWEEP_AXES,
};
pub use runner::{cmd_gradcheck, cmd_run, cmd_sweep, resolve_out_dir, Manifest, RunOptions};
