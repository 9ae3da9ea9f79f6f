//! Run and sweep orchestration: episode execution, output layout, and the
//! manifest that indexes every file a run produces.
//!
//! Layout: a single run writes `trajectory.csv`, `metrics.json`, and
//! `manifest.json` into the output directory. A sweep adds one subdirectory
//! per episode (`ep000`, or `ep000_off`/`ep000_on` when paired) with the same
//! per-episode files, plus a top-level `summary.csv`. Episodes execute in a
//! rayon pool sized by `--workers`; results are collected by episode index,
//! so the output bytes do not depend on worker count or scheduling. All file
//! writes happen on the coordinator thread.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use sim_engine::{
    compute_metrics_scheduled, run_episode, EpisodeError, MetricsSummary, TrajectoryLog,
};

use crate::config::{episode_seed, load_experiment, CliError, Experiment};
use crate::plot::trajectory_svg;

/// Command-line options shared by `run` and `sweep`.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed_override: Option<u64>,
    pub emit_plots: bool,
}

/// Index of everything one invocation wrote. `files` lists every emitted
/// path relative to the output directory, including the manifest itself.
#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub episodes: Vec<EpisodeRecord>,
    pub files: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis_value: Option<f64>,
    pub learning: String,
    pub seed: u64,
    pub status: String,
    pub dir: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsSummary>,
}

/// Where outputs go: `--out` wins, then `$AIC_LAB_OUT/<config stem>`, then
/// `runs/<config stem>`.
pub fn resolve_out_dir(config_path: &Path, opts: &RunOptions) -> PathBuf {
    if let Some(out) = &opts.out {
        return out.clone();
    }
    let stem = config_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".into());
    let root = std::env::var_os("AIC_LAB_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"));
    root.join(stem)
}

/// `run`: execute the config. Files with a `[sweep]` section dispatch to the
/// sweep path so a sweep config behaves the same under either subcommand.
pub fn cmd_run(config_path: &Path, opts: &RunOptions) -> Result<PathBuf, CliError> {
    let exp = load_experiment(config_path)?;
    let out = resolve_out_dir(config_path, opts);
    if exp.file.sweep.is_some() {
        execute_sweep(&exp, &out, opts)?;
    } else {
        execute_single(&exp, &out, opts)?;
    }
    Ok(out)
}

/// `sweep`: like `run`, but the `[sweep]` section is mandatory.
pub fn cmd_sweep(config_path: &Path, opts: &RunOptions) -> Result<PathBuf, CliError> {
    let exp = load_experiment(config_path)?;
    if exp.file.sweep.is_none() {
        return Err(CliError::Schema(format!(
            "{} has no [sweep] section",
            config_path.display()
        )));
    }
    let out = resolve_out_dir(config_path, opts);
    execute_sweep(&exp, &out, opts)?;
    Ok(out)
}

/// One planned episode of a sweep.
struct Job {
    index: usize,
    axis_value: Option<f64>,
    seed: u64,
    dir: String,
    exp: Experiment,
}

/// What one episode produced. Divergence keeps the partial trajectory so the
/// failure can be inspected; any other episode error aborts the run.
struct Outcome {
    log: TrajectoryLog,
    metrics: Option<MetricsSummary>,
    error: Option<String>,
}

fn execute_episode(exp: &Experiment, seed: u64) -> Result<Outcome, CliError> {
    let config = exp.episode_config(seed)?;
    match run_episode(&config) {
        Ok(log) => {
            let metrics = compute_metrics_scheduled(&log);
            Ok(Outcome {
                log,
                metrics: Some(metrics),
                error: None,
            })
        }
        Err(EpisodeError::Diverged {
            tick,
            t,
            source,
            partial,
        }) => Ok(Outcome {
            log: *partial,
            metrics: None,
            error: Some(format!("diverged at tick {tick} (t = {t:.6}): {source}")),
        }),
        Err(other) => Err(CliError::Schema(other.to_string())),
    }
}

fn execute_single(exp: &Experiment, out: &Path, opts: &RunOptions) -> Result<(), CliError> {
    let base_seed = opts.seed_override.unwrap_or(exp.file.seed);
    let seed = episode_seed(base_seed, 0);
    let outcome = execute_episode(exp, seed)?;
    if let Some(error) = &outcome.error {
        return Err(CliError::Diverged(error.clone()));
    }

    std::fs::create_dir_all(out)?;
    let mut files = vec!["trajectory.csv".to_string(), "metrics.json".to_string()];
    std::fs::write(out.join("trajectory.csv"), outcome.log.to_csv())?;
    let metrics = outcome.metrics.expect("non-diverged episode has metrics");
    std::fs::write(
        out.join("metrics.json"),
        serde_json::to_string_pretty(&metrics).expect("metrics serialise") + "\n",
    )?;
    if opts.emit_plots {
        std::fs::write(out.join("trajectory.svg"), trajectory_svg(&outcome.log))?;
        files.push("trajectory.svg".to_string());
    }

    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: exp.config_hash(),
        seed: base_seed,
        episodes: vec![EpisodeRecord {
            index: 0,
            axis_value: None,
            learning: exp.learning_label().to_string(),
            seed,
            status: "ok".to_string(),
            dir: ".".to_string(),
            metrics: Some(metrics),
        }],
        files: with_manifest(files),
    };
    write_manifest(out, &manifest)
}

fn execute_sweep(exp: &Experiment, out: &Path, opts: &RunOptions) -> Result<(), CliError> {
    let sweep = exp.file.sweep.clone().expect("caller checked sweep");
    let base_seed = opts.seed_override.unwrap_or(exp.file.seed);

    let mut jobs = Vec::new();
    for (value_index, &value) in sweep.values.iter().enumerate() {
        let patched = exp.with_axis(&sweep.axis, value)?;
        let seed = episode_seed(base_seed, value_index);
        if sweep.paired {
            for on in [false, true] {
                jobs.push(Job {
                    index: jobs.len(),
                    axis_value: Some(value),
                    seed,
                    dir: format!("ep{value_index:03}_{}", if on { "on" } else { "off" }),
                    exp: patched.with_learning(on)?,
                });
            }
        } else {
            jobs.push(Job {
                index: jobs.len(),
                axis_value: Some(value),
                seed,
                dir: format!("ep{value_index:03}"),
                exp: patched.clone(),
            });
        }
    }

    let run_all = || -> Vec<Result<Outcome, CliError>> {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|job| execute_episode(&job.exp, job.seed))
            .collect()
    };
    let outcomes = match opts.workers {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| CliError::Schema(format!("worker pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };

    std::fs::create_dir_all(out)?;
    let mut files = Vec::new();
    let mut records = Vec::new();
    let mut summary = String::from(
        "axis_value,learning,mae,overshoot,settling_time_2pct,zero_crossings,status\n",
    );

    for (job, outcome) in jobs.iter().zip(outcomes) {
        let outcome = outcome?;
        let ep_dir = out.join(&job.dir);
        std::fs::create_dir_all(&ep_dir)?;
        std::fs::write(ep_dir.join("trajectory.csv"), outcome.log.to_csv())?;
        files.push(format!("{}/trajectory.csv", job.dir));

        let learning = job.exp.learning_label();
        let axis = job.axis_value.expect("sweep jobs carry an axis value");
        let status = if outcome.error.is_some() {
            "diverged"
        } else {
            "ok"
        };
        if let Some(metrics) = &outcome.metrics {
            std::fs::write(
                ep_dir.join("metrics.json"),
                serde_json::to_string_pretty(metrics).expect("metrics serialise") + "\n",
            )?;
            files.push(format!("{}/metrics.json", job.dir));
            summary.push_str(&format!(
                "{axis},{learning},{:.8e},{:.8e},{:.8e},{},{status}\n",
                metrics.mae, metrics.overshoot, metrics.settling_time_2pct, metrics.zero_crossings,
            ));
        } else {
            summary.push_str(&format!("{axis},{learning},,,,,{status}\n"));
        }
        if opts.emit_plots && !outcome.log.is_empty() {
            std::fs::write(ep_dir.join("trajectory.svg"), trajectory_svg(&outcome.log))?;
            files.push(format!("{}/trajectory.svg", job.dir));
        }

        records.push(EpisodeRecord {
            index: job.index,
            axis_value: job.axis_value,
            learning: learning.to_string(),
            seed: job.seed,
            status: status.to_string(),
            dir: job.dir.clone(),
            metrics: outcome.metrics,
        });
    }

    std::fs::write(out.join("summary.csv"), summary)?;
    files.push("summary.csv".to_string());

    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: exp.config_hash(),
        seed: base_seed,
        episodes: records,
        files: with_manifest(files),
    };
    write_manifest(out, &manifest)
}

fn with_manifest(mut files: Vec<String>) -> Vec<String> {
    files.push("manifest.json".to_string());
    files.sort();
    files
}

fn write_manifest(out: &Path, manifest: &Manifest) -> Result<(), CliError> {
    std::fs::write(
        out.join("manifest.json"),
        serde_json::to_string_pretty(manifest).expect("manifest serialises") + "\n",
    )?;
    Ok(())
}

/// `gradcheck`: the randomized gradient-consistency battery as a self-test.
/// Prints the worst relative error per gradient family; any tolerance breach
/// dumps the offending scenarios and exits with the divergence code.
pub fn cmd_gradcheck(canary: bool) -> Result<(), CliError> {
    let config = gm_core::gradcheck::GradCheckConfig {
        canary,
        ..Default::default()
    };
    let report = gm_core::gradcheck::run_battery(&config).map_err(|e| CliError::Schema(e.to_string()))?;
    println!(
        "belief     worst relative error {:.3e}",
        report.worst_belief
    );
    println!(
        "precision  worst relative error {:.3e}",
        report.worst_precision
    );
    println!(
        "beta       worst relative error {:.3e}",
        report.worst_beta
    );
    println!("components checked: {}", report.components_checked);
    if report.passed() {
        Ok(())
    } else {
        for breach in &report.breaches {
            eprintln!("breach: {breach}");
        }
        Err(CliError::Diverged(format!(
            "gradient check failed with {} breaches",
            report.breaches.len()
        )))
    }
}
