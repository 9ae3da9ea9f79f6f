//! Episode metrics, all computed from the trajectory log alone.

use gm_core::Target;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::log::TrajectoryLog;

/// Joints closer to their target than this at segment start are treated as
/// already settled for overshoot and band purposes.
const STEP_FLOOR: f64 = 1e-9;

/// Scalar summary of one episode.
///
/// `mae` is the headline tracking number: mean |μ_d − μ| over ticks and
/// joints (averaged, not summed, across joints). `mae_q` is the same
/// measure on the plant state, for runs whose belief columns are zero.
/// Overshoot is relative to the initial offset of the final target segment,
/// taken along the approach direction and maximised over joints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub mae: f64,
    pub mae_q: f64,
    pub overshoot: f64,
    pub settling_time_2pct: f64,
    pub settled: bool,
    pub zero_crossings: u32,
    pub target_bias: f64,
    pub tracking_error: f64,
}

/// Metrics against one fixed target held for the whole episode.
pub fn compute_metrics(log: &TrajectoryLog, target: &Target) -> MetricsSummary {
    assert!(!log.is_empty(), "metrics need a non-empty log");
    let rows = log.len();
    let targets: Vec<&DVector<f64>> = (0..rows).map(|_| &target.mu_d).collect();
    summarize(log, &targets, 0)
}

/// Metrics against the per-tick target recorded in the log. Overshoot,
/// settling, and crossings are evaluated over the final target segment;
/// the averaged errors cover the whole episode.
pub fn compute_metrics_scheduled(log: &TrajectoryLog) -> MetricsSummary {
    assert!(!log.is_empty(), "metrics need a non-empty log");
    let rows = log.len();
    let targets: Vec<&DVector<f64>> = log.target.iter().collect();
    let mut segment_start = 0;
    for row in (1..rows).rev() {
        if log.target[row] != log.target[row - 1] {
            segment_start = row;
            break;
        }
    }
    summarize(log, &targets, segment_start)
}

/// Sign changes of (q_j − μ_d,j) per joint, not counting the first one.
/// The first crossing is the approach itself; everything after it is
/// oscillation around the target.
pub fn per_joint_zero_crossings(log: &TrajectoryLog) -> Vec<u32> {
    let n = log.dof;
    (0..n)
        .map(|j| {
            let mut changes = 0u32;
            let mut last_sign = 0i8;
            for row in 0..log.len() {
                let e = log.q[row][j] - log.target[row][j];
                let sign = if e > 0.0 {
                    1
                } else if e < 0.0 {
                    -1
                } else {
                    0
                };
                if sign != 0 {
                    if last_sign != 0 && sign != last_sign {
                        changes += 1;
                    }
                    last_sign = sign;
                }
            }
            changes.saturating_sub(1)
        })
        .collect()
}

fn summarize(log: &TrajectoryLog, targets: &[&DVector<f64>], segment_start: usize) -> MetricsSummary {
    let rows = log.len();
    let n = log.dof;

    let mut mae = 0.0;
    let mut mae_q = 0.0;
    let mut target_bias = 0.0;
    let mut tracking_error = 0.0;
    for row in 0..rows {
        let mu_err = &log.mu[row] - targets[row];
        let q_err = &log.q[row] - targets[row];
        mae += mu_err.iter().map(|e| e.abs()).sum::<f64>();
        mae_q += q_err.iter().map(|e| e.abs()).sum::<f64>();
        target_bias += mu_err.norm();
        tracking_error += (&log.mu[row] - &log.q[row]).norm();
    }
    let ticks = rows as f64;
    mae /= ticks * n as f64;
    mae_q /= ticks * n as f64;
    target_bias /= ticks;
    tracking_error /= ticks;

    let segment = segment_start..rows;
    let d = targets[rows - 1];
    let start_q = &log.q[segment_start];

    let mut overshoot: f64 = 0.0;
    for j in 0..n {
        let step = d[j] - start_q[j];
        if step.abs() < STEP_FLOOR {
            continue;
        }
        let dir = step.signum();
        let worst = segment
            .clone()
            .map(|row| dir * (log.q[row][j] - d[j]) / step.abs())
            .fold(0.0f64, f64::max);
        overshoot = overshoot.max(worst);
    }

    let mut settled_from = rows;
    'scan: for row in segment.clone().rev() {
        for j in 0..n {
            let step = (d[j] - start_q[j]).abs();
            let band = if step < STEP_FLOOR {
                f64::INFINITY
            } else {
                0.02 * step
            };
            if (log.q[row][j] - d[j]).abs() > band {
                break 'scan;
            }
        }
        settled_from = row;
    }
    let settled = settled_from < rows;
    let settling_time_2pct = if settled {
        log.t[settled_from]
    } else {
        log.duration()
    };

    let zero_crossings = per_joint_zero_crossings(log).iter().sum();

    MetricsSummary {
        mae,
        mae_q,
        overshoot,
        settling_time_2pct,
        settled,
        zero_crossings,
        target_bias,
        tracking_error,
    }
}
