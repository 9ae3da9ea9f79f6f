//! Experiment file format and its resolution into runnable episodes.
//!
//! An experiment is a TOML file with `[plant]`, `[controller]`, and
//! `[episode]` sections plus optional `[noise]`, `[learning]`, `[[payloads]]`,
//! and `[sweep]`. Any field documented as scalar-or-vector accepts a single
//! number (uniform across joints) or an explicit per-joint array; both
//! spellings normalise to the same resolved form, so they produce the same
//! config hash. The `configs/` directory ships one annotated file per
//! experiment family.

use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use aic::{AicConfig, AicError, GainSet, LearningSwitches};
use baselines::PidGains;
use gm_core::{GeneralizedBelief, GmError, PrecisionMatrix, PrecisionSet, TemporalScale};
use plants::{MsdParams, NoiseSpec, PlantState, SurrogateArmParams, TwoLinkParams, ARM_JOINTS};
use sim_engine::{AicEpisodeSetup, ControllerSpec, EpisodeConfig, PlantModel};

/// Everything the CLI can fail on, keyed to process exit codes: missing
/// input 1, schema violation 2, divergence 3. Output I/O failures share
/// code 1 with missing inputs (both are file-system problems).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Missing {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Diverged(String),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Missing { .. } | CliError::Io(_) => 1,
            CliError::Schema(_) => 2,
            CliError::Diverged(_) => 3,
        }
    }

    /// Stable machine-readable class for stderr diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Missing { .. } => "missing-input",
            CliError::Schema(_) => "config-schema",
            CliError::Diverged(_) => "divergence",
            CliError::Io(_) => "io",
        }
    }
}

fn schema(err: impl std::fmt::Display) -> CliError {
    CliError::Schema(err.to_string())
}

/// A scalar (uniform across joints) or an explicit per-joint vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Num {
    fn expand(&self, n: usize, field: &str) -> Result<DVector<f64>, CliError> {
        match self {
            Num::Scalar(v) => Ok(DVector::from_element(n, *v)),
            Num::Vector(v) if v.len() == n => Ok(DVector::from_vec(v.clone())),
            Num::Vector(v) => Err(CliError::Schema(format!(
                "{field}: expected {n} entries, got {}",
                v.len()
            ))),
        }
    }

    fn normalised(&self, n: usize, field: &str) -> Result<Num, CliError> {
        Ok(Num::Vector(self.expand(n, field)?.iter().copied().collect()))
    }

    fn len_hint(&self) -> Option<usize> {
        match self {
            Num::Scalar(_) => None,
            Num::Vector(v) => Some(v.len()),
        }
    }
}

fn num_zero() -> Num {
    Num::Scalar(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlantKind {
    Msd,
    SurrogateArm,
    TwoLink,
}

/// Plant selection. `k1`, `k2`, and `mass` apply to `msd` only; the surrogate
/// arm and two-link plants use their built-in parameter sets. For `msd` the
/// dimension follows the length of `q0` (scalar means one dimension).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    pub kind: PlantKind,
    #[serde(default = "default_k1")]
    pub k1: f64,
    #[serde(default = "default_k2")]
    pub k2: f64,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default = "num_zero")]
    pub q0: Num,
    #[serde(default = "num_zero")]
    pub qd0: Num,
}

fn default_k1() -> f64 {
    1.0
}
fn default_k2() -> f64 {
    0.1
}
fn default_mass() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    Aic,
    Pid,
    Filter,
}

/// Controller selection and parameters. The `aic` and `filter` kinds read the
/// gain and precision fields; `pid` reads `p`, `i`, `d`. `beta_floor`
/// defaults to min(0.5, smallest beta0 entry) so sweeps below 0.5 work
/// without extra ceremony; `beta_min` applies to the `filter` kind only.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSection {
    pub kind: ControllerKind,
    #[serde(default = "default_kappa_mu")]
    pub kappa_mu: f64,
    #[serde(default)]
    pub kappa_a: f64,
    #[serde(default)]
    pub kappa_sigma: f64,
    #[serde(default)]
    pub kappa_tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_limit: Option<f64>,
    #[serde(default = "default_precision_floor")]
    pub precision_floor: f64,
    #[serde(default = "default_pi_o")]
    pub pi_o: Num,
    #[serde(default = "default_pi_op")]
    pub pi_op: Num,
    #[serde(default = "default_pi_mu")]
    pub pi_mu: Num,
    #[serde(default = "default_pi_mup")]
    pub pi_mup: Num,
    #[serde(default = "default_beta0")]
    pub beta0: Num,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_floor: Option<f64>,
    #[serde(default = "num_zero")]
    pub mu0: Num,
    #[serde(default = "num_zero")]
    pub mup0: Num,
    #[serde(default = "num_zero")]
    pub mupp0: Num,
    #[serde(default = "num_zero")]
    pub a0: Num,
    #[serde(default = "default_beta_min")]
    pub beta_min: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Num>,
}

fn default_kappa_mu() -> f64 {
    20.0
}
fn default_precision_floor() -> f64 {
    0.01
}
fn default_pi_o() -> Num {
    Num::Scalar(1.5)
}
fn default_pi_op() -> Num {
    Num::Scalar(0.5)
}
fn default_pi_mu() -> Num {
    Num::Scalar(0.1)
}
fn default_pi_mup() -> Num {
    Num::Scalar(0.5)
}
fn default_beta0() -> Num {
    Num::Scalar(1.0)
}
fn default_beta_min() -> f64 {
    1e-6
}

/// One target waypoint: joints move toward `value` from time `t` on.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetEntry {
    pub t: f64,
    pub value: Num,
}

/// Timing and targets. Give either a single `target` or a `targets` waypoint
/// list; the single form normalises to a one-entry list at t = 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpisodeSection {
    pub dt: f64,
    pub duration: f64,
    #[serde(default = "default_control_every")]
    pub control_every: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Num>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<TargetEntry>,
}

fn default_control_every() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default = "default_sigma_pos")]
    pub sigma_pos: f64,
    #[serde(default = "default_sigma_vel")]
    pub sigma_vel: f64,
}

fn default_sigma_pos() -> f64 {
    1e-3
}
fn default_sigma_vel() -> f64 {
    1e-2
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection {
            sigma_pos: default_sigma_pos(),
            sigma_vel: default_sigma_vel(),
        }
    }
}

/// Which hyperparameters the controller adapts online.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningSection {
    #[serde(default)]
    pub pi_o: bool,
    #[serde(default)]
    pub pi_op: bool,
    #[serde(default)]
    pub beta: bool,
}

impl LearningSection {
    pub fn switches(&self) -> LearningSwitches {
        LearningSwitches {
            learn_pi_o: self.pi_o,
            learn_pi_op: self.pi_op,
            learn_beta: self.beta,
        }
    }

    fn any(&self) -> bool {
        self.pi_o || self.pi_op || self.beta
    }
}

/// One payload attachment: `mass` kg hang from the arm from time `t` on.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayloadEntry {
    pub t: f64,
    pub mass: f64,
}

/// Grid specification: rerun the base experiment with `axis` set to each
/// value. With `paired = true` every value runs twice, all learning off and
/// all learning on, sharing the episode seed so the comparison sees the same
/// noise stream.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: String,
    pub values: Vec<f64>,
    #[serde(default)]
    pub paired: bool,
}

/// Axis names `with_axis` understands.
pub const SWEEP_AXES: &[&str] = &[
    "controller.pi_o",
    "controller.pi_op",
    "controller.pi_mu",
    "controller.pi_mup",
    "controller.beta0",
    "controller.kappa_a",
    "controller.kappa_mu",
    "payload.mass",
];

/// The on-disk schema, exactly as parsed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    #[serde(default)]
    pub seed: u64,
    pub plant: PlantSection,
    pub controller: ControllerSection,
    pub episode: EpisodeSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub learning: LearningSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub payloads: Vec<PayloadEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

/// A validated experiment whose scalar-or-vector fields are expanded to the
/// plant's dimension. `normal_form` serialises this resolved file, so two
/// files that mean the same thing hash identically.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub file: ExperimentFile,
    pub dof: usize,
}

pub fn load_experiment(path: &Path) -> Result<Experiment, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Missing {
        path: path.to_path_buf(),
        source,
    })?;
    parse_experiment(&text)
}

pub fn parse_experiment(text: &str) -> Result<Experiment, CliError> {
    let file: ExperimentFile = toml::from_str(text).map_err(schema)?;
    Experiment::resolve(file)
}

impl Experiment {
    pub fn resolve(mut file: ExperimentFile) -> Result<Self, CliError> {
        let dof = match file.plant.kind {
            PlantKind::Msd => file.plant.q0.len_hint().unwrap_or(1),
            PlantKind::SurrogateArm => ARM_JOINTS,
            PlantKind::TwoLink => 2,
        };
        if dof == 0 {
            return Err(CliError::Schema("plant.q0 must not be empty".into()));
        }

        file.plant.q0 = file.plant.q0.normalised(dof, "plant.q0")?;
        file.plant.qd0 = file.plant.qd0.normalised(dof, "plant.qd0")?;

        let c = &mut file.controller;
        for (field, name) in [
            (&mut c.pi_o, "controller.pi_o"),
            (&mut c.pi_op, "controller.pi_op"),
            (&mut c.pi_mu, "controller.pi_mu"),
            (&mut c.pi_mup, "controller.pi_mup"),
            (&mut c.beta0, "controller.beta0"),
            (&mut c.mu0, "controller.mu0"),
            (&mut c.mup0, "controller.mup0"),
            (&mut c.mupp0, "controller.mupp0"),
            (&mut c.a0, "controller.a0"),
        ] {
            *field = field.normalised(dof, name)?;
        }
        if c.kind == ControllerKind::Pid {
            let p = c
                .p
                .as_ref()
                .ok_or_else(|| CliError::Schema("pid controller requires p".into()))?;
            c.p = Some(p.normalised(dof, "controller.p")?);
            let zero = num_zero();
            c.i = Some(c.i.as_ref().unwrap_or(&zero).normalised(dof, "controller.i")?);
            c.d = Some(c.d.as_ref().unwrap_or(&zero).normalised(dof, "controller.d")?);
        } else if c.p.is_some() || c.i.is_some() || c.d.is_some() {
            return Err(CliError::Schema(
                "p/i/d gains only apply to the pid controller kind".into(),
            ));
        }

        match (file.episode.target.take(), file.episode.targets.is_empty()) {
            (Some(single), true) => {
                file.episode.targets = vec![TargetEntry {
                    t: 0.0,
                    value: single,
                }];
            }
            (None, false) => {}
            (Some(_), false) => {
                return Err(CliError::Schema(
                    "give either episode.target or episode.targets, not both".into(),
                ));
            }
            (None, true) => {
                return Err(CliError::Schema(
                    "episode needs a target or a targets list".into(),
                ));
            }
        }
        for entry in &mut file.episode.targets {
            entry.value = entry.value.normalised(dof, "episode.targets.value")?;
        }

        if !file.payloads.is_empty() && file.plant.kind != PlantKind::SurrogateArm {
            return Err(CliError::Schema(
                "payload schedules only apply to the surrogate_arm plant".into(),
            ));
        }

        if let Some(sweep) = &file.sweep {
            if sweep.values.is_empty() {
                return Err(CliError::Schema("sweep.values must not be empty".into()));
            }
            if !SWEEP_AXES.contains(&sweep.axis.as_str()) {
                return Err(CliError::Schema(format!(
                    "unknown sweep axis {:?}; known axes: {}",
                    sweep.axis,
                    SWEEP_AXES.join(", ")
                )));
            }
            if sweep.axis == "payload.mass" && file.plant.kind != PlantKind::SurrogateArm {
                return Err(CliError::Schema(
                    "payload.mass sweeps need the surrogate_arm plant".into(),
                ));
            }
        }

        let exp = Experiment { file, dof };
        exp.episode_config(0)?;
        Ok(exp)
    }

    /// Canonical serialisation of the resolved file. Two configs that parse
    /// to the same settings produce byte-identical normal forms.
    pub fn normal_form(&self) -> String {
        toml::to_string(&self.file).expect("resolved experiment serialises")
    }

    /// SHA-256 of the normal form, hex-encoded.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.normal_form().as_bytes());
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    /// A copy with the sweep axis set to `value`.
    pub fn with_axis(&self, axis: &str, value: f64) -> Result<Experiment, CliError> {
        let mut file = self.file.clone();
        match axis {
            "controller.pi_o" => file.controller.pi_o = Num::Scalar(value),
            "controller.pi_op" => file.controller.pi_op = Num::Scalar(value),
            "controller.pi_mu" => file.controller.pi_mu = Num::Scalar(value),
            "controller.pi_mup" => file.controller.pi_mup = Num::Scalar(value),
            "controller.beta0" => file.controller.beta0 = Num::Scalar(value),
            "controller.kappa_a" => file.controller.kappa_a = value,
            "controller.kappa_mu" => file.controller.kappa_mu = value,
            "payload.mass" => {
                file.payloads = vec![PayloadEntry {
                    t: 0.0,
                    mass: value,
                }]
            }
            other => {
                return Err(CliError::Schema(format!("unknown sweep axis {other:?}")));
            }
        }
        Experiment::resolve(file)
    }

    /// A copy with every learning switch forced on or off.
    pub fn with_learning(&self, on: bool) -> Result<Experiment, CliError> {
        let mut file = self.file.clone();
        file.learning = LearningSection {
            pi_o: on,
            pi_op: on,
            beta: on,
        };
        Experiment::resolve(file)
    }

    pub fn learning_label(&self) -> &'static str {
        if self.file.learning.any() {
            "on"
        } else {
            "off"
        }
    }

    /// Build the runnable episode. `seed` feeds the sensor noise stream and
    /// comes from the per-episode derivation, not the raw file.
    pub fn episode_config(&self, seed: u64) -> Result<EpisodeConfig, CliError> {
        let n = self.dof;
        let plant = match self.file.plant.kind {
            PlantKind::Msd => PlantModel::Msd(MsdParams {
                k1: self.file.plant.k1,
                k2: self.file.plant.k2,
                mass: self.file.plant.mass,
            }),
            PlantKind::SurrogateArm => PlantModel::SurrogateArm(SurrogateArmParams::default()),
            PlantKind::TwoLink => PlantModel::TwoLink(TwoLinkParams::default()),
        };
        let initial_state = PlantState::new(
            self.file.plant.q0.expand(n, "plant.q0")?,
            self.file.plant.qd0.expand(n, "plant.qd0")?,
        );

        let c = &self.file.controller;
        let controller = match c.kind {
            ControllerKind::Aic => ControllerSpec::Aic(self.aic_setup()?),
            ControllerKind::Filter => ControllerSpec::Filter {
                setup: self.aic_setup()?,
                beta_min: c.beta_min,
            },
            ControllerKind::Pid => {
                let expand = |field: &Option<Num>, name| {
                    field
                        .as_ref()
                        .expect("resolve fills pid gains")
                        .expand(n, name)
                };
                ControllerSpec::Pid {
                    gains: PidGains {
                        p: expand(&c.p, "controller.p")?,
                        i: expand(&c.i, "controller.i")?,
                        d: expand(&c.d, "controller.d")?,
                    },
                }
            }
        };

        let targets = self
            .file
            .episode
            .targets
            .iter()
            .map(|entry| {
                Ok((
                    entry.t,
                    entry.value.expand(n, "episode.targets.value")?,
                ))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let payloads = self
            .file
            .payloads
            .iter()
            .map(|entry| (entry.t, entry.mass))
            .collect();

        Ok(EpisodeConfig {
            plant,
            initial_state,
            controller,
            targets,
            payloads,
            dt: self.file.episode.dt,
            duration: self.file.episode.duration,
            noise: NoiseSpec {
                sigma_pos: self.file.noise.sigma_pos,
                sigma_vel: self.file.noise.sigma_vel,
                seed,
            },
            switches: self.file.learning.switches(),
            control_every: self.file.episode.control_every,
        })
    }

    fn aic_setup(&self) -> Result<AicEpisodeSetup, CliError> {
        let n = self.dof;
        let c = &self.file.controller;
        let gains = GainSet::new(c.kappa_mu, c.kappa_a, c.kappa_sigma, c.kappa_tau)
            .map_err(aic_schema)?;
        let config =
            AicConfig::new(gains, c.action_limit, c.precision_floor).map_err(aic_schema)?;
        let precisions = PrecisionSet::new(
            PrecisionMatrix::diagonal(c.pi_o.expand(n, "controller.pi_o")?),
            PrecisionMatrix::diagonal(c.pi_op.expand(n, "controller.pi_op")?),
            PrecisionMatrix::diagonal(c.pi_mu.expand(n, "controller.pi_mu")?),
            PrecisionMatrix::diagonal(c.pi_mup.expand(n, "controller.pi_mup")?),
        )
        .map_err(gm_schema)?;
        let beta0 = c.beta0.expand(n, "controller.beta0")?;
        let floor = c
            .beta_floor
            .unwrap_or_else(|| beta0.min().min(0.5));
        let beta = TemporalScale::new(beta0, floor).map_err(gm_schema)?;
        let initial_belief = GeneralizedBelief::new(
            c.mu0.expand(n, "controller.mu0")?,
            c.mup0.expand(n, "controller.mup0")?,
            c.mupp0.expand(n, "controller.mupp0")?,
        )
        .map_err(gm_schema)?;
        Ok(AicEpisodeSetup {
            config,
            initial_belief,
            precisions,
            beta,
            initial_action: c.a0.expand(n, "controller.a0")?,
        })
    }
}

fn aic_schema(err: AicError) -> CliError {
    CliError::Schema(err.to_string())
}

fn gm_schema(err: GmError) -> CliError {
    CliError::Schema(err.to_string())
}

/// SplitMix64, the per-episode seed derivation: episode `i` of a run uses
/// `splitmix64(base_seed + i)`. Counter-based, so any episode can be
/// re-derived in isolation.
pub fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn episode_seed(base: u64, index: usize) -> u64 {
    splitmix64(base.wrapping_add(index as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MSD_MINIMAL: &str = r#"
seed = 3
[plant]
kind = "msd"
q0 = -0.5
qd0 = -1.0
[controller]
kind = "aic"
kappa_a = 600.0
[episode]
dt = 0.001
duration = 0.5
target = 0.0
"#;

    #[test]
    fn scalar_and_vector_spellings_hash_equal() {
        let a = parse_experiment(MSD_MINIMAL).unwrap();
        let b = parse_experiment(&MSD_MINIMAL.replace("q0 = -0.5", "q0 = [-0.5]")).unwrap();
        assert_eq!(a.config_hash(), b.config_hash());
        let c = parse_experiment(
            &MSD_MINIMAL.replace("target = 0.0", "targets = [{ t = 0.0, value = 0.0 }]"),
        )
        .unwrap();
        assert_eq!(a.config_hash(), c.config_hash());
    }

    #[test]
    fn comments_and_ordering_do_not_change_the_hash() {
        let reordered = r#"
# same experiment, different spelling
seed = 3
[plant]
qd0 = -1.0
q0 = -0.5
kind = "msd"
[episode]
duration = 0.5
dt = 0.001
target = 0.0
[controller]
kappa_a = 600.0
kind = "aic"
"#;
        let a = parse_experiment(MSD_MINIMAL).unwrap();
        let b = parse_experiment(reordered).unwrap();
        assert_eq!(a.config_hash(), b.config_hash());
    }

    #[test]
    fn unknown_keys_are_schema_errors() {
        let text = MSD_MINIMAL.replace("kappa_a = 600.0", "kappa_q = 600.0");
        match parse_experiment(&text) {
            Err(CliError::Schema(_)) => {}
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_vector_length_is_a_schema_error() {
        let text = MSD_MINIMAL.replace("q0 = -0.5", "q0 = [-0.5, 0.3]")
            // qd0 stays scalar, so the mismatch is pi_o against dof 2: make
            // the controller side the odd one out instead.
            .replace("kappa_a = 600.0", "kappa_a = 600.0\npi_o = [1.5, 1.5, 1.5]");
        match parse_experiment(&text) {
            Err(CliError::Schema(msg)) => assert!(msg.contains("pi_o"), "{msg}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn axis_patch_round_trips_through_resolution() {
        let exp = parse_experiment(MSD_MINIMAL).unwrap();
        let patched = exp.with_axis("controller.beta0", 4.0).unwrap();
        assert_eq!(patched.file.controller.beta0, Num::Vector(vec![4.0]));
        assert!(exp.with_axis("controller.bogus", 1.0).is_err());
    }

    #[test]
    fn pid_requires_p_and_rejects_gains_on_aic() {
        let pid = MSD_MINIMAL.replace("kind = \"aic\"", "kind = \"pid\"");
        assert!(matches!(parse_experiment(&pid), Err(CliError::Schema(_))));
        let with_p = pid.replace("kappa_a = 600.0", "p = 20.0\ni = 60.0");
        parse_experiment(&with_p).unwrap();
        let aic_with_p = MSD_MINIMAL.replace("kappa_a = 600.0", "p = 20.0");
        assert!(matches!(
            parse_experiment(&aic_with_p),
            Err(CliError::Schema(_))
        ));
    }

    #[test]
    fn seed_derivation_is_counter_based() {
        assert_eq!(episode_seed(7, 0), splitmix64(7));
        assert_eq!(episode_seed(7, 3), splitmix64(10));
        assert_ne!(episode_seed(7, 0), episode_seed(7, 1));
    }
}
