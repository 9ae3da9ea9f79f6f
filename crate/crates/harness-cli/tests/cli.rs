//! End-to-end checks of the `aic-lab` binary: exit codes, output layout,
//! manifest bookkeeping, and the seed plumbing that keeps reruns and sweeps
//! reproducible.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use harness_cli::Manifest;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aic-lab"))
}

fn write_cfg(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn read_manifest(out: &Path) -> Manifest {
    let raw = fs::read_to_string(out.join("manifest.json")).unwrap();
    serde_json::from_str(&raw).unwrap()
}

const MSD_BASE: &str = r#"
seed = 5
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
fn missing_config_exits_1() {
    let output = bin().args(["run", "/nonexistent/experiment.cfg"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(
        stderr_of(&output).contains("missing-input"),
        "stderr: {}",
        stderr_of(&output)
    );
}

#[test]
fn schema_errors_exit_2_and_write_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");

    // Unknown key.
    let cfg = write_cfg(
        tmp.path(),
        "typo.cfg",
        &MSD_BASE.replace("kappa_a", "kappa_action"),
    );
    let output = bin().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("config-schema"));
    assert!(!out.exists(), "schema error must not create the out dir");

    // Malformed TOML.
    let cfg = write_cfg(tmp.path(), "broken.cfg", "[plant\nkind = msd");
    let output = bin().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists());

    // PID without a proportional gain.
    let cfg = write_cfg(
        tmp.path(),
        "pidless.cfg",
        &MSD_BASE.replace("kind = \"aic\"", "kind = \"pid\""),
    );
    let output = bin().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn divergent_single_run_exits_3_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_cfg(
        tmp.path(),
        "runaway.cfg",
        &MSD_BASE.replace("kind = \"aic\"", "kind = \"aic\"\nkappa_mu = 1.0e12"),
    );
    let output = bin().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr_of(&output).contains("divergence"));
    assert!(!out.exists(), "divergent run must not leave output files");
}

#[test]
fn sweep_records_divergence_and_exits_0() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_cfg(
        tmp.path(),
        "mixed.cfg",
        &format!(
            "{MSD_BASE}\n[sweep]\naxis = \"controller.kappa_mu\"\nvalues = [20.0, 1.0e12]\n"
        ),
    );
    let output = bin().arg("sweep").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr_of(&output));

    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let rows: Vec<&str> = summary.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("20,") && rows[1].ends_with(",ok"));
    assert!(rows[2].starts_with("1000000000000,") && rows[2].ends_with(",diverged"));
    assert!(
        rows[2].contains(",,,,,"),
        "diverged row must leave the metric cells empty: {}",
        rows[2]
    );

    // The partial trajectory up to the blow-up is still kept for inspection.
    assert!(out.join("ep001/trajectory.csv").exists());
    assert!(!out.join("ep001/metrics.json").exists());

    let manifest = read_manifest(&out);
    assert_eq!(manifest.episodes[1].status, "diverged");
    assert!(manifest.episodes[1].metrics.is_none());
}

#[test]
fn gradcheck_passes_and_canary_trips() {
    let output = bin().arg("gradcheck").output().unwrap();
    assert_eq!(
        output.status.code(),
        Some(0),
        "stderr: {}",
        stderr_of(&output)
    );
    let output = bin().args(["gradcheck", "--canary"]).output().unwrap();
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn single_value_sweep_matches_plain_run() {
    let tmp = tempfile::tempdir().unwrap();
    let run_out = tmp.path().join("run");
    let sweep_out = tmp.path().join("sweep");

    let plain = write_cfg(tmp.path(), "plain.cfg", MSD_BASE);
    let output = bin().arg("run").arg(&plain).arg("--out").arg(&run_out).output().unwrap();
    assert_eq!(output.status.code(), Some(0));

    let swept = write_cfg(
        tmp.path(),
        "swept.cfg",
        &format!("{MSD_BASE}\n[sweep]\naxis = \"controller.kappa_a\"\nvalues = [600.0]\n"),
    );
    let output = bin().arg("sweep").arg(&swept).arg("--out").arg(&sweep_out).output().unwrap();
    assert_eq!(output.status.code(), Some(0));

    assert_eq!(
        fs::read(run_out.join("trajectory.csv")).unwrap(),
        fs::read(sweep_out.join("ep000/trajectory.csv")).unwrap(),
        "a one-value sweep must reproduce the plain run bit for bit"
    );
    assert_eq!(
        fs::read(run_out.join("metrics.json")).unwrap(),
        fs::read(sweep_out.join("ep000/metrics.json")).unwrap()
    );
}

#[test]
fn config_hash_ignores_spelling_through_the_cli() {
    let tmp = tempfile::tempdir().unwrap();
    let scalar = write_cfg(tmp.path(), "scalar.cfg", MSD_BASE);
    let vector = write_cfg(
        tmp.path(),
        "vector.cfg",
        &MSD_BASE.replace("q0 = -0.5", "q0 = [-0.5]"),
    );
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    assert!(bin().arg("run").arg(&scalar).arg("--out").arg(&out_a).status().unwrap().success());
    assert!(bin().arg("run").arg(&vector).arg("--out").arg(&out_b).status().unwrap().success());
    assert_eq!(
        read_manifest(&out_a).config_hash,
        read_manifest(&out_b).config_hash
    );
}

fn walk(dir: &Path, root: &Path, found: &mut Vec<String>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            walk(&path, root, found);
        } else {
            found.push(
                path.strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .replace('\\', "/"),
            );
        }
    }
}

#[test]
fn manifest_lists_every_file_and_nothing_else() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_cfg(
        tmp.path(),
        "plots.cfg",
        &format!(
            "{MSD_BASE}\n[sweep]\naxis = \"controller.kappa_a\"\nvalues = [400.0, 600.0]\n"
        ),
    );
    let output = bin()
        .arg("sweep")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .arg("--emit-plots")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(out.join("ep000/trajectory.svg").exists());

    let mut on_disk = Vec::new();
    walk(&out, &out, &mut on_disk);
    on_disk.sort();
    let mut listed = read_manifest(&out).files;
    listed.sort();
    assert_eq!(on_disk, listed);
}

#[test]
fn out_dir_falls_back_to_env_var() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "envtest.cfg", MSD_BASE);
    let status = bin()
        .arg("run")
        .arg(&cfg)
        .env("AIC_LAB_OUT", tmp.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(tmp.path().join("envtest/manifest.json").exists());
}

#[test]
fn seed_override_is_recorded_and_changes_the_noise() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "seeded.cfg", MSD_BASE);
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    assert!(bin().arg("run").arg(&cfg).arg("--out").arg(&out_a).status().unwrap().success());
    assert!(bin()
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_b)
        .args(["--seed-override", "99"])
        .status()
        .unwrap()
        .success());
    assert_eq!(read_manifest(&out_a).seed, 5);
    assert_eq!(read_manifest(&out_b).seed, 99);
    assert_ne!(
        fs::read(out_a.join("trajectory.csv")).unwrap(),
        fs::read(out_b.join("trajectory.csv")).unwrap(),
        "a different base seed must change the sensor noise stream"
    );
}
