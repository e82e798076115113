//! End-to-end tests of the command-line surface: subcommands, exit codes,
//! output files, and the residual recomputation.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cdeuler")
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn cdeuler")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn small_config(out_dir: &Path, sigma: f64) -> String {
    format!(
        r#"
[constants]
gamma = 1.4
rho0_plus = 0.8
rho0_minus = 1.0
u0_plus = 0.05
u0_minus = 0.5
p0 = 1.0

[entrance]
kind = "preset"
sigma = {sigma}

[solver]
n_x = 16
n_s = 16
length = 10.0

[output]
dir = "{}"
"#,
        out_dir.display()
    )
}

#[test]
fn check_accepts_shipped_configs() {
    for name in ["example.toml", "background.toml"] {
        let out = run(&["check", "--config", repo_config(name).to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {:?}", out);
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.contains("ok: configuration is valid"), "{stdout}");
    }
}

#[test]
fn solve_background_produces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let config = write_config(tmp.path(), &small_config(&out_dir, 0.0));
    let out = run(&["solve", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    for name in [
        "interface.txt",
        "fields_plus.txt",
        "fields_minus.txt",
        "summary.txt",
        "effective_config.toml",
    ] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
    // Background interface is identically 1/2.
    let text = std::fs::read_to_string(out_dir.join("interface.txt")).unwrap();
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let f: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert_eq!(f, 0.5);
    }
    // Field files carry one row per node.
    let rows = std::fs::read_to_string(out_dir.join("fields_minus.txt"))
        .unwrap()
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .count();
    assert_eq!(rows, 17 * 17);
}

#[test]
fn residuals_reproduce_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let config = write_config(tmp.path(), &small_config(&out_dir, 1e-3));
    assert!(run(&["solve", "--config", config.to_str().unwrap()]).status.success());

    let out = run(&[
        "residuals",
        "--config",
        config.to_str().unwrap(),
        "--dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);

    // Every recomputed entry agrees with the stored summary to 1e-12.
    let mut stored = std::collections::BTreeMap::new();
    let summary = std::fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    for line in summary.lines() {
        if let Some((k, v)) = line.split_once('=') {
            if let Ok(v) = v.trim().parse::<f64>() {
                stored.insert(k.trim().to_string(), v);
            }
        }
    }
    let mut checked = 0;
    for line in stdout.lines() {
        if let Some((k, v)) = line.split_once('=') {
            let k = k.trim();
            let v: f64 = v.trim().parse().unwrap();
            if let Some(sv) = stored.get(k) {
                assert!(
                    (sv - v).abs() <= 1e-12 * v.abs().max(1.0),
                    "{k}: stored {sv:e} vs recomputed {v:e}"
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 20, "only {checked} keys compared");
}

#[test]
fn identical_configs_give_bit_identical_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    let config = write_config(tmp.path(), &small_config(&out_a, 1e-3));
    assert!(run(&["solve", "--config", config.to_str().unwrap()]).status.success());
    assert!(run(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap()
    ])
    .status
    .success());
    for name in ["interface.txt", "fields_plus.txt", "fields_minus.txt", "summary.txt"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
}

#[test]
fn exit_code_2_on_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    // Supersonic background violates the constants invariants.
    let body = small_config(&tmp.path().join("out"), 0.0).replace("u0_minus = 0.5", "u0_minus = 5.0");
    let config = write_config(tmp.path(), &body);
    let out = run(&["check", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn exit_code_3_on_divergence() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let mut body = small_config(&out_dir, 1e-3);
    body = body.replace("length = 10.0", "length = 10.0\nmax_outer = 1\ntol_outer = 1e-30");
    let config = write_config(tmp.path(), &body);
    let out = run(&["solve", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn exit_code_4_on_missing_config() {
    let out = run(&["solve", "--config", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");
}

#[test]
fn sweep_sigma_reports_ratios_near_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let mut body = small_config(&out_dir, 1e-3);
    body = body.replace("length = 10.0", "length = 10.0\nsigmas = [5e-4, 1e-3]");
    let config = write_config(tmp.path(), &body);
    let out = run(&["sweep-sigma", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(out_dir.join("sigma_sweep.txt")).unwrap();
    let mut ratio_count = 0;
    for line in text.lines() {
        if line.starts_with("ratio_") {
            let v: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
            assert!((1.6..=2.4).contains(&v), "ratio line {line}");
            ratio_count += 1;
        }
    }
    assert!(ratio_count >= 9, "expected a full ratio table");
}

#[test]
fn sweep_length_writes_agreement_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let mut body = small_config(&out_dir, 1e-3);
    body = body.replace("length = 10.0", "length = 10.0\nlengths = [10.0, 15.0]");
    let config = write_config(tmp.path(), &body);
    let out = run(&["sweep-length", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{out:?}");
    assert!(out_dir.join("length_sweep.txt").exists());
    assert!(out_dir.join("L_10/summary.txt").exists());
    assert!(out_dir.join("L_15/summary.txt").exists());
    let text = std::fs::read_to_string(out_dir.join("length_sweep.txt")).unwrap();
    for line in text.lines() {
        if line.starts_with("discrepancy_") {
            let v: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
            assert!(v <= 1e-3, "window agreement violated: {line}");
        }
    }
}
