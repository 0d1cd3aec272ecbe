#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_pdelab"))
}

pub fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args).env_remove("PDELAB_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("failed to launch pdelab")
}

pub fn write_config(dir: &Path, name: &str, config: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    path
}

/// Runs `sub` on `config` into `out` and returns the process output.
pub fn run_config(sub: &str, dir: &Path, config: &Value, out: &Path) -> Output {
    let cfg = write_config(dir, &format!("{sub}.json"), config);
    run(
        &[
            sub,
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    )
}

pub fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Path to digest for every file not flagged as timing-bearing.
pub fn stable_digests(dir: &Path) -> Vec<(String, String)> {
    let m = manifest(dir);
    let mut out: Vec<(String, String)> = m["files"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|f| !f["contains_timings"].as_bool().unwrap())
        .map(|f| {
            (
                f["path"].as_str().unwrap().to_string(),
                f["sha256"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    out.sort();
    out
}

/// Linear case: `y0 = y1 = 0`, `g` in `[0, 4]`, purelin `3 -> M`.
pub fn linear_surrogate_config(n_samples: usize, sampling: &str) -> Value {
    json!({
        "space": {
            "g_range": [0.0, 4.0],
            "y0_range": [0.0, 0.0],
            "y1_range": [0.0, 0.0],
            "domain": [0.0, 1.0],
            "sampling": sampling,
            "n_samples": n_samples,
            "master_seed": 3,
            "n_nodes": 101
        },
        "arch": {"hidden": [], "output_transfer": "purelin"},
        "train": {
            "learning_rate": 0.005,
            "stop_tolerance": 1e-20,
            "max_epochs": 5000,
            "init_seed": 7,
            "init_scheme": "uniform"
        },
        "eval": {
            "split": {"ratios": {"train": 0.8, "val": 0.1, "test": 0.1}, "seed": 5},
            "extrap_multipliers": [1.0, 1.5, 2.0, 4.0],
            "perturbations": [0.0, 0.01, 0.1],
            "extrap_samples": 32,
            "extrap_seed": 99,
            "repetitions": 5,
            "n_predictions": 1000
        }
    })
}

/// Linear case plus the architecture sweep and the data curve.
pub fn full_surrogate_config() -> Value {
    let mut c = linear_surrogate_config(64, "uniform_random");
    c["eval"]["arch_sweep"] = json!(true);
    c["eval"]["data_curve"] = json!({
        "sample_counts": [4, 8, 16, 32],
        "seeds": [1, 2, 3],
        "holdout_samples": 32,
        "holdout_seed": 77
    });
    c
}

/// Rows of a `report` printout keyed by question id.
pub fn report_rows(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| {
            let mut parts = l.splitn(3, '|');
            let id = parts.next()?.trim();
            let _topic = parts.next()?;
            let answer = parts.next()?.trim();
            Some((id.to_string(), answer.to_string()))
        })
        .collect()
}
