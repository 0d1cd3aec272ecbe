//! Question-by-question summary of a run directory.

use std::path::Path;

use pdelab_core::ann::{MlpModel, TrainReport};
use pdelab_core::costs::{BreakEven, CostLedger};
use pdelab_core::surrogate::{ArchSweepRow, DataCurvePoint, EvalReport};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::artifacts::{read_manifest, RunManifest};
use crate::CliError;

pub const NOT_MEASURED: &str = "not measured";

#[derive(Deserialize)]
struct CostFile {
    ledger: CostLedger,
    break_even: BreakEven,
}

struct Run<'a> {
    dir: &'a Path,
    manifest: RunManifest,
}

impl Run<'_> {
    /// Parses `name` if the manifest lists it.
    fn load<T: DeserializeOwned>(&self, name: &str) -> Result<Option<T>, CliError> {
        if !self.manifest.files.iter().any(|f| f.path == name) {
            return Ok(None);
        }
        let path = self.dir.join(name);
        let text = std::fs::read_to_string(&path).map_err(|e| {
            CliError::MissingInput(format!("{} is listed but unreadable: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| CliError::Config(format!("malformed {}: {e}", path.display())))
    }
}

fn sci(v: f64) -> String {
    format!("{v:.3e}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "absent".to_string(), sci)
}

fn arch_label(sizes: &[usize], transfers: &[String]) -> String {
    let sizes: Vec<String> = sizes.iter().map(usize::to_string).collect();
    format!("{} ({})", sizes.join("-"), transfers.join(","))
}

fn q1(m: &RunManifest) -> String {
    let d = &m.machine;
    let mut parts = vec![
        format!("{}/{}", d.os, d.arch),
        format!("{} logical CPUs", d.logical_cpus),
    ];
    if let Some(cpu) = &d.cpu_model {
        parts.push(cpu.clone());
    }
    if let Some(kib) = d.total_memory_kib {
        parts.push(format!("{:.1} GiB RAM", kib as f64 / (1024.0 * 1024.0)));
    }
    parts.push(format!("{} worker threads", d.worker_threads));
    parts.join(", ")
}

/// Renders the report for the run in `dir`.
pub fn render(dir: &Path) -> Result<String, CliError> {
    let run = Run {
        dir,
        manifest: read_manifest(dir)?,
    };
    let m = &run.manifest;
    let eval: Option<EvalReport> = run.load("eval_report.json")?;
    let train: Option<TrainReport> = run.load("train_report.json")?;
    let model: Option<MlpModel> = run.load("model.json")?;
    let cost: Option<CostFile> = run.load("cost_ledger.json")?;
    let sweep: Option<Vec<ArchSweepRow>> = run.load("arch_sweep.json")?;
    let curve: Option<Vec<DataCurvePoint>> = run.load("data_curve.json")?;

    let t_dg = cost.as_ref().map(|c| c.ledger.t_dg);
    let t_nt = cost
        .as_ref()
        .map(|c| c.ledger.t_nt)
        .or(train.as_ref().map(|t| t.wall_time_secs));

    let q2 = match (t_dg, &m.config["space"]["n_samples"]) {
        (Some(t), n) if n.is_u64() => format!("T_dg = {} s for {n} solver runs", sci(t)),
        (Some(t), _) => format!("T_dg = {} s", sci(t)),
        (None, _) => NOT_MEASURED.to_string(),
    };
    let q3 = t_nt.map_or_else(
        || NOT_MEASURED.to_string(),
        |t| format!("T_nt = {} s", sci(t)),
    );

    let q4 = match &model {
        Some(model) => {
            let transfers: Vec<String> = model
                .layers()
                .iter()
                .map(|l| l.transfer.as_str().to_string())
                .collect();
            let mut s = format!(
                "{}, {} parameters",
                arch_label(&model.layer_sizes(), &transfers),
                model.n_params()
            );
            if let Some(rows) = &sweep {
                let entries: Vec<String> = rows
                    .iter()
                    .map(|r| {
                        let t: Vec<String> =
                            r.transfers.iter().map(|t| t.as_str().to_string()).collect();
                        format!(
                            "{} test {} ({})",
                            arch_label(&r.layer_sizes, &t),
                            opt(r.rmse_test),
                            r.stop_reason.as_str()
                        )
                    })
                    .collect();
                s.push_str(&format!("; sweep: {}", entries.join("; ")));
            }
            s
        }
        None => NOT_MEASURED.to_string(),
    };

    let q5 = match &eval {
        Some(e) => {
            let mut s = format!(
                "RMSE train {}, val {}, test {}",
                opt(e.rmse_train),
                opt(e.rmse_val),
                opt(e.rmse_test)
            );
            if let (Some(tr), Some(va)) = (e.rmse_train, e.rmse_val) {
                s.push_str(&format!(", gap val-train {}", sci(va - tr)));
                if tr > 0.0 {
                    s.push_str(&format!(", ratio {:.3}", va / tr));
                }
            }
            s
        }
        None => NOT_MEASURED.to_string(),
    };

    let q6 = match (&m.config["train"], &train) {
        (cfg, Some(t)) if cfg.is_object() => format!(
            "alpha = {}, tolerance = {}, max epochs = {}, ran {} epoch(s), stop: {}",
            cfg["learning_rate"],
            cfg["stop_tolerance"],
            cfg["max_epochs"],
            t.epochs_run,
            t.stop_reason.as_str()
        ),
        _ => NOT_MEASURED.to_string(),
    };

    let q7 = match &curve {
        Some(points) if !points.is_empty() => {
            let entries: Vec<String> = points
                .iter()
                .map(|p| format!("n={}: {}", p.n_samples, sci(p.mean_rmse)))
                .collect();
            format!(
                "mean held-out RMSE {} (data_curve.json)",
                entries.join(", ")
            )
        }
        _ => NOT_MEASURED.to_string(),
    };

    let q8 = match &eval {
        Some(e) if !e.extrapolation_curve.is_empty() => {
            let entries: Vec<String> = e
                .extrapolation_curve
                .iter()
                .map(|p| format!("x{}: {}", p.multiplier, sci(p.rmse)))
                .collect();
            format!("extrapolation RMSE {}", entries.join(", "))
        }
        _ => NOT_MEASURED.to_string(),
    };

    let q9 = match &eval {
        Some(e) => format!(
            "grid refinement to {} nodes: RMSE {} (grid transfer only)",
            e.fine_grid_nodes,
            sci(e.discretization_transfer)
        ),
        None => NOT_MEASURED.to_string(),
    };

    let q10 = match &eval {
        Some(e) if !e.sensitivity_table.is_empty() => {
            let entries: Vec<String> = e
                .sensitivity_table
                .iter()
                .map(|p| format!("delta {}: {}", p.perturbation, sci(p.max_output_deviation)))
                .collect();
            format!(
                "max output deviation {} on {} samples; boundary violation {}",
                entries.join(", "),
                e.probe_split,
                sci(e.boundary_violation)
            )
        }
        _ => NOT_MEASURED.to_string(),
    };

    let be = match &cost {
        Some(c) => format!(
            "N = {} (T_pr = {} s, T_solve = {} s)",
            c.break_even,
            sci(c.ledger.t_pr),
            sci(c.ledger.t_solve)
        ),
        None => NOT_MEASURED.to_string(),
    };

    let rows = [
        ("Q1", "computational resources", q1(m)),
        ("Q2", "data generation time", q2),
        ("Q3", "network training time", q3),
        ("Q4", "network architecture", q4),
        ("Q5", "over/under-fitting", q5),
        ("Q6", "training hyperparameters", q6),
        ("Q7", "data needed for accuracy", q7),
        ("Q8", "extrapolation", q8),
        ("Q9", "discretization transfer", q9),
        ("Q10", "input sensitivity", q10),
        ("BE", "break-even predictions", be),
    ];
    let mut out = format!("run: {} ({} {})\n", m.command, m.tool, m.version);
    for (id, topic, answer) in rows {
        out.push_str(&format!("{id:<4}| {topic:<26}| {answer}\n"));
    }
    Ok(out)
}
