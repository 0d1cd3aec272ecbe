use std::collections::BTreeMap;
use std::hint::black_box;
use std::path::PathBuf;

use pdelab_core::ann::{self, MlpModel, Samples, Transfer};
use pdelab_core::costs::{self, CostLedger, LedgerDraft, MachineDescriptor};
use pdelab_core::pde::{self, SolutionField};
use pdelab_core::regress::{self, LinearModel, RegressionDataset};
use pdelab_core::surrogate::{self, SplitTag, SurrogateDataset};
use serde_json::json;

use crate::artifacts::{Artifacts, Cell, RunManifest, Table};
use crate::config::{ExperimentConfig, Format};
use crate::CliError;

pub struct RunContext {
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub format: Format,
    pub threads: Option<usize>,
}

impl RunContext {
    fn artifacts(&self) -> Result<Artifacts, CliError> {
        Artifacts::create(&self.out, self.format)
    }

    fn worker_threads(&self) -> usize {
        self.threads.unwrap_or_else(rayon::current_num_threads)
    }

    fn manifest(
        &self,
        seeds: BTreeMap<String, u64>,
        timings: BTreeMap<String, f64>,
    ) -> RunManifest {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: self.command.to_string(),
            config: serde_json::to_value(&self.config).unwrap_or(serde_json::Value::Null),
            machine: MachineDescriptor::capture(self.worker_threads()),
            seeds,
            timings,
            files: Vec::new(),
        }
    }
}

fn stage(name: &str, e: pdelab_core::Error) -> CliError {
    CliError::from_core(e).context(&format!("stage `{name}`"))
}

fn field_table(f: &SolutionField) -> Table {
    let mut t = Table::new(&["x", "y", "provenance"]);
    for (&x, &y) in f.nodes.iter().zip(&f.values) {
        t.push(vec![
            Cell::Num(x),
            Cell::Num(y),
            Cell::Text(f.provenance.as_str().into()),
        ]);
    }
    t
}

fn dataset_table(d: &RegressionDataset) -> Table {
    let mut t = Table::new(&["x", "y"]);
    for (&x, &y) in d.inputs().iter().zip(d.targets()) {
        t.push(vec![Cell::Num(x), Cell::Num(y)]);
    }
    t
}

fn loss_table(history: &[f64]) -> Table {
    let mut t = Table::new(&["epoch", "loss"]);
    for (i, &l) in history.iter().enumerate() {
        t.push(vec![Cell::Int(i as u64 + 1), Cell::Num(l)]);
    }
    t
}

pub fn cmd_solve(ctx: &RunContext) -> Result<PathBuf, CliError> {
    let section = ExperimentConfig::require(&ctx.config.problem, "problem")?;
    if section.cases.is_empty() {
        return Err(CliError::Config("`problem.cases` is empty".into()));
    }
    let n = section.n_nodes;
    let mut art = ctx.artifacts()?;
    let problems: Vec<_> = section.cases.iter().map(|c| c.problem()).collect();
    let labels: Vec<String> = section
        .cases
        .iter()
        .enumerate()
        .map(|(i, c)| c.label.clone().unwrap_or_else(|| format!("case{i}")))
        .collect();
    for (i, p) in problems.iter().enumerate() {
        let ctx_err = |e| CliError::from_core(e).context(&format!("problem `{}`", labels[i]));
        p.validate().map_err(ctx_err)?;
        let analytic = pde::solve_analytic(p, n).map_err(ctx_err)?;
        let fdm = pde::solve_fdm(p, n).map_err(ctx_err)?;
        art.write_series(
            &format!("solution_{i:02}_analytic"),
            &field_table(&analytic),
        )?;
        art.write_series(&format!("solution_{i:02}_fdm"), &field_table(&fdm))?;
    }
    let fields = pde::sweep_figure1(&problems, n).map_err(CliError::from_core)?;
    let mut fig = Table::new(&["label", "x", "y", "provenance"]);
    for (label, f) in labels.iter().zip(&fields) {
        for (&x, &y) in f.nodes.iter().zip(&f.values) {
            fig.push(vec![
                Cell::Text(label.clone()),
                Cell::Num(x),
                Cell::Num(y),
                Cell::Text(f.provenance.as_str().into()),
            ]);
        }
    }
    art.write_series("figure1", &fig)?;
    println!("solved {} problem(s) on {n} nodes", problems.len());
    art.finish(ctx.manifest(BTreeMap::new(), BTreeMap::new()))
}

pub fn cmd_fit(ctx: &RunContext) -> Result<PathBuf, CliError> {
    let spec = ExperimentConfig::require(&ctx.config.regression, "regression")?;
    let d = regress::generate_synthetic(spec).map_err(CliError::from_core)?;
    let m = regress::fit_least_squares(&d).map_err(CliError::from_core)?;
    let mut art = ctx.artifacts()?;
    art.write_csv("dataset.csv", &dataset_table(&d))?;
    art.write_json("dataset.json", &d.meta, false)?;
    art.write_json("fit_model.json", &m, false)?;
    let truth = LinearModel {
        w: spec.true_w,
        b: spec.true_b,
    };
    let [lo, hi] = spec.x_range;
    let mut line = Table::new(&["x", "y_true", "y_fit"]);
    for x in pde::uniform_grid(lo, hi, spec.n) {
        line.push(vec![
            Cell::Num(x),
            Cell::Num(truth.predict(x)),
            Cell::Num(m.predict(x)),
        ]);
    }
    art.write_series("fit_line", &line)?;
    println!("w = {:?}, b = {:?}", m.w, m.b);
    let seeds = BTreeMap::from([("regression".to_string(), spec.seed)]);
    art.finish(ctx.manifest(seeds, BTreeMap::new()))
}

pub fn cmd_train_ann(ctx: &RunContext) -> Result<PathBuf, CliError> {
    let spec = ExperimentConfig::require(&ctx.config.regression, "regression")?;
    let cfg = ExperimentConfig::require(&ctx.config.train, "train")?;
    let arch = ctx.config.arch.clone().unwrap_or_default();
    let layers = arch.layers(1);
    let d = regress::generate_synthetic(spec).map_err(CliError::from_core)?;
    let data = Samples::from(&d);
    let model = MlpModel::initialize(1, &layers, &cfg.init_scheme, cfg.init_seed)
        .map_err(CliError::from_core)?;
    let (trained, report) =
        ann::train_steepest_descent(&model, &data, cfg).map_err(CliError::from_core)?;

    let mut art = ctx.artifacts()?;
    art.write_csv("dataset.csv", &dataset_table(&d))?;
    art.write_json("dataset.json", &d.meta, false)?;
    art.write_json("model.json", &trained, false)?;
    art.write_json("train_report.json", &report, true)?;
    art.write_series("loss", &loss_table(&report.loss_history))?;

    let siso_linear = trained.layer_sizes() == [1, 1] && arch.output_transfer == Transfer::Purelin;
    if siso_linear {
        let p = trained.params();
        let lm = regress::fit_least_squares(&d).map_err(CliError::from_core)?;
        let comparison = json!({
            "descent": {"w": p[0], "b": p[1]},
            "least_squares": {"w": lm.w, "b": lm.b},
            "max_abs_diff": (p[0] - lm.w).abs().max((p[1] - lm.b).abs()),
        });
        art.write_json("comparison.json", &comparison, false)?;
        println!(
            "descent w = {:?}, b = {:?}; least squares w = {:?}, b = {:?}",
            p[0], p[1], lm.w, lm.b
        );
    }
    println!(
        "{} after {} epoch(s), final loss {}",
        report.stop_reason.as_str(),
        report.epochs_run,
        report
            .final_loss()
            .map_or("n/a".into(), |l| format!("{l:e}"))
    );
    let seeds = BTreeMap::from([
        ("regression".to_string(), spec.seed),
        ("init".to_string(), cfg.init_seed),
    ]);
    let timings = BTreeMap::from([("t_nt".to_string(), report.wall_time_secs)]);
    art.finish(ctx.manifest(seeds, timings))
}

fn dataset_tables(d: &SurrogateDataset) -> (Table, Table) {
    let mut inputs = Table::new(&["g", "y0", "y1", "split"]);
    for i in 0..d.len() {
        let r = d.inputs.row(i);
        inputs.push(vec![
            Cell::Num(r[0]),
            Cell::Num(r[1]),
            Cell::Num(r[2]),
            Cell::Text(d.split[i].as_str().into()),
        ]);
    }
    let mut outputs = Table::with_columns((0..d.n_nodes()).map(|j| format!("y_{j}")).collect());
    for i in 0..d.len() {
        outputs.push(d.outputs.row(i).iter().map(|&v| Cell::Num(v)).collect());
    }
    (inputs, outputs)
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))
}

pub fn cmd_surrogate(ctx: &RunContext) -> Result<PathBuf, CliError> {
    let c = &ctx.config;
    let space_cfg = ExperimentConfig::require(&c.space, "space")?;
    let train_cfg = ExperimentConfig::require(&c.train, "train")?;
    let eval_cfg = ExperimentConfig::require(&c.eval, "eval")?;
    let arch = c.arch.clone().unwrap_or_default();
    let n_nodes = space_cfg.n_nodes;
    let space = space_cfg.parameter_space();
    let layers = arch.layers(n_nodes);
    space.validate().map_err(|e| stage("generate", e))?;
    eval_cfg
        .split
        .ratios
        .validate()
        .map_err(|e| stage("split", e))?;
    train_cfg.validate().map_err(|e| stage("train", e))?;

    let pool = thread_pool(ctx.threads)?;
    let raw = pool
        .install(|| surrogate::generate_dataset(&space, n_nodes))
        .map_err(|e| stage("generate", e))?;
    let d = surrogate::split_dataset(&raw, eval_cfg.split.ratios, eval_cfg.split.seed)
        .map_err(|e| stage("split", e))?;
    let (model, report) =
        surrogate::train_surrogate(&d, &layers, train_cfg).map_err(|e| stage("train", e))?;
    let eval = surrogate::evaluate(&model, &d, &space, &eval_cfg.settings())
        .map_err(|e| stage("evaluate", e))?;

    let probe = d.indices(SplitTag::Test).first().copied().unwrap_or(0);
    let x = d.inputs.row(probe).to_vec();
    let p = space.problem([x[0], x[1], x[2]]);
    let draft = LedgerDraft {
        t_dg: d.generation_time_secs,
        t_nt: report.wall_time_secs,
        n_predictions: eval_cfg.n_predictions,
    };
    let ledger = costs::measure(
        draft,
        eval_cfg.repetitions,
        || {
            black_box(model.forward(black_box(&x)).ok());
        },
        || {
            black_box(pde::solve_fdm(black_box(&p), n_nodes).ok());
        },
    )
    .map_err(|e| stage("measure", e))?;
    let be = costs::break_even(&ledger).map_err(|e| stage("measure", e))?;

    let sweep = if eval_cfg.arch_sweep {
        Some(
            surrogate::architecture_sweep(&d, &surrogate::default_arch_ladder(n_nodes), train_cfg)
                .map_err(|e| stage("arch_sweep", e))?,
        )
    } else {
        None
    };
    let curve = match &eval_cfg.data_curve {
        Some(settings) => Some(
            pool.install(|| surrogate::data_curve(&space, n_nodes, &layers, train_cfg, settings))
                .map_err(|e| stage("data_curve", e))?,
        ),
        None => None,
    };

    let mut art = ctx.artifacts()?;
    let (inputs, outputs) = dataset_tables(&d);
    art.write_csv("inputs.csv", &inputs)?;
    art.write_csv("outputs.csv", &outputs)?;
    let dataset_manifest = json!({
        "n_samples": d.len(),
        "n_nodes": n_nodes,
        "grid": d.grid,
        "master_seed": space.master_seed,
        "split_seed": eval_cfg.split.seed,
        "split_counts": {
            "train": d.count(SplitTag::Train),
            "val": d.count(SplitTag::Val),
            "test": d.count(SplitTag::Test),
        },
        "generation_time_secs": d.generation_time_secs,
        "worker_threads": pool.current_num_threads(),
    });
    art.write_json("dataset.json", &dataset_manifest, true)?;
    art.write_json("model.json", &model, false)?;
    art.write_json("train_report.json", &report, true)?;
    art.write_series("loss", &loss_table(&report.loss_history))?;
    art.write_json("eval_report.json", &eval, false)?;
    let mut extrap = Table::new(&["multiplier", "rmse"]);
    for pt in &eval.extrapolation_curve {
        extrap.push(vec![Cell::Num(pt.multiplier), Cell::Num(pt.rmse)]);
    }
    art.write_series("extrapolation", &extrap)?;
    let mut sens = Table::new(&["perturbation", "max_output_deviation"]);
    for pt in &eval.sensitivity_table {
        sens.push(vec![
            Cell::Num(pt.perturbation),
            Cell::Num(pt.max_output_deviation),
        ]);
    }
    art.write_series("sensitivity", &sens)?;
    art.write_json(
        "cost_ledger.json",
        &json!({
            "ledger": ledger,
            "total_time": costs::total_time(&ledger),
            "break_even": be,
        }),
        true,
    )?;
    if let Some(rows) = &sweep {
        art.write_json("arch_sweep.json", rows, false)?;
    }
    if let Some(points) = &curve {
        art.write_json("data_curve.json", points, false)?;
        let mut t = Table::new(&["n_samples", "mean_rmse"]);
        for pt in points {
            t.push(vec![
                Cell::Int(pt.n_samples as u64),
                Cell::Num(pt.mean_rmse),
            ]);
        }
        art.write_series("data_curve", &t)?;
    }

    println!(
        "{} samples, {} epoch(s) ({}), test RMSE {}, break-even {be}",
        d.len(),
        report.epochs_run,
        report.stop_reason.as_str(),
        eval.rmse_test.map_or("absent".into(), |r| format!("{r:e}"))
    );

    let mut seeds = BTreeMap::from([
        ("master".to_string(), space.master_seed),
        ("split".to_string(), eval_cfg.split.seed),
        ("init".to_string(), train_cfg.init_seed),
        ("extrapolation".to_string(), eval_cfg.extrap_seed),
    ]);
    if let Some(s) = &eval_cfg.data_curve {
        seeds.insert("data_curve_holdout".into(), s.holdout_seed);
        for (i, &seed) in s.seeds.iter().enumerate() {
            seeds.insert(format!("data_curve_{i}"), seed);
        }
    }
    let timings = BTreeMap::from([
        ("t_dg".to_string(), ledger.t_dg),
        ("t_nt".to_string(), ledger.t_nt),
        ("t_pr".to_string(), ledger.t_pr),
        ("t_solve".to_string(), ledger.t_solve),
    ]);
    art.finish(ctx.manifest(seeds, timings))
}

pub fn cmd_breakeven(ctx: &RunContext) -> Result<PathBuf, CliError> {
    let s = ExperimentConfig::require(&ctx.config.costs, "costs")?;
    let ledger = CostLedger::from_times(s.t_dg, s.t_nt, s.t_pr, s.t_solve, s.n_predictions);
    ledger.validate().map_err(CliError::from_core)?;
    let be = costs::break_even(&ledger).map_err(CliError::from_core)?;
    let total = costs::total_time(&ledger);
    let mut art = ctx.artifacts()?;
    art.write_json(
        "breakeven.json",
        &json!({"ledger": ledger, "total_time": total, "break_even": be}),
        false,
    )?;
    println!(
        "total time for {} predictions: {total:?} s",
        s.n_predictions
    );
    println!("break-even: {be}");
    art.finish(ctx.manifest(BTreeMap::new(), BTreeMap::new()))
}
