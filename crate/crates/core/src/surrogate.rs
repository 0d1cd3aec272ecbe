//! Parametric surrogates: a network mapping `(g, y0, y1)` to the nodal
//! solution on a fixed grid, trained on finite-difference solves.
//!
//! Besides in-distribution error the evaluation measures what happens off
//! the training distribution: inputs from widened ranges, small input
//! perturbations and a finer grid than the one trained on.

use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ann::{
    self, LayerSpec, MlpModel, Samples, StopReason, TrainConfig, TrainReport, Transfer,
};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::pde::{self, PoissonProblem};
use crate::rng;

pub const N_INPUTS: usize = 3;
pub const DEFAULT_EXTRAP_MULTIPLIERS: [f64; 4] = [1.0, 1.5, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    UniformRandom,
    /// Tensor grid with `cbrt(n_samples)` points per axis, ends included.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpace {
    pub g_range: [f64; 2],
    pub y0_range: [f64; 2],
    pub y1_range: [f64; 2],
    /// Fixed `(x0, x1)`.
    pub domain: [f64; 2],
    pub sampling: Sampling,
    pub n_samples: usize,
    pub master_seed: u64,
}

impl ParameterSpace {
    pub fn validate(&self) -> Result<()> {
        for (name, [lo, hi]) in [
            ("g_range", self.g_range),
            ("y0_range", self.y0_range),
            ("y1_range", self.y1_range),
        ] {
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::param(format!(
                    "{name} must satisfy lo <= hi, got [{lo}, {hi}]"
                )));
            }
        }
        PoissonProblem::new(0.0, self.domain[0], self.domain[1], 0.0, 0.0)?;
        if self.n_samples == 0 {
            return Err(Error::param("n_samples must be at least 1"));
        }
        if self.sampling == Sampling::Grid {
            self.grid_points_per_axis()?;
        }
        Ok(())
    }

    fn grid_points_per_axis(&self) -> Result<usize> {
        let k = (self.n_samples as f64).cbrt().round() as usize;
        if k * k * k != self.n_samples {
            return Err(Error::param(format!(
                "grid sampling needs a perfect-cube n_samples, got {}",
                self.n_samples
            )));
        }
        Ok(k)
    }

    fn ranges(&self) -> [[f64; 2]; 3] {
        [self.g_range, self.y0_range, self.y1_range]
    }

    /// The `(g, y0, y1)` triples this space samples, in sample order.
    pub fn sample_points(&self) -> Result<Vec<[f64; 3]>> {
        self.validate()?;
        let ranges = self.ranges();
        Ok(match self.sampling {
            Sampling::UniformRandom => (0..self.n_samples)
                .map(|i| {
                    let mut r = rng::seeded(rng::derive_seed(self.master_seed, i as u64));
                    ranges.map(|[lo, hi]| rng::uniform(&mut r, lo, hi))
                })
                .collect(),
            Sampling::Grid => {
                let k = self.grid_points_per_axis()?;
                let axis = |[lo, hi]: [f64; 2], j: usize| {
                    if k == 1 {
                        lo
                    } else if j == k - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * j as f64 / (k - 1) as f64
                    }
                };
                (0..self.n_samples)
                    .map(|i| {
                        let idx = [i / (k * k), (i / k) % k, i % k];
                        [
                            axis(ranges[0], idx[0]),
                            axis(ranges[1], idx[1]),
                            axis(ranges[2], idx[2]),
                        ]
                    })
                    .collect()
            }
        })
    }

    pub fn problem(&self, p: [f64; 3]) -> PoissonProblem {
        PoissonProblem {
            g: p[0],
            x0: self.domain[0],
            x1: self.domain[1],
            y0: p[1],
            y1: p[2],
        }
    }

    /// Ranges widened (or shrunk) by `multiplier` about their midpoints.
    pub fn scaled(&self, multiplier: f64) -> Self {
        let scale = |[lo, hi]: [f64; 2]| {
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo) * multiplier;
            [mid - half, mid + half]
        };
        Self {
            g_range: scale(self.g_range),
            y0_range: scale(self.y0_range),
            y1_range: scale(self.y1_range),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitTag {
    Train,
    Val,
    Test,
}

impl SplitTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitTag::Train => "train",
            SplitTag::Val => "val",
            SplitTag::Test => "test",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateDataset {
    /// `n_samples × 3` rows of `(g, y0, y1)`.
    pub inputs: DenseMatrix,
    /// `n_samples × M` nodal solutions.
    pub outputs: DenseMatrix,
    pub grid: Vec<f64>,
    pub split: Vec<SplitTag>,
    pub generation_time_secs: f64,
}

impl SurrogateDataset {
    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n_nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn indices(&self, tag: SplitTag) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.split[i] == tag).collect()
    }

    pub fn count(&self, tag: SplitTag) -> usize {
        self.split.iter().filter(|&&t| t == tag).count()
    }

    /// Rows `idx` as training samples, or `None` if `idx` is empty.
    pub fn samples(&self, idx: &[usize]) -> Option<Samples> {
        if idx.is_empty() {
            return None;
        }
        let pick = |m: &DenseMatrix| {
            DenseMatrix::new(
                idx.len(),
                m.cols(),
                idx.iter().flat_map(|&i| m.row(i).iter().copied()).collect(),
            )
            .expect("non-empty selection")
        };
        Some(Samples {
            inputs: pick(&self.inputs),
            targets: pick(&self.outputs),
        })
    }
}

/// Runs one finite-difference solve per sampled point. Samples are solved
/// on the current rayon pool; the result does not depend on its size.
pub fn generate_dataset(space: &ParameterSpace, n_nodes: usize) -> Result<SurrogateDataset> {
    let started = Instant::now();
    let points = space.sample_points()?;
    let solutions: Vec<Vec<f64>> = points
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            pde::solve_fdm(&space.problem(p), n_nodes)
                .map(|s| s.values)
                .map_err(|e| Error::Sample {
                    index: i,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;
    let n = points.len();
    let inputs = DenseMatrix::new(n, N_INPUTS, points.concat())?;
    let outputs = DenseMatrix::new(n, n_nodes, solutions.concat())?;
    Ok(SurrogateDataset {
        inputs,
        outputs,
        grid: pde::uniform_grid(space.domain[0], space.domain[1], n_nodes),
        split: vec![SplitTag::Train; n],
        generation_time_secs: started.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl SplitRatios {
    pub const CLASSIC: SplitRatios = SplitRatios {
        train: 0.8,
        val: 0.1,
        test: 0.1,
    };

    pub fn validate(&self) -> Result<()> {
        let r = [self.train, self.val, self.test];
        if r.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::param("split ratios must be finite and non-negative"));
        }
        if !(self.train > 0.0) {
            return Err(Error::param("train ratio must be positive"));
        }
        if (r.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::param(format!(
                "split ratios must sum to 1, got {r:?}"
            )));
        }
        Ok(())
    }

    /// `(train, val, test)` counts; val and test are floored, the remainder
    /// goes to train.
    pub fn counts(&self, n: usize) -> (usize, usize, usize) {
        let take = |r: f64| ((n as f64) * r + 1e-9).floor() as usize;
        let val = take(self.val);
        let test = take(self.test).min(n - val);
        (n - val - test, val, test)
    }
}

/// Shuffles sample indices with `seed` and assigns contiguous blocks to
/// train, val and test.
pub fn split_dataset(
    d: &SurrogateDataset,
    ratios: SplitRatios,
    seed: u64,
) -> Result<SurrogateDataset> {
    ratios.validate()?;
    let n = d.len();
    let (n_train, n_val, _) = ratios.counts(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::seeded(seed));
    let mut split = vec![SplitTag::Test; n];
    for (rank, &i) in order.iter().enumerate() {
        split[i] = if rank < n_train {
            SplitTag::Train
        } else if rank < n_train + n_val {
            SplitTag::Val
        } else {
            SplitTag::Test
        };
    }
    Ok(SurrogateDataset { split, ..d.clone() })
}

/// Trains `arch` (hidden layers then the output layer) on the train split.
/// Inputs are standardized with statistics of the train split only; the
/// scaling is stored in the returned model.
pub fn train_surrogate(
    d: &SurrogateDataset,
    arch: &[LayerSpec],
    cfg: &TrainConfig,
) -> Result<(MlpModel, TrainReport)> {
    match arch.last() {
        Some(out) if out.size == d.n_nodes() => {}
        _ => {
            return Err(Error::shape(format!(
                "architecture must end in a layer of {} outputs",
                d.n_nodes()
            )))
        }
    }
    let train = d
        .samples(&d.indices(SplitTag::Train))
        .ok_or_else(|| Error::param("train split is empty"))?;
    let scaling = ann::InputScaling::fit(&train.inputs);
    let model = MlpModel::initialize(N_INPUTS, arch, &cfg.init_scheme, cfg.init_seed)?
        .with_input_scaling(Some(scaling))?;
    ann::train_steepest_descent(&model, &train, cfg)
}

/// Hidden-layer ladder `{[]}, {[8]}, {[16, 16]}` with tanh hidden layers and
/// a purelin output layer of `n_out` units.
pub fn default_arch_ladder(n_out: usize) -> Vec<Vec<LayerSpec>> {
    let out = LayerSpec {
        size: n_out,
        transfer: Transfer::Purelin,
    };
    let tanh = |size| LayerSpec {
        size,
        transfer: Transfer::Tanh,
    };
    vec![vec![out], vec![tanh(8), out], vec![tanh(16), tanh(16), out]]
}

/// Predictions for every row of `inputs`, `rows × n_out`.
pub fn predict_all(m: &MlpModel, inputs: &DenseMatrix) -> Result<DenseMatrix> {
    let mut data = Vec::with_capacity(inputs.rows() * m.n_outputs());
    for i in 0..inputs.rows() {
        data.extend(m.forward(inputs.row(i))?);
    }
    DenseMatrix::new(inputs.rows(), m.n_outputs(), data)
}

/// Root mean square of `pred - truth` over the selected rows and all columns.
pub fn rmse_rows(m: &MlpModel, d: &SurrogateDataset, idx: &[usize]) -> Result<Option<f64>> {
    if idx.is_empty() {
        return Ok(None);
    }
    let mut sum = 0.0;
    for &i in idx {
        let pred = m.forward(d.inputs.row(i))?;
        sum += pred
            .iter()
            .zip(d.outputs.row(i))
            .map(|(p, t)| (p - t).powi(2))
            .sum::<f64>();
    }
    Ok(Some((sum / (idx.len() * d.n_nodes()) as f64).sqrt()))
}

pub fn rmse_all(m: &MlpModel, d: &SurrogateDataset) -> Result<f64> {
    let idx: Vec<usize> = (0..d.len()).collect();
    Ok(rmse_rows(m, d, &idx)?.expect("dataset is non-empty"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSettings {
    pub extrap_multipliers: Vec<f64>,
    pub perturbations: Vec<f64>,
    /// Fresh samples drawn per extrapolation multiplier.
    pub extrap_samples: usize,
    pub extrap_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationPoint {
    pub multiplier: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityPoint {
    pub perturbation: f64,
    pub max_output_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rmse_train: Option<f64>,
    pub rmse_val: Option<f64>,
    pub rmse_test: Option<f64>,
    pub extrapolation_curve: Vec<ExtrapolationPoint>,
    /// Split the sensitivity and discretization probes ran on: the test
    /// split, or every sample when it is empty.
    pub probe_split: String,
    pub sensitivity_table: Vec<SensitivityPoint>,
    /// RMSE of predictions linearly resampled onto a grid with twice the
    /// resolution, against solves on that grid.
    pub discretization_transfer: f64,
    pub fine_grid_nodes: usize,
    /// Mean `|prediction - boundary value|` over both end nodes of every sample.
    pub boundary_violation: f64,
}

pub fn evaluate(
    m: &MlpModel,
    d: &SurrogateDataset,
    space: &ParameterSpace,
    settings: &EvalSettings,
) -> Result<EvalReport> {
    let n_nodes = d.n_nodes();
    if m.n_inputs() != N_INPUTS || m.n_outputs() != n_nodes {
        return Err(Error::shape(format!(
            "model is {}→{} but dataset needs {}→{}",
            m.n_inputs(),
            m.n_outputs(),
            N_INPUTS,
            n_nodes
        )));
    }
    if settings.extrap_samples == 0 && !settings.extrap_multipliers.is_empty() {
        return Err(Error::param("extrap_samples must be positive"));
    }
    let rmse_train = rmse_rows(m, d, &d.indices(SplitTag::Train))?;
    let rmse_val = rmse_rows(m, d, &d.indices(SplitTag::Val))?;
    let rmse_test = rmse_rows(m, d, &d.indices(SplitTag::Test))?;

    let mut extrapolation_curve = Vec::with_capacity(settings.extrap_multipliers.len());
    for &multiplier in &settings.extrap_multipliers {
        if !(multiplier >= 0.0) || !multiplier.is_finite() {
            return Err(Error::param(
                "extrapolation multipliers must be finite and >= 0",
            ));
        }
        let fresh_space = ParameterSpace {
            sampling: Sampling::UniformRandom,
            n_samples: settings.extrap_samples,
            master_seed: settings.extrap_seed,
            ..space.scaled(multiplier)
        };
        let fresh = generate_dataset(&fresh_space, n_nodes)?;
        extrapolation_curve.push(ExtrapolationPoint {
            multiplier,
            rmse: rmse_all(m, &fresh)?,
        });
    }

    let (probe_split, probe) = match d.indices(SplitTag::Test) {
        idx if !idx.is_empty() => ("test", idx),
        _ => ("all", (0..d.len()).collect()),
    };

    let mut sensitivity_table = Vec::with_capacity(settings.perturbations.len());
    for &delta in &settings.perturbations {
        let mut worst = 0.0_f64;
        for &i in &probe {
            let base_in = d.inputs.row(i);
            let base = m.forward(base_in)?;
            for j in 0..N_INPUTS {
                for sign in [1.0, -1.0] {
                    let mut x = base_in.to_vec();
                    x[j] += sign * delta;
                    let moved = m.forward(&x)?;
                    let dev = moved
                        .iter()
                        .zip(&base)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    worst = worst.max(dev);
                }
            }
        }
        sensitivity_table.push(SensitivityPoint {
            perturbation: delta,
            max_output_deviation: worst,
        });
    }

    let fine_nodes = 2 * (n_nodes - 1) + 1;
    let fine_grid = pde::uniform_grid(space.domain[0], space.domain[1], fine_nodes);
    let mut sum = 0.0;
    for &i in &probe {
        let row = d.inputs.row(i);
        let pred =
            pde::SolutionField::new(d.grid.clone(), m.forward(row)?, pde::Provenance::Surrogate)?;
        let truth = pde::solve_fdm(&space.problem([row[0], row[1], row[2]]), fine_nodes)?;
        sum += fine_grid
            .iter()
            .zip(&truth.values)
            .map(|(&x, t)| (pred.interpolate(x) - t).powi(2))
            .sum::<f64>();
    }
    let discretization_transfer = (sum / (probe.len() * fine_nodes) as f64).sqrt();

    let mut bc = 0.0;
    for i in 0..d.len() {
        let row = d.inputs.row(i);
        let pred = m.forward(row)?;
        bc += (pred[0] - row[1]).abs() + (pred[n_nodes - 1] - row[2]).abs();
    }
    let boundary_violation = bc / (2 * d.len()) as f64;

    Ok(EvalReport {
        rmse_train,
        rmse_val,
        rmse_test,
        extrapolation_curve,
        probe_split: probe_split.to_string(),
        sensitivity_table,
        discretization_transfer,
        fine_grid_nodes: fine_nodes,
        boundary_violation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchSweepRow {
    pub layer_sizes: Vec<usize>,
    pub transfers: Vec<Transfer>,
    pub rmse_train: Option<f64>,
    pub rmse_val: Option<f64>,
    pub rmse_test: Option<f64>,
    pub epochs_run: usize,
    pub stop_reason: StopReason,
}

/// Trains every architecture of `archs` on the same split dataset.
pub fn architecture_sweep(
    d: &SurrogateDataset,
    archs: &[Vec<LayerSpec>],
    cfg: &TrainConfig,
) -> Result<Vec<ArchSweepRow>> {
    archs
        .iter()
        .map(|arch| {
            let (m, report) = train_surrogate(d, arch, cfg)?;
            Ok(ArchSweepRow {
                layer_sizes: m.layer_sizes(),
                transfers: arch.iter().map(|l| l.transfer).collect(),
                rmse_train: rmse_rows(&m, d, &d.indices(SplitTag::Train))?,
                rmse_val: rmse_rows(&m, d, &d.indices(SplitTag::Val))?,
                rmse_test: rmse_rows(&m, d, &d.indices(SplitTag::Test))?,
                epochs_run: report.epochs_run,
                stop_reason: report.stop_reason,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataCurveSettings {
    pub sample_counts: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Size of the fresh held-out set every point is scored on.
    pub holdout_samples: usize,
    pub holdout_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataCurvePoint {
    pub n_samples: usize,
    pub mean_rmse: f64,
    pub per_seed_rmse: Vec<f64>,
}

/// Held-out RMSE against training-set size. For each count and seed a
/// fresh uniformly sampled training set is solved and trained on in full;
/// every model is scored on the same held-out set.
pub fn data_curve(
    space: &ParameterSpace,
    n_nodes: usize,
    arch: &[LayerSpec],
    cfg: &TrainConfig,
    settings: &DataCurveSettings,
) -> Result<Vec<DataCurvePoint>> {
    if settings.seeds.is_empty() || settings.holdout_samples == 0 {
        return Err(Error::param(
            "data curve needs at least one seed and one held-out sample",
        ));
    }
    let holdout = generate_dataset(
        &ParameterSpace {
            sampling: Sampling::UniformRandom,
            n_samples: settings.holdout_samples,
            master_seed: settings.holdout_seed,
            ..space.clone()
        },
        n_nodes,
    )?;
    settings
        .sample_counts
        .iter()
        .map(|&n| {
            let per_seed_rmse = settings
                .seeds
                .iter()
                .map(|&seed| {
                    let train_space = ParameterSpace {
                        sampling: Sampling::UniformRandom,
                        n_samples: n,
                        master_seed: seed,
                        ..space.clone()
                    };
                    let d = generate_dataset(&train_space, n_nodes)?;
                    let (m, _) = train_surrogate(&d, arch, cfg)?;
                    rmse_all(&m, &holdout)
                })
                .collect::<Result<Vec<f64>>>()?;
            let mean_rmse = per_seed_rmse.iter().sum::<f64>() / per_seed_rmse.len() as f64;
            Ok(DataCurvePoint {
                n_samples: n,
                mean_rmse,
                per_seed_rmse,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n: usize, sampling: Sampling) -> ParameterSpace {
        ParameterSpace {
            g_range: [-1.0, 3.0],
            y0_range: [0.0, 1.0],
            y1_range: [-1.0, 0.5],
            domain: [0.0, 1.0],
            sampling,
            n_samples: n,
            master_seed: 17,
        }
    }

    #[test]
    fn homogeneous_single_sample() {
        let s = ParameterSpace {
            g_range: [0.0, 0.0],
            y0_range: [0.0, 0.0],
            y1_range: [0.0, 0.0],
            ..space(1, Sampling::UniformRandom)
        };
        let d = generate_dataset(&s, 11).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d.outputs.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn grid_sampling_matches_analytic() {
        let s = space(8, Sampling::Grid);
        let d = generate_dataset(&s, 21).unwrap();
        assert_eq!(d.len(), 8);
        let mut corners = std::collections::HashSet::new();
        for i in 0..8 {
            let r = d.inputs.row(i);
            corners.insert(format!("{r:?}"));
            let exact = pde::solve_analytic(&s.problem([r[0], r[1], r[2]]), 21).unwrap();
            for (a, b) in exact.values.iter().zip(d.outputs.row(i)) {
                assert!((a - b).abs() < 1e-10);
            }
        }
        assert_eq!(corners.len(), 8);
    }

    #[test]
    fn grid_needs_cube() {
        assert!(space(9, Sampling::Grid).validate().is_err());
        assert!(space(27, Sampling::Grid).validate().is_ok());
    }

    #[test]
    fn invalid_space() {
        let mut s = space(4, Sampling::UniformRandom);
        s.g_range = [1.0, 0.0];
        assert!(s.validate().is_err());
        let mut s = space(0, Sampling::UniformRandom);
        assert!(s.validate().is_err());
        s.n_samples = 1;
        s.domain = [1.0, 1.0];
        assert!(s.validate().is_err());
    }

    #[test]
    fn generation_is_independent_of_pool_size() {
        let s = space(40, Sampling::UniformRandom);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| generate_dataset(&s, 31).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.inputs, b.inputs);
        assert_eq!(a.outputs, b.outputs);
    }

    #[test]
    fn solver_failures_carry_the_sample_index() {
        let err = generate_dataset(&space(2, Sampling::UniformRandom), 2).unwrap_err();
        assert!(matches!(err, Error::Sample { index: 0, .. }), "{err:?}");
        assert!(err.is_numerical());
    }

    #[test]
    fn split_counts() {
        let d = generate_dataset(&space(10, Sampling::UniformRandom), 5).unwrap();
        let s = split_dataset(&d, SplitRatios::CLASSIC, 3).unwrap();
        assert_eq!(
            (
                s.count(SplitTag::Train),
                s.count(SplitTag::Val),
                s.count(SplitTag::Test)
            ),
            (8, 1, 1)
        );

        let all = SplitRatios {
            train: 1.0,
            val: 0.0,
            test: 0.0,
        };
        let s = split_dataset(&d, all, 3).unwrap();
        assert_eq!(s.count(SplitTag::Train), 10);

        let bad = SplitRatios {
            train: 0.8,
            val: 0.1,
            test: 0.2,
        };
        assert!(split_dataset(&d, bad, 3).is_err());
        let neg = SplitRatios {
            train: 1.1,
            val: -0.1,
            test: 0.0,
        };
        assert!(split_dataset(&d, neg, 3).is_err());
    }

    #[test]
    fn split_is_seeded() {
        let d = generate_dataset(&space(100, Sampling::UniformRandom), 5).unwrap();
        let a = split_dataset(&d, SplitRatios::CLASSIC, 9).unwrap();
        let b = split_dataset(&d, SplitRatios::CLASSIC, 9).unwrap();
        let c = split_dataset(&d, SplitRatios::CLASSIC, 10).unwrap();
        assert_eq!(a.split, b.split);
        assert_ne!(a.split, c.split);
        assert_eq!(
            (
                a.count(SplitTag::Train),
                a.count(SplitTag::Val),
                a.count(SplitTag::Test)
            ),
            (80, 10, 10)
        );
    }

    #[test]
    fn scaled_about_midpoint() {
        let s = space(1, Sampling::UniformRandom).scaled(2.0);
        assert_eq!(s.g_range, [-3.0, 5.0]);
        assert_eq!(s.y0_range, [-0.5, 1.5]);
        let s = space(1, Sampling::UniformRandom).scaled(1.0);
        assert_eq!(s.g_range, [-1.0, 3.0]);
    }

    #[test]
    fn arch_output_must_match_grid() {
        let d = generate_dataset(&space(8, Sampling::Grid), 11).unwrap();
        let arch = [LayerSpec {
            size: 10,
            transfer: Transfer::Purelin,
        }];
        let cfg = TrainConfig {
            learning_rate: 1e-3,
            stop_tolerance: 1e-12,
            max_epochs: 5,
            init_seed: 1,
            init_scheme: ann::InitScheme::Uniform,
        };
        assert!(matches!(
            train_surrogate(&d, &arch, &cfg),
            Err(Error::Shape(_))
        ));
    }
}
