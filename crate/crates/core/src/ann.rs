//! Fully connected feed-forward networks trained by full-batch steepest
//! descent on the sum of squared errors.
//!
//! Layer `k` computes `a_k = f_k(W_k a_{k-1} + b_k)`. The loss is
//! `L = sum over samples and outputs of e²` with `e = target - output`, and
//! gradients keep the factor 2 of `dL/de = -2e`. For a single purelin
//! neuron the backward pass reduces to `dL/dw = -2 eᵀx`, `dL/db = -2 eᵀ1`.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::regress::RegressionDataset;
use crate::rng;

/// Half-width of the default uniform weight initialization.
pub const INIT_HALF_WIDTH: f64 = 0.5;

/// Loss assumed for "epoch 0" when testing the first change in loss.
pub const INITIAL_PREVIOUS_LOSS: f64 = 1.0e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transfer {
    Purelin,
    Tanh,
}

impl Transfer {
    pub fn apply(self, n: f64) -> f64 {
        match self {
            Transfer::Purelin => n,
            Transfer::Tanh => n.tanh(),
        }
    }

    pub fn derivative(self, n: f64) -> f64 {
        self.derivative_from_output(self.apply(n))
    }

    /// `f'(n)` expressed through `a = f(n)`.
    pub fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Transfer::Purelin => 1.0,
            Transfer::Tanh => 1.0 - a * a,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Transfer::Purelin => "purelin",
            Transfer::Tanh => "tanh",
        }
    }
}

/// Affine input map `x' = (x - center) / scale`, applied before the first
/// layer. Part of the model so saved predictions stay reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputScaling {
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
}

impl InputScaling {
    /// Zero mean and unit range per column; constant columns keep scale 1.
    pub fn fit(inputs: &DenseMatrix) -> Self {
        let (n, d) = (inputs.rows(), inputs.cols());
        let mut center = vec![0.0; d];
        let mut scale = vec![1.0; d];
        for j in 0..d {
            let col = (0..n).map(|i| inputs[(i, j)]);
            let (lo, hi) = col
                .clone()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                    (l.min(v), h.max(v))
                });
            center[j] = col.sum::<f64>() / n as f64;
            if hi > lo {
                scale[j] = hi - lo;
            }
        }
        Self { center, scale }
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (((o, &xi), c), s) in out.iter_mut().zip(x).zip(&self.center).zip(&self.scale) {
            *o = (xi - c) / s;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    /// `size × previous size`.
    pub weights: DenseMatrix,
    pub biases: Vec<f64>,
    pub transfer: Transfer,
}

impl Layer {
    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }
}

/// One hidden or output layer of an architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub size: usize,
    pub transfer: Transfer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MlpWire", into = "MlpWire")]
pub struct MlpModel {
    layers: Vec<Layer>,
    input_scaling: Option<InputScaling>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MlpWire {
    layer_sizes: Vec<usize>,
    weights: Vec<DenseMatrix>,
    biases: Vec<Vec<f64>>,
    transfers: Vec<Transfer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input_scaling: Option<InputScaling>,
}

impl TryFrom<MlpWire> for MlpModel {
    type Error = Error;

    fn try_from(w: MlpWire) -> Result<Self> {
        let m = MlpModel::from_parts(w.weights, w.biases, w.transfers)?;
        if m.layer_sizes() != w.layer_sizes {
            return Err(Error::shape(format!(
                "layer_sizes {:?} disagree with weight shapes {:?}",
                w.layer_sizes,
                m.layer_sizes()
            )));
        }
        m.with_input_scaling(w.input_scaling)
    }
}

impl From<MlpModel> for MlpWire {
    fn from(m: MlpModel) -> Self {
        let layer_sizes = m.layer_sizes();
        let (mut weights, mut biases, mut transfers) = (vec![], vec![], vec![]);
        for l in m.layers {
            weights.push(l.weights);
            biases.push(l.biases);
            transfers.push(l.transfer);
        }
        MlpWire {
            layer_sizes,
            weights,
            biases,
            transfers,
            input_scaling: m.input_scaling,
        }
    }
}

/// How the initial weights are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitScheme {
    /// Every weight and bias uniform on `[-0.5, 0.5)` from the init seed.
    Uniform,
    /// Explicit starting parameters, one matrix and bias vector per layer.
    Explicit {
        weights: Vec<DenseMatrix>,
        biases: Vec<Vec<f64>>,
    },
}

impl MlpModel {
    pub fn from_parts(
        weights: Vec<DenseMatrix>,
        biases: Vec<Vec<f64>>,
        transfers: Vec<Transfer>,
    ) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::shape("a network needs at least one layer"));
        }
        if weights.len() != biases.len() || weights.len() != transfers.len() {
            return Err(Error::shape(format!(
                "{} weight matrices, {} bias vectors, {} transfer functions",
                weights.len(),
                biases.len(),
                transfers.len()
            )));
        }
        let mut layers = Vec::with_capacity(weights.len());
        for (k, ((w, b), f)) in weights.into_iter().zip(biases).zip(transfers).enumerate() {
            if b.len() != w.rows() {
                return Err(Error::shape(format!(
                    "layer {k}: {} biases for {} neurons",
                    b.len(),
                    w.rows()
                )));
            }
            if let Some(prev) = layers.last().map(Layer::outputs) {
                if w.cols() != prev {
                    return Err(Error::shape(format!(
                        "layer {k} takes {} inputs but previous layer has {prev} outputs",
                        w.cols()
                    )));
                }
            }
            layers.push(Layer {
                weights: w,
                biases: b,
                transfer: f,
            });
        }
        Ok(Self {
            layers,
            input_scaling: None,
        })
    }

    /// Single-input single-output neuron `y = f(w x + b)`.
    pub fn siso(w: f64, b: f64, transfer: Transfer) -> Self {
        Self {
            layers: vec![Layer {
                weights: DenseMatrix::new(1, 1, vec![w]).expect("1x1"),
                biases: vec![b],
                transfer,
            }],
            input_scaling: None,
        }
    }

    /// Architecture `n_inputs -> layers[0] -> ...` initialized per `scheme`.
    pub fn initialize(
        n_inputs: usize,
        layers: &[LayerSpec],
        scheme: &InitScheme,
        seed: u64,
    ) -> Result<Self> {
        if n_inputs == 0 || layers.is_empty() || layers.iter().any(|l| l.size == 0) {
            return Err(Error::shape(
                "architecture needs non-zero sizes and at least one layer",
            ));
        }
        let transfers: Vec<Transfer> = layers.iter().map(|l| l.transfer).collect();
        let model = match scheme {
            InitScheme::Uniform => {
                let mut r = rng::seeded(seed);
                let mut prev = n_inputs;
                let mut weights = Vec::new();
                let mut biases = Vec::new();
                for l in layers {
                    let w: Vec<f64> = (0..l.size * prev)
                        .map(|_| r.gen_range(-INIT_HALF_WIDTH..INIT_HALF_WIDTH))
                        .collect();
                    weights.push(DenseMatrix::new(l.size, prev, w)?);
                    biases.push(
                        (0..l.size)
                            .map(|_| r.gen_range(-INIT_HALF_WIDTH..INIT_HALF_WIDTH))
                            .collect(),
                    );
                    prev = l.size;
                }
                Self::from_parts(weights, biases, transfers)?
            }
            InitScheme::Explicit { weights, biases } => {
                Self::from_parts(weights.clone(), biases.clone(), transfers)?
            }
        };
        let expected: Vec<usize> = std::iter::once(n_inputs)
            .chain(layers.iter().map(|l| l.size))
            .collect();
        if model.layer_sizes() != expected {
            return Err(Error::shape(format!(
                "initial parameters have shape {:?}, architecture needs {expected:?}",
                model.layer_sizes()
            )));
        }
        Ok(model)
    }

    pub fn with_input_scaling(mut self, scaling: Option<InputScaling>) -> Result<Self> {
        if let Some(s) = &scaling {
            let d = self.n_inputs();
            if s.center.len() != d || s.scale.len() != d {
                return Err(Error::shape(
                    "input scaling length must equal the input size",
                ));
            }
            if s.scale.iter().any(|v| *v == 0.0 || !v.is_finite()) {
                return Err(Error::param(
                    "input scale entries must be finite and non-zero",
                ));
            }
        }
        self.input_scaling = scaling;
        Ok(self)
    }

    pub fn input_scaling(&self) -> Option<&InputScaling> {
        self.input_scaling.as_ref()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    /// `[n_in, h1, ..., n_out]`.
    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].inputs())
            .chain(self.layers.iter().map(Layer::outputs))
            .collect()
    }

    pub fn n_inputs(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn n_outputs(&self) -> usize {
        self.layers.last().map_or(0, Layer::outputs)
    }

    pub fn n_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.as_slice().len() + l.biases.len())
            .sum()
    }

    /// All parameters, layer by layer, weights (row-major) before biases.
    pub fn params(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            v.extend_from_slice(l.weights.as_slice());
            v.extend_from_slice(&l.biases);
        }
        v
    }

    fn param_mut(&mut self, mut idx: usize) -> &mut f64 {
        for l in &mut self.layers {
            let nw = l.weights.as_slice().len();
            if idx < nw {
                return &mut l.weights.as_mut_slice()[idx];
            }
            idx -= nw;
            if idx < l.biases.len() {
                return &mut l.biases[idx];
            }
            idx -= l.biases.len();
        }
        panic!("parameter index out of range");
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.n_inputs() {
            return Err(Error::shape(format!(
                "network takes {} inputs, got {}",
                self.n_inputs(),
                input.len()
            )));
        }
        let mut ws = Workspace::new(self);
        self.forward_into(input, &mut ws);
        Ok(ws.activations.last().cloned().unwrap_or_default())
    }

    /// Fills `ws.activations` with the input (after scaling) and every
    /// layer's output.
    fn forward_into(&self, input: &[f64], ws: &mut Workspace) {
        match &self.input_scaling {
            Some(s) => s.apply_into(input, &mut ws.activations[0]),
            None => ws.activations[0].copy_from_slice(input),
        }
        for (k, layer) in self.layers.iter().enumerate() {
            let (before, after) = ws.activations.split_at_mut(k + 1);
            let a_prev = &before[k];
            let out = &mut after[0];
            let w = layer.weights.as_slice();
            let n_in = layer.inputs();
            for (i, o) in out.iter_mut().enumerate() {
                let row = &w[i * n_in..(i + 1) * n_in];
                let n: f64 = row
                    .iter()
                    .zip(a_prev.iter())
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    + layer.biases[i];
                *o = layer.transfer.apply(n);
            }
        }
    }
}

/// Per-sample scratch buffers.
struct Workspace {
    activations: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl Workspace {
    fn new(m: &MlpModel) -> Self {
        let sizes = m.layer_sizes();
        Self {
            activations: sizes.iter().map(|&s| vec![0.0; s]).collect(),
            deltas: sizes[1..].iter().map(|&s| vec![0.0; s]).collect(),
        }
    }
}

/// Batched training samples: one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub inputs: DenseMatrix,
    pub targets: DenseMatrix,
}

impl Samples {
    pub fn new(inputs: DenseMatrix, targets: DenseMatrix) -> Result<Self> {
        if inputs.rows() != targets.rows() {
            return Err(Error::shape(format!(
                "{} input rows but {} target rows",
                inputs.rows(),
                targets.rows()
            )));
        }
        Ok(Self { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check(&self, m: &MlpModel) -> Result<()> {
        if self.inputs.cols() != m.n_inputs() || self.targets.cols() != m.n_outputs() {
            return Err(Error::shape(format!(
                "data is {}→{} but network is {}→{}",
                self.inputs.cols(),
                self.targets.cols(),
                m.n_inputs(),
                m.n_outputs()
            )));
        }
        Ok(())
    }
}

impl From<&RegressionDataset> for Samples {
    fn from(d: &RegressionDataset) -> Self {
        let n = d.len();
        Samples {
            inputs: DenseMatrix::new(n, 1, d.inputs().to_vec()).expect("n >= 2"),
            targets: DenseMatrix::new(n, 1, d.targets().to_vec()).expect("n >= 2"),
        }
    }
}

/// Gradient of the loss for one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub dw: DenseMatrix,
    pub db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradient>,
}

impl Gradients {
    fn zeros_like(m: &MlpModel) -> Self {
        Self {
            layers: m
                .layers
                .iter()
                .map(|l| LayerGradient {
                    dw: DenseMatrix::zeros(l.outputs(), l.inputs()),
                    db: vec![0.0; l.outputs()],
                })
                .collect(),
        }
    }

    /// Flattened in the same order as [`MlpModel::params`].
    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|g| g.dw.as_slice().iter().chain(&g.db).copied())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.flatten().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Sum of squared errors over every sample and output.
pub fn loss_sse(m: &MlpModel, data: &Samples) -> Result<f64> {
    data.check(m)?;
    let mut ws = Workspace::new(m);
    let mut loss = 0.0;
    for s in 0..data.len() {
        m.forward_into(data.inputs.row(s), &mut ws);
        let out = ws.activations.last().expect("at least one layer");
        loss += out
            .iter()
            .zip(data.targets.row(s))
            .map(|(o, t)| (t - o).powi(2))
            .sum::<f64>();
    }
    Ok(loss)
}

pub fn gradients(m: &MlpModel, data: &Samples) -> Result<Gradients> {
    loss_and_gradients(m, data).map(|(_, g)| g)
}

/// Loss and its gradient from one forward and one backward sweep per sample.
pub fn loss_and_gradients(m: &MlpModel, data: &Samples) -> Result<(f64, Gradients)> {
    data.check(m)?;
    let mut ws = Workspace::new(m);
    let mut grads = Gradients::zeros_like(m);
    let n_layers = m.layers.len();
    let mut loss = 0.0;

    for s in 0..data.len() {
        m.forward_into(data.inputs.row(s), &mut ws);

        // Output layer: dL/dn = -2 e f'(n).
        let last = n_layers - 1;
        let out = &ws.activations[n_layers];
        let f = m.layers[last].transfer;
        for ((d, &o), &t) in ws.deltas[last].iter_mut().zip(out).zip(data.targets.row(s)) {
            let e = t - o;
            loss += e * e;
            *d = -2.0 * e * f.derivative_from_output(o);
        }

        // Hidden layers: delta_k = f'(n_k) * W_{k+1}ᵀ delta_{k+1}.
        for k in (0..last).rev() {
            let (lo, hi) = ws.deltas.split_at_mut(k + 1);
            let (dk, dnext) = (&mut lo[k], &hi[0]);
            let wn = &m.layers[k + 1].weights;
            let f = m.layers[k].transfer;
            let a = &ws.activations[k + 1];
            for (j, dj) in dk.iter_mut().enumerate() {
                let back: f64 = (0..wn.rows()).map(|i| wn[(i, j)] * dnext[i]).sum();
                *dj = back * f.derivative_from_output(a[j]);
            }
        }

        for (k, g) in grads.layers.iter_mut().enumerate() {
            let a_prev = &ws.activations[k];
            let delta = &ws.deltas[k];
            let n_in = a_prev.len();
            let dw = g.dw.as_mut_slice();
            for (i, &di) in delta.iter().enumerate() {
                g.db[i] += di;
                for (w, &a) in dw[i * n_in..(i + 1) * n_in].iter_mut().zip(a_prev) {
                    *w += di * a;
                }
            }
        }
    }
    Ok((loss, grads))
}

/// Worst discrepancy between [`gradients`] and central differences of
/// [`loss_sse`] over every parameter, as `|a - fd| / max(|a|, |fd|, 1)`.
pub fn check_gradients(m: &MlpModel, data: &Samples, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::param("finite-difference step must be positive"));
    }
    let analytic = gradients(m, data)?.flatten();
    let mut probe = m.clone();
    let mut worst = 0.0_f64;
    for (idx, &a) in analytic.iter().enumerate() {
        let orig = *probe.param_mut(idx);
        *probe.param_mut(idx) = orig + step;
        let plus = loss_sse(&probe, data)?;
        *probe.param_mut(idx) = orig - step;
        let minus = loss_sse(&probe, data)?;
        *probe.param_mut(idx) = orig;
        let fd = (plus - minus) / (2.0 * step);
        let rel = (a - fd).abs() / a.abs().max(fd.abs()).max(1.0);
        worst = worst.max(rel);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Stop once `|loss_k - loss_{k-1}|` falls below this.
    pub stop_tolerance: f64,
    pub max_epochs: usize,
    pub init_seed: u64,
    pub init_scheme: InitScheme,
}

impl TrainConfig {
    /// Single purelin neuron started at `(w, b) = (1, -1)` with step 0.001,
    /// tolerance 1e-6 and at most 100 epochs.
    pub fn classic_siso() -> Self {
        Self {
            learning_rate: 0.001,
            stop_tolerance: 1.0e-6,
            max_epochs: 100,
            init_seed: 0,
            init_scheme: InitScheme::Explicit {
                weights: vec![DenseMatrix::new(1, 1, vec![1.0]).expect("1x1")],
                biases: vec![vec![-1.0]],
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::param("learning rate must be positive and finite"));
        }
        if !(self.stop_tolerance > 0.0) {
            return Err(Error::param("stop tolerance must be positive"));
        }
        if self.max_epochs == 0 {
            return Err(Error::param("max_epochs must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxEpochs,
    Diverged,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::MaxEpochs => "max_epochs",
            StopReason::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Loss at the start of every epoch, before that epoch's update.
    pub loss_history: Vec<f64>,
    pub epochs_run: usize,
    pub stop_reason: StopReason,
    pub wall_time_secs: f64,
}

impl TrainReport {
    pub fn final_loss(&self) -> Option<f64> {
        self.loss_history.last().copied()
    }
}

/// Full-batch steepest descent, `theta <- theta - alpha * dL/dtheta`.
///
/// Each epoch evaluates the loss at the current parameters and records it,
/// then stops if the loss is non-finite (diverged) or changed by less than
/// the tolerance since the previous epoch (converged); otherwise it
/// updates. The returned model holds the parameters the last recorded loss
/// was measured at.
pub fn train_steepest_descent(
    m: &MlpModel,
    data: &Samples,
    cfg: &TrainConfig,
) -> Result<(MlpModel, TrainReport)> {
    cfg.validate()?;
    data.check(m)?;
    let started = Instant::now();
    let mut model = m.clone();
    let mut history = Vec::new();
    let mut prev = INITIAL_PREVIOUS_LOSS;
    let mut reason = StopReason::MaxEpochs;

    for _ in 0..cfg.max_epochs {
        let (loss, grads) = loss_and_gradients(&model, data)?;
        history.push(loss);
        if !loss.is_finite() {
            reason = StopReason::Diverged;
            break;
        }
        if (loss - prev).abs() < cfg.stop_tolerance {
            reason = StopReason::Converged;
            break;
        }
        prev = loss;
        for (layer, g) in model.layers.iter_mut().zip(&grads.layers) {
            for (w, dw) in layer.weights.as_mut_slice().iter_mut().zip(g.dw.as_slice()) {
                *w -= cfg.learning_rate * dw;
            }
            for (b, db) in layer.biases.iter_mut().zip(&g.db) {
                *b -= cfg.learning_rate * db;
            }
        }
    }

    let report = TrainReport {
        epochs_run: history.len(),
        loss_history: history,
        stop_reason: reason,
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    Ok((model, report))
}
