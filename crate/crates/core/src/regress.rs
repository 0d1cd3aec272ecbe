//! Straight-line least squares: synthetic data, the `[x 1]` design matrix
//! and the pseudoinverse fit `beta = X⁺ y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pseudoinverse, DenseMatrix};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub seed: u64,
    pub noise_amplitude: f64,
    pub true_w: Option<f64>,
    pub true_b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDataset {
    inputs: Vec<f64>,
    targets: Vec<f64>,
    pub meta: DatasetMeta,
}

impl RegressionDataset {
    pub fn new(inputs: Vec<f64>, targets: Vec<f64>, meta: DatasetMeta) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::shape(format!(
                "{} inputs but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        if inputs.len() < 2 {
            return Err(Error::param(
                "a regression dataset needs at least 2 samples",
            ));
        }
        Ok(Self {
            inputs,
            targets,
            meta,
        })
    }

    /// Dataset without generation metadata.
    pub fn from_pairs(inputs: Vec<f64>, targets: Vec<f64>) -> Result<Self> {
        let meta = DatasetMeta {
            seed: 0,
            noise_amplitude: 0.0,
            true_w: None,
            true_b: None,
        };
        Self::new(inputs, targets, meta)
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same inputs, targets shifted by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        let targets = self.targets.iter().map(|y| y + c).collect();
        Self {
            inputs: self.inputs.clone(),
            targets,
            meta: self.meta.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub w: f64,
    pub b: f64,
}

impl LinearModel {
    pub fn predict(&self, x: f64) -> f64 {
        self.w * x + self.b
    }

    /// Sum of squared residuals on `d`.
    pub fn sse(&self, d: &RegressionDataset) -> f64 {
        d.inputs
            .iter()
            .zip(&d.targets)
            .map(|(&x, &y)| (y - self.predict(x)).powi(2))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n: usize,
    pub true_w: f64,
    pub true_b: f64,
    pub x_range: [f64; 2],
    pub noise_amplitude: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// `N = 100` points of `y = 2x - 4` on `[-4, 4]` with uniform noise of
    /// amplitude 2.
    pub fn classic(seed: u64) -> Self {
        Self {
            n: 100,
            true_w: 2.0,
            true_b: -4.0,
            x_range: [-4.0, 4.0],
            noise_amplitude: 2.0,
            seed,
        }
    }
}

/// `x ~ U[lo, hi)`, then `y = w x + b + e` with `e ~ U[-amp, amp)`.
///
/// All `x` are drawn first, then all noise terms, from one seeded stream.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<RegressionDataset> {
    let [lo, hi] = spec.x_range;
    if spec.n < 2 {
        return Err(Error::param("need at least 2 samples"));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::param(format!("invalid x range [{lo}, {hi}]")));
    }
    if !(spec.noise_amplitude >= 0.0) || !spec.noise_amplitude.is_finite() {
        return Err(Error::param("noise amplitude must be finite and >= 0"));
    }
    if !spec.true_w.is_finite() || !spec.true_b.is_finite() {
        return Err(Error::param("true parameters must be finite"));
    }
    let mut rng = rng::seeded(spec.seed);
    let inputs: Vec<f64> = (0..spec.n)
        .map(|_| rng::uniform(&mut rng, lo, hi))
        .collect();
    let amp = spec.noise_amplitude;
    let targets = inputs
        .iter()
        .map(|&x| {
            let e = if amp == 0.0 {
                0.0
            } else {
                rng::uniform(&mut rng, -amp, amp)
            };
            spec.true_w * x + spec.true_b + e
        })
        .collect();
    RegressionDataset::new(
        inputs,
        targets,
        DatasetMeta {
            seed: spec.seed,
            noise_amplitude: amp,
            true_w: Some(spec.true_w),
            true_b: Some(spec.true_b),
        },
    )
}

/// N×2 matrix with the inputs in the first column and ones in the second.
pub fn build_design_matrix(d: &RegressionDataset) -> DenseMatrix {
    DenseMatrix::from_fn(d.len(), 2, |i, j| if j == 0 { d.inputs[i] } else { 1.0 })
}

pub fn fit_least_squares(d: &RegressionDataset) -> Result<LinearModel> {
    let x = build_design_matrix(d);
    let pinv = pseudoinverse(&x).map_err(|e| match e {
        Error::Singular(msg) => Error::Singular(format!(
            "design matrix is rank deficient (are all inputs identical?): {msg}"
        )),
        other => other,
    })?;
    let beta = pinv.mul_vec(d.targets())?;
    Ok(LinearModel {
        w: beta[0],
        b: beta[1],
    })
}

/// `Xᵀ(y - X beta)`, zero at the least-squares optimum.
pub fn normal_residual(d: &RegressionDataset, m: &LinearModel) -> [f64; 2] {
    d.inputs
        .iter()
        .zip(&d.targets)
        .fold([0.0, 0.0], |[sx, s1], (&x, &y)| {
            let e = y - m.predict(x);
            [sx + x * e, s1 + e]
        })
}
