//! The 1D Poisson problem `-y'' = g` on `[x0, x1]` with Dirichlet ends.
//!
//! Two solvers share a uniform grid: the closed form for constant `g`, and
//! second-order central differences reduced to a tridiagonal system. Central
//! differences are exact on quadratics, so the two agree to rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_tridiagonal, TridiagonalSystem};

pub const DEFAULT_NODES: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonProblem {
    /// Constant source term.
    pub g: f64,
    pub x0: f64,
    pub x1: f64,
    /// Value prescribed at `x0`.
    pub y0: f64,
    /// Value prescribed at `x1`.
    pub y1: f64,
}

impl PoissonProblem {
    pub fn new(g: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let p = Self { g, x0, x1, y0, y1 };
        p.validate()?;
        Ok(p)
    }

    /// Problem on the unit interval.
    pub fn unit(g: f64, y0: f64, y1: f64) -> Self {
        Self {
            g,
            x0: 0.0,
            x1: 1.0,
            y0,
            y1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.g, self.x0, self.x1, self.y0, self.y1];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("Poisson problem fields must be finite"));
        }
        if !(self.x0 < self.x1) {
            return Err(Error::param(format!(
                "domain must satisfy x0 < x1, got [{}, {}]",
                self.x0, self.x1
            )));
        }
        Ok(())
    }

    /// Closed-form solution at `x`.
    pub fn exact(&self, x: f64) -> f64 {
        let len = self.x1 - self.x0;
        let slope = (self.y1 - self.y0 + 0.5 * self.g * len * len) / len;
        let s = x - self.x0;
        -0.5 * self.g * s * s + slope * s + self.y0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Analytic,
    Fdm,
    Surrogate,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::Fdm => "fdm",
            Provenance::Surrogate => "surrogate",
        }
    }
}

/// Nodal values on a grid, tagged with where they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionField {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl SolutionField {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::shape(format!(
                "solution field needs >= 2 nodes with one value each, got {} nodes and {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::shape("solution nodes must be strictly increasing"));
        }
        Ok(Self {
            nodes,
            values,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Piecewise-linear interpolation at `x`, clamped to the end values.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.nodes.len();
        if x <= self.nodes[0] {
            return self.values[0];
        }
        if x >= self.nodes[n - 1] {
            return self.values[n - 1];
        }
        let k = self
            .nodes
            .partition_point(|&xi| xi <= x)
            .saturating_sub(1)
            .min(n - 2);
        let (xa, xb) = (self.nodes[k], self.nodes[k + 1]);
        let t = (x - xa) / (xb - xa);
        self.values[k] + t * (self.values[k + 1] - self.values[k])
    }
}

/// `n` uniformly spaced nodes from `x0` to `x1`; both ends are exact.
pub fn uniform_grid(x0: f64, x1: f64, n: usize) -> Vec<f64> {
    let h = (x1 - x0) / (n - 1) as f64;
    let mut nodes: Vec<f64> = (0..n).map(|i| x0 + i as f64 * h).collect();
    nodes[n - 1] = x1;
    nodes
}

pub fn solve_analytic(p: &PoissonProblem, n_nodes: usize) -> Result<SolutionField> {
    p.validate()?;
    if n_nodes < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 nodes, got {n_nodes}"
        )));
    }
    let nodes = uniform_grid(p.x0, p.x1, n_nodes);
    let mut values: Vec<f64> = nodes.iter().map(|&x| p.exact(x)).collect();
    values[0] = p.y0;
    values[n_nodes - 1] = p.y1;
    Ok(SolutionField {
        nodes,
        values,
        provenance: Provenance::Analytic,
    })
}

/// Central differences `(-u[i-1] + 2u[i] - u[i+1]) / h² = g` at interior nodes
/// with the Dirichlet values eliminated into the right-hand side.
pub fn solve_fdm(p: &PoissonProblem, n_nodes: usize) -> Result<SolutionField> {
    p.validate()?;
    if n_nodes < 3 {
        return Err(Error::InvalidGrid(format!(
            "finite differences need at least 3 nodes, got {n_nodes}"
        )));
    }
    let nodes = uniform_grid(p.x0, p.x1, n_nodes);
    let h = (p.x1 - p.x0) / (n_nodes - 1) as f64;
    let m = n_nodes - 2;

    let mut rhs = vec![h * h * p.g; m];
    rhs[0] += p.y0;
    rhs[m - 1] += p.y1;
    let sys = TridiagonalSystem::new(vec![-1.0; m - 1], vec![2.0; m], vec![-1.0; m - 1], rhs)?;
    let interior = solve_tridiagonal(&sys)?;

    let mut values = Vec::with_capacity(n_nodes);
    values.push(p.y0);
    values.extend_from_slice(interior.as_slice());
    values.push(p.y1);
    Ok(SolutionField {
        nodes,
        values,
        provenance: Provenance::Fdm,
    })
}

/// Labelled demo set on the unit interval. The combinations are a choice of
/// this crate: four visibly different `(g, y0, y1)` triples.
pub fn figure1_demo_problems() -> Vec<(String, PoissonProblem)> {
    [
        (0.0, 0.0, 1.0),
        (2.0, 0.0, 0.0),
        (-2.0, 1.0, 0.0),
        (4.0, 1.0, 1.0),
    ]
    .into_iter()
    .map(|(g, y0, y1)| {
        (
            format!("g={g},y0={y0},y1={y1}"),
            PoissonProblem::unit(g, y0, y1),
        )
    })
    .collect()
}

/// Analytic solutions for each problem, in order.
pub fn sweep_figure1(problems: &[PoissonProblem], n_nodes: usize) -> Result<Vec<SolutionField>> {
    if problems.is_empty() {
        return Err(Error::param("sweep needs at least one problem"));
    }
    problems
        .iter()
        .map(|p| solve_analytic(p, n_nodes))
        .collect()
}
