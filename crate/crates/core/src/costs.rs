//! End-to-end cost of a surrogate: `T_total = T_dg + T_nt + N * T_pr`,
//! and the prediction count at which it undercuts `N` direct solves.

use std::time::Instant;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostLedger {
    /// Data generation, seconds.
    pub t_dg: f64,
    /// Network training, seconds.
    pub t_nt: f64,
    /// One warm surrogate prediction, seconds (median).
    pub t_pr: f64,
    /// One high-fidelity solve, seconds (median).
    pub t_solve: f64,
    pub n_predictions: u64,
    pub repetitions: usize,
    #[serde(default)]
    pub t_pr_samples: Vec<f64>,
    #[serde(default)]
    pub t_solve_samples: Vec<f64>,
    /// First prediction of the process, timed before the warm repetitions.
    #[serde(default)]
    pub t_pr_cold: Option<f64>,
}

impl CostLedger {
    /// Ledger from known times, e.g. for what-if analysis.
    pub fn from_times(t_dg: f64, t_nt: f64, t_pr: f64, t_solve: f64, n_predictions: u64) -> Self {
        Self {
            t_dg,
            t_nt,
            t_pr,
            t_solve,
            n_predictions,
            repetitions: 1,
            t_pr_samples: vec![],
            t_solve_samples: vec![],
            t_pr_cold: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_dg", self.t_dg),
            ("t_nt", self.t_nt),
            ("t_pr", self.t_pr),
            ("t_solve", self.t_solve),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::param(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if self.repetitions == 0 {
            return Err(Error::param("repetitions must be at least 1"));
        }
        Ok(())
    }

    /// Total surrogate time for `n` predictions.
    pub fn total_time_for(&self, n: u64) -> f64 {
        self.t_dg + self.t_nt + n as f64 * self.t_pr
    }

    /// Whether `n` predictions are strictly cheaper via the surrogate.
    pub fn beneficial_at(&self, n: u64) -> bool {
        self.total_time_for(n) < n as f64 * self.t_solve
    }
}

pub fn total_time(l: &CostLedger) -> f64 {
    l.total_time_for(l.n_predictions)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreakEven {
    /// Smallest prediction count at which the surrogate is strictly cheaper.
    At(u64),
    /// Predictions are no cheaper than solves.
    Never,
}

impl std::fmt::Display for BreakEven {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BreakEven::At(n) => write!(f, "{n}"),
            BreakEven::Never => f.write_str("never"),
        }
    }
}

// JSON form: the count as a number, or the string "never".
impl Serialize for BreakEven {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BreakEven::At(n) => s.serialize_u64(*n),
            BreakEven::Never => s.serialize_str("never"),
        }
    }
}

impl<'de> Deserialize<'de> for BreakEven {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            N(u64),
            S(String),
        }
        match Wire::deserialize(d)? {
            Wire::N(n) => Ok(BreakEven::At(n)),
            Wire::S(s) if s == "never" => Ok(BreakEven::Never),
            Wire::S(s) => Err(serde::de::Error::custom(format!(
                "expected \"never\", got {s:?}"
            ))),
        }
    }
}

/// Smallest `N >= 1` with `t_dg + t_nt + N t_pr < N t_solve`.
///
/// The closed form `floor((t_dg + t_nt) / (t_solve - t_pr)) + 1` is
/// corrected against the floating-point comparison itself, so it agrees
/// with a linear scan of [`CostLedger::beneficial_at`].
pub fn break_even(l: &CostLedger) -> Result<BreakEven> {
    l.validate()?;
    if !(l.t_solve > 0.0) {
        return Err(Error::param("t_solve must be positive"));
    }
    if l.t_pr >= l.t_solve {
        return Ok(BreakEven::Never);
    }
    let setup = l.t_dg + l.t_nt;
    let estimate = (setup / (l.t_solve - l.t_pr)).floor() + 1.0;
    if !(estimate < u64::MAX as f64 / 2.0) {
        return Err(Error::param("break-even count does not fit in 64 bits"));
    }
    let mut n = (estimate as u64).max(1);
    while n > 1 && l.beneficial_at(n - 1) {
        n -= 1;
    }
    while !l.beneficial_at(n) {
        n += 1;
    }
    Ok(BreakEven::At(n))
}

/// Times that come from the pipeline itself rather than from `measure`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerDraft {
    pub t_dg: f64,
    pub t_nt: f64,
    pub n_predictions: u64,
}

pub fn median(samples: &[f64]) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let mid = s.len() / 2;
    Some(if s.len() % 2 == 1 {
        s[mid]
    } else {
        0.5 * (s[mid - 1] + s[mid])
    })
}

fn time_once(f: &mut impl FnMut()) -> f64 {
    let t = Instant::now();
    f();
    t.elapsed().as_secs_f64()
}

/// Fills in `t_pr` and `t_solve` as medians over `repetitions` calls of
/// `predict` and `solve`. The first `predict` call is timed separately as
/// the cold start and not included in the median.
pub fn measure(
    draft: LedgerDraft,
    repetitions: usize,
    mut predict: impl FnMut(),
    mut solve: impl FnMut(),
) -> Result<CostLedger> {
    if repetitions == 0 {
        return Err(Error::param("repetitions must be at least 1"));
    }
    let cold = time_once(&mut predict);
    let t_pr_samples: Vec<f64> = (0..repetitions).map(|_| time_once(&mut predict)).collect();
    let t_solve_samples: Vec<f64> = (0..repetitions).map(|_| time_once(&mut solve)).collect();
    let ledger = CostLedger {
        t_dg: draft.t_dg,
        t_nt: draft.t_nt,
        t_pr: median(&t_pr_samples).expect("repetitions >= 1"),
        t_solve: median(&t_solve_samples).expect("repetitions >= 1"),
        n_predictions: draft.n_predictions,
        repetitions,
        t_pr_samples,
        t_solve_samples,
        t_pr_cold: Some(cold),
    };
    ledger.validate()?;
    Ok(ledger)
}

/// What the experiments ran on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineDescriptor {
    pub os: String,
    pub arch: String,
    pub logical_cpus: usize,
    pub cpu_model: Option<String>,
    pub total_memory_kib: Option<u64>,
    pub worker_threads: usize,
}

impl MachineDescriptor {
    pub fn capture(worker_threads: usize) -> Self {
        let cpuinfo = std::fs::read_to_string("/proc/cpuinfo").unwrap_or_default();
        let cpu_model = cpuinfo
            .lines()
            .find(|l| l.starts_with("model name"))
            .and_then(|l| l.split(':').nth(1))
            .map(|s| s.trim().to_string());
        let meminfo = std::fs::read_to_string("/proc/meminfo").unwrap_or_default();
        let total_memory_kib = meminfo
            .lines()
            .find(|l| l.starts_with("MemTotal:"))
            .and_then(|l| l.split_whitespace().nth(1))
            .and_then(|v| v.parse().ok());
        Self {
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            logical_cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cpu_model,
            total_memory_kib,
            worker_threads,
        }
    }
}
