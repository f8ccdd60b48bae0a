use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::geometry::SetParams;
use crate::guard::MemoryGuard;
use crate::parallel::map_indexed;
use crate::random::SeedSpec;

use super::stats::wilson_interval;

pub const DEFAULT_CONFIDENCE: f64 = 0.95;
pub const DEFAULT_C: f64 = 1.0;
pub const DEFAULT_A: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub dim_a: usize,
    pub dim_b: usize,
    pub trials: u64,
    pub seed: SeedSpec,
    /// `D = |B|`, `N = |A|` unless overridden.
    pub params: SetParams,
    pub confidence_level: f64,
}

impl ExperimentConfig {
    /// Checks dimensions and trial count against the guard from the environment.
    pub fn new(dim_a: usize, dim_b: usize, trials: u64, seed: SeedSpec) -> Result<Self> {
        Self::with_guard(dim_a, dim_b, trials, seed, &MemoryGuard::from_env())
    }

    pub fn with_guard(dim_a: usize, dim_b: usize, trials: u64, seed: SeedSpec, guard: &MemoryGuard) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(LabError::InvalidArgument("dimensions must be at least 1".into()));
        }
        if trials == 0 {
            return Err(LabError::InvalidArgument("trials must be at least 1".into()));
        }
        guard.check_channel(dim_a, dim_b)?;
        let params = SetParams::new(dim_b, dim_a, DEFAULT_C, DEFAULT_A)?;
        Ok(Self { dim_a, dim_b, trials, seed, params, confidence_level: DEFAULT_CONFIDENCE })
    }

    pub fn with_params(mut self, params: SetParams) -> Result<Self> {
        if params.d != self.dim_b {
            return Err(LabError::DimensionMismatch { expected: self.dim_b, found: params.d });
        }
        self.params = params;
        Ok(self)
    }

    pub fn with_confidence(mut self, level: f64) -> Result<Self> {
        super::stats::z_for_confidence(level)?;
        self.confidence_level = level;
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// The claim is `Pr(event) ≤ bound`.
    Upper,
    /// The claim is `Pr(event) ≥ bound`.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub suite: String,
    pub config: ExperimentConfig,
    /// Suite arguments beyond the config (ε, α, ...).
    pub parameters: BTreeMap<String, f64>,
    pub successes: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub analytic_bound: Option<f64>,
    pub bound_kind: Option<BoundKind>,
    pub bound_satisfied: Option<bool>,
    pub bound_vacuous: bool,
    pub checks: Vec<Check>,
    pub metrics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub runtime_seconds: f64,
    pub csv_path: Option<String>,
}

impl ExperimentReport {
    /// Frequency report with a Wilson interval and no bound yet.
    pub fn from_counts(suite: &str, config: &ExperimentConfig, successes: u64, started: Instant) -> Result<Self> {
        let ci = wilson_interval(successes, config.trials, config.confidence_level)?;
        Ok(Self {
            suite: suite.to_string(),
            config: *config,
            parameters: BTreeMap::new(),
            successes,
            estimate: successes as f64 / config.trials as f64,
            ci_low: ci.low,
            ci_high: ci.high,
            analytic_bound: None,
            bound_kind: None,
            bound_satisfied: None,
            bound_vacuous: false,
            checks: Vec::new(),
            metrics: BTreeMap::new(),
            warnings: Vec::new(),
            runtime_seconds: started.elapsed().as_secs_f64(),
            csv_path: None,
        })
    }

    /// Records an upper-bound claim: satisfied iff the Wilson lower end is at
    /// most `min(1, bound)`. A bound `≥ 1` is flagged vacuous.
    pub fn with_upper_bound(mut self, bound: f64) -> Self {
        let cap = bound.min(1.0);
        let ok = self.ci_low <= cap;
        self.analytic_bound = Some(bound);
        self.bound_kind = Some(BoundKind::Upper);
        self.bound_satisfied = Some(ok);
        self.bound_vacuous = bound >= 1.0;
        if self.bound_vacuous {
            self.warnings.push(format!("analytic bound {bound:.6e} ≥ 1 is vacuous at these parameters"));
        }
        let detail = format!("ci_low {:.6e} vs min(1, bound) {cap:.6e}", self.ci_low);
        self.check("empirical_le_bound", ok, detail)
    }

    /// Records a lower-bound claim: satisfied iff the Wilson upper end is at
    /// least the bound. A bound `≤ 0` is flagged vacuous.
    pub fn with_lower_bound(mut self, bound: f64) -> Self {
        let ok = self.ci_high >= bound;
        self.analytic_bound = Some(bound);
        self.bound_kind = Some(BoundKind::Lower);
        self.bound_satisfied = Some(ok);
        self.bound_vacuous = bound <= 0.0;
        if self.bound_vacuous {
            self.warnings.push(format!("analytic lower bound {bound:.6e} ≤ 0 is vacuous"));
        }
        let detail = format!("ci_high {:.6e} vs bound {bound:.6e}", self.ci_high);
        self.check("empirical_ge_bound", ok, detail)
    }

    pub fn check(mut self, name: &str, passed: bool, detail: String) -> Self {
        self.checks.push(Check { name: name.to_string(), passed, detail });
        self
    }

    pub fn metric(mut self, name: &str, value: f64) -> Self {
        self.metrics.insert(name.to_string(), value);
        self
    }

    pub fn parameter(mut self, name: &str, value: f64) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    pub fn warn(mut self, message: String) -> Self {
        self.warnings.push(message);
        self
    }

    pub fn finish(mut self, started: Instant) -> Self {
        self.runtime_seconds = started.elapsed().as_secs_f64();
        self
    }

    pub fn ci_text(&self) -> String {
        format!("[{:.6e}, {:.6e}]", self.ci_low, self.ci_high)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Copy with the wall-clock field zeroed, for reproducibility comparisons.
    pub fn without_runtime(&self) -> Self {
        Self { runtime_seconds: 0.0, ..self.clone() }
    }
}

/// Runs `trial` for every index in `0..config.trials`, each with its own
/// generator from `config.seed.child(index)`. Results come back in index order.
pub fn run_trials<T, F>(config: &ExperimentConfig, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> Result<T> + Sync + Send,
{
    let results = map_indexed(config.trials as usize, |i| {
        let i = i as u64;
        let mut rng = config.seed.child(i).rng();
        trial(i, &mut rng).map_err(|e| match e {
            LabError::TrialFailed { .. } => e,
            other => LabError::TrialFailed { trial: i, message: other.to_string() },
        })
    });
    results.into_iter().collect()
}

/// Frequency of `event` over independent trials, with a Wilson interval.
pub fn estimate_probability<F>(config: &ExperimentConfig, event: F) -> Result<ExperimentReport>
where
    F: Fn(u64, &mut ChaCha8Rng) -> Result<bool> + Sync + Send,
{
    let started = Instant::now();
    let hits = run_trials(config, event)?;
    let successes = hits.iter().filter(|&&h| h).count() as u64;
    ExperimentReport::from_counts("probability", config, successes, started)
}

pub(crate) fn count(flags: impl IntoIterator<Item = bool>) -> u64 {
    flags.into_iter().filter(|&f| f).count() as u64
}

/// Writes serializable rows as CSV with a header line.
pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let io_err = |e: csv::Error| LabError::InvalidArgument(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    for row in rows {
        w.serialize(row).map_err(io_err)?;
    }
    w.flush().map_err(|e| LabError::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}
