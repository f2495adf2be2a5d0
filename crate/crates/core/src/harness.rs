//! Seeded multi-trial experiments: evaluations-to-tolerance, success rates
//! and summary statistics.
//!
//! A trial succeeds when `best_value - known_min <= tolerance` is observed
//! at an iteration boundary before the budget runs out. Its
//! `evaluations_used` is then the count at that first boundary. Summary means
//! and standard deviations are taken over successful trials only; the
//! success rate is reported separately over all trials.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{run_ga, run_pso, GaParams, PsoParams};
use crate::bat::{run_bat, BatParams};
use crate::benchmarks::BenchmarkSpec;
use crate::error::{Error, Result};
use crate::trajectory::TrajectorySink;
use crate::{RunReport, StopTarget};

pub use crate::trajectory::TrajectoryRecord;

/// Default success tolerance on the function-value error.
pub const DEFAULT_TOLERANCE: f64 = 1e-5;
/// Default evaluation budget per trial.
pub const DEFAULT_MAX_EVALUATIONS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Bat,
    Pso,
    Ga,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Bat, Algorithm::Pso, Algorithm::Ga];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Bat => "bat",
            Algorithm::Pso => "pso",
            Algorithm::Ga => "ga",
        }
    }

    fn seed_tag(self) -> u64 {
        match self {
            Algorithm::Bat => 1,
            Algorithm::Pso => 2,
            Algorithm::Ga => 3,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bat" | "ba" => Ok(Algorithm::Bat),
            "pso" => Ok(Algorithm::Pso),
            "ga" => Ok(Algorithm::Ga),
            _ => Err(Error::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// An algorithm together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum AlgorithmConfig {
    Bat(BatParams),
    Pso(PsoParams),
    Ga(GaParams),
}

impl AlgorithmConfig {
    pub fn default_for(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::Bat => AlgorithmConfig::Bat(BatParams::default()),
            Algorithm::Pso => AlgorithmConfig::Pso(PsoParams::default()),
            Algorithm::Ga => AlgorithmConfig::Ga(GaParams::default()),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            AlgorithmConfig::Bat(_) => Algorithm::Bat,
            AlgorithmConfig::Pso(_) => Algorithm::Pso,
            AlgorithmConfig::Ga(_) => Algorithm::Ga,
        }
    }

    pub fn population(&self) -> usize {
        match self {
            AlgorithmConfig::Bat(p) => p.population,
            AlgorithmConfig::Pso(p) => p.population,
            AlgorithmConfig::Ga(p) => p.population,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AlgorithmConfig::Bat(p) => p.validate(),
            AlgorithmConfig::Pso(p) => p.validate(),
            AlgorithmConfig::Ga(p) => p.validate(),
        }
    }

    /// Dispatch to the matching driver. A budget too small to initialize the
    /// population yields an unstarted report rather than an error.
    pub fn run(
        &self,
        spec: &BenchmarkSpec,
        seed: u64,
        max_evaluations: u64,
        stop: Option<StopTarget>,
        recorder: Option<&mut dyn TrajectorySink>,
    ) -> Result<RunReport> {
        let obj = &spec.objective;
        let outcome = match self {
            AlgorithmConfig::Bat(p) => {
                run_bat(p, obj, seed, max_evaluations, stop, recorder).map(|(_, r)| r)
            }
            AlgorithmConfig::Pso(p) => run_pso(p, obj, seed, max_evaluations, stop, recorder),
            AlgorithmConfig::Ga(p) => run_ga(p, obj, seed, max_evaluations, stop, recorder),
        };
        match outcome {
            Err(Error::BudgetExceeded { .. }) => Ok(RunReport::not_started()),
            other => other,
        }
    }
}

/// Outcome of one seeded trial.
///
/// Equality compares every field except `wall_time`, which is the only
/// non-reproducible quantity.
#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    pub algorithm: Algorithm,
    pub function: String,
    pub dim: usize,
    pub seed: u64,
    /// Evaluations at first success, or the total spent on failure.
    pub evaluations_used: u64,
    pub success: bool,
    pub best_value: f64,
    pub iterations: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl PartialEq for TrialResult {
    fn eq(&self, other: &Self) -> bool {
        self.algorithm == other.algorithm
            && self.function == other.function
            && self.dim == other.dim
            && self.seed == other.seed
            && self.evaluations_used == other.evaluations_used
            && self.success == other.success
            && self.best_value.to_bits() == other.best_value.to_bits()
            && self.iterations == other.iterations
    }
}

/// Run one trial. With `tolerance` set the run stops at first success and the
/// spec must carry a known minimum.
pub fn run_trial(
    config: &AlgorithmConfig,
    spec: &BenchmarkSpec,
    tolerance: Option<f64>,
    max_evaluations: u64,
    seed: u64,
    recorder: Option<&mut dyn TrajectorySink>,
) -> Result<TrialResult> {
    config.validate()?;
    let stop = match tolerance {
        Some(tol) => {
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(Error::param(format!(
                    "tolerance must be non-negative, got {tol}"
                )));
            }
            let known_min = spec
                .objective
                .known_min()
                .ok_or_else(|| Error::MissingOptimum(spec.name.to_string()))?;
            Some(StopTarget {
                known_min,
                tolerance: tol,
            })
        }
        None => None,
    };

    let started = Instant::now();
    let report = config.run(spec, seed, max_evaluations, stop, recorder)?;
    let wall_time = started.elapsed();

    let success = report.evaluations_at_target.is_some();
    Ok(TrialResult {
        algorithm: config.algorithm(),
        function: spec.name.to_string(),
        dim: spec.dim(),
        seed,
        evaluations_used: report
            .evaluations_at_target
            .unwrap_or(report.evaluations_used),
        success,
        best_value: report.best_value,
        iterations: report.iterations,
        wall_time,
    })
}

/// Bijective 64-bit mixer (SplitMix64 finalizer).
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `k` of `algorithm` under `master_seed`.
///
/// `(tag << 40) | k` is injective for `k < 2^40`, and XOR with a fixed value
/// followed by a bijective mix keeps it injective, so distinct
/// `(algorithm, k)` pairs never share a seed.
pub fn derive_seed(master_seed: u64, algorithm: Algorithm, trial: u64) -> u64 {
    debug_assert!(trial < 1 << 40);
    mix64(mix64(master_seed) ^ ((algorithm.seed_tag() << 40) | trial))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Aggregate over a set of trials of one algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    /// Mean evaluations over successful trials; absent with no successes.
    pub mean_evals: Option<f64>,
    /// Sample standard deviation (divisor `s - 1`) over successful trials;
    /// absent with fewer than two successes.
    pub std_evals: Option<f64>,
    pub success_rate: f64,
    pub trial_count: usize,
}

pub fn summarize(results: &[TrialResult]) -> Result<ExperimentSummary> {
    if results.is_empty() {
        return Err(Error::EmptyResults);
    }
    let evals: Vec<f64> = results
        .iter()
        .filter(|r| r.success)
        .map(|r| r.evaluations_used as f64)
        .collect();
    let s = evals.len();
    let mean = (s > 0).then(|| evals.iter().sum::<f64>() / s as f64);
    let std = match mean {
        Some(m) if s > 1 => {
            let ss: f64 = evals.iter().map(|e| (e - m).powi(2)).sum();
            Some((ss / (s - 1) as f64).sqrt())
        }
        _ => None,
    };
    Ok(ExperimentSummary {
        mean_evals: mean,
        std_evals: std,
        success_rate: s as f64 / results.len() as f64,
        trial_count: results.len(),
    })
}

/// All trials and the summary for one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRuns {
    pub algorithm: Algorithm,
    pub trials: Vec<TrialResult>,
    pub summary: ExperimentSummary,
}

/// Run `trials` seeded trials per algorithm. Trials may execute in parallel;
/// results are ordered by trial index, so the output does not depend on
/// scheduling.
pub fn run_experiment(
    configs: &[AlgorithmConfig],
    spec: &BenchmarkSpec,
    tolerance: Option<f64>,
    max_evaluations: u64,
    trials: u64,
    master_seed: u64,
    execution: Execution,
) -> Result<Vec<AlgorithmRuns>> {
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    configs
        .iter()
        .map(|config| {
            let algorithm = config.algorithm();
            let one = |k: u64| {
                let seed = derive_seed(master_seed, algorithm, k);
                run_trial(config, spec, tolerance, max_evaluations, seed, None)
            };
            let results: Vec<TrialResult> = match execution {
                Execution::Sequential => (0..trials).map(one).collect::<Result<_>>()?,
                Execution::Parallel => (0..trials)
                    .into_par_iter()
                    .map(one)
                    .collect::<Result<_>>()?,
            };
            let summary = summarize(&results)?;
            Ok(AlgorithmRuns {
                algorithm,
                trials: results,
                summary,
            })
        })
        .collect()
}
