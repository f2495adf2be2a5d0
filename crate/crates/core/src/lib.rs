//! Bat Algorithm, particle swarm and genetic algorithm baselines, a suite of
//! continuous benchmark functions, and a seeded multi-trial experiment harness.
//!
//! Every algorithm draws its randomness from a [`RandomStream`] seeded by the
//! caller and charges every objective call against an [`EvalBudget`], so a
//! `(seed, params, objective)` triple fully determines a run.

pub mod baselines;
pub mod bat;
pub mod benchmarks;
pub mod domain;
pub mod error;
pub mod harness;
pub mod trajectory;

pub use baselines::{GaParams, PsoParams};
pub use bat::{BatParams, BatState};
pub use benchmarks::{benchmark_spec, evaluate_benchmark, BenchmarkSpec, Citation};
pub use domain::{
    clamp_to_bounds, counted_evaluate, uniform_sample, Bounds, EvalBudget, Objective, Point,
    RandomStream, UnitSource,
};
pub use error::{Error, Result};
pub use harness::{
    run_experiment, run_trial, summarize, Algorithm, AlgorithmConfig, Execution, ExperimentSummary,
    TrialResult,
};
pub use trajectory::{TrajectoryRecord, TrajectorySink};

/// Outcome shared by every optimizer driver.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// Objective calls charged against the budget, including initialization.
    pub evaluations_used: u64,
    /// Evaluation count at the first iteration boundary where the target was met.
    pub evaluations_at_target: Option<u64>,
    /// Best objective value observed (infinite when nothing was evaluated).
    pub best_value: f64,
    pub best_position: Option<Point>,
    /// Completed iterations (generations for the GA).
    pub iterations: u64,
    /// The run stopped because another full iteration would not fit the budget.
    pub budget_exhausted: bool,
}

impl RunReport {
    pub(crate) fn not_started() -> Self {
        Self {
            evaluations_used: 0,
            evaluations_at_target: None,
            best_value: f64::INFINITY,
            best_position: None,
            iterations: 0,
            budget_exhausted: true,
        }
    }
}

/// Early-stopping target: stop once `best - known_min <= tolerance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopTarget {
    pub known_min: f64,
    pub tolerance: f64,
}

impl StopTarget {
    pub fn reached(&self, best_value: f64) -> bool {
        best_value - self.known_min <= self.tolerance
    }
}
