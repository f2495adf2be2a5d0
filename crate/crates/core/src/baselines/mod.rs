//! Reference optimizers for comparison: global-best particle swarm and a
//! generational real-coded genetic algorithm without elitism.
//!
//! Both share the bat driver's contract: initialization costs `n`
//! evaluations, each iteration (generation) costs exactly `n` more, a new
//! iteration starts only if it fits the remaining budget, and the stop
//! target is checked at iteration boundaries.

pub mod ga;
pub mod pso;

pub use ga::{run_ga, GaParams};
pub use pso::{run_pso, PsoParams};
