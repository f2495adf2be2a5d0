use serde::Serialize;

use crate::domain::{
    counted_evaluate, uniform_sample, Bounds, EvalBudget, Objective, Point, RandomStream,
    UnitSource,
};
use crate::error::{Error, Result};
use crate::trajectory::{TrajectoryRecord, TrajectorySink};
use crate::{RunReport, StopTarget};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaParams {
    pub population: usize,
    /// Per-gene mutation probability.
    pub p_mutation: f64,
    /// Probability that a selected pair is recombined.
    pub p_crossover: f64,
    pub max_generations: u64,
    /// Gaussian mutation sigma as a fraction of the coordinate range.
    pub mutation_scale: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population: 40,
            p_mutation: 0.05,
            p_crossover: 0.95,
            max_generations: 10_000,
            mutation_scale: 0.1,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::param("GA population needs at least 2 individuals"));
        }
        for (name, p) in [
            ("p_mutation", self.p_mutation),
            ("p_crossover", self.p_crossover),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        if !(self.mutation_scale >= 0.0 && self.mutation_scale.is_finite()) {
            return Err(Error::param("mutation scale must be non-negative"));
        }
        if self.max_generations == 0 {
            return Err(Error::param("max_generations must be positive"));
        }
        Ok(())
    }
}

/// Selection weights: the best individual gets weight `n`, the worst `1`.
/// Equal values keep index order.
pub fn rank_weights(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let n = values.len();
    let mut weights = vec![0.0; n];
    for (rank, &idx) in order.iter().enumerate() {
        weights[idx] = (n - rank) as f64;
    }
    weights
}

/// Roulette-wheel pick over cumulative weights. Consumes one draw.
pub fn roulette(cumulative: &[f64], rng: &mut impl UnitSource) -> usize {
    let total = *cumulative.last().expect("non-empty wheel");
    let target = rng.unit() * total;
    cumulative
        .partition_point(|&c| c <= target)
        .min(cumulative.len() - 1)
}

/// Two children from one pairing, with operator bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Offspring {
    pub children: [Vec<f64>; 2],
    pub crossed: bool,
    pub mutated_genes: usize,
}

/// Uniform crossover with probability `p_crossover`, then per-gene Gaussian
/// mutation with probability `p_mutation`, then clamping.
pub fn breed(
    a: &[f64],
    b: &[f64],
    params: &GaParams,
    bounds: &Bounds,
    rng: &mut RandomStream,
) -> Offspring {
    let mut first = a.to_vec();
    let mut second = b.to_vec();
    let crossed = rng.unit() < params.p_crossover;
    if crossed {
        for k in 0..first.len() {
            if rng.unit() < 0.5 {
                std::mem::swap(&mut first[k], &mut second[k]);
            }
        }
    }
    let mut mutated_genes = 0;
    for child in [&mut first, &mut second] {
        for (k, gene) in child.iter_mut().enumerate() {
            if rng.unit() < params.p_mutation {
                *gene += params.mutation_scale * bounds.width(k) * rng.standard_normal();
                mutated_genes += 1;
            }
        }
        bounds.clamp_in_place(child);
    }
    Offspring {
        children: [first, second],
        crossed,
        mutated_genes,
    }
}

/// Replace the whole population with `n` offspring of rank-proportionally
/// selected parents. No individual survives unchanged by right.
pub fn next_generation(
    population: &[Point],
    values: &[f64],
    params: &GaParams,
    bounds: &Bounds,
    rng: &mut RandomStream,
) -> Vec<Point> {
    let cumulative: Vec<f64> = rank_weights(values)
        .into_iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let n = population.len();
    let mut next = Vec::with_capacity(n + 1);
    while next.len() < n {
        let a = &population[roulette(&cumulative, rng)];
        let b = &population[roulette(&cumulative, rng)];
        let Offspring { children, .. } = breed(a, b, params, bounds, rng);
        next.extend(children.into_iter().map(Point::from_clamped));
    }
    next.truncate(n);
    next
}

pub fn run_ga(
    params: &GaParams,
    obj: &Objective,
    seed: u64,
    max_evaluations: u64,
    stop: Option<StopTarget>,
    mut recorder: Option<&mut dyn TrajectorySink>,
) -> Result<RunReport> {
    params.validate()?;
    let mut budget = EvalBudget::new(max_evaluations)?;
    let n = params.population as u64;
    if budget.remaining() < n {
        return Err(Error::BudgetExceeded {
            max: max_evaluations,
        });
    }
    let mut rng = RandomStream::new(seed);
    let bounds = obj.bounds();

    let mut population: Vec<Point> = (0..params.population)
        .map(|_| uniform_sample(bounds, &mut rng))
        .collect();
    let mut values = population
        .iter()
        .map(|x| counted_evaluate(obj, x, &mut budget))
        .collect::<Result<Vec<f64>>>()?;

    // Best-ever is tracked for reporting only and never reinserted.
    let mut best = (f64::INFINITY, None::<Point>);
    let mut track = |pop: &[Point], vals: &[f64]| {
        for (x, &v) in pop.iter().zip(vals) {
            if v < best.0 {
                best = (v, Some(x.clone()));
            }
        }
        best.0
    };
    let mut best_value = track(&population, &values);

    let reached = |v: f64| stop.is_some_and(|s| s.reached(v));
    let mut at_target = reached(best_value).then(|| budget.used());
    let mut generations = 0;
    let mut exhausted = false;

    while at_target.is_none() && generations < params.max_generations {
        if budget.remaining() < n {
            exhausted = true;
            break;
        }
        population = next_generation(&population, &values, params, bounds, &mut rng);
        values = population
            .iter()
            .map(|x| counted_evaluate(obj, x, &mut budget))
            .collect::<Result<Vec<f64>>>()?;
        best_value = track(&population, &values);
        generations += 1;
        if let Some(sink) = recorder.as_deref_mut() {
            sink.record(TrajectoryRecord {
                iteration: generations,
                positions: population.clone(),
                best_value,
            });
        }
        if reached(best_value) {
            at_target = Some(budget.used());
        }
    }

    Ok(RunReport {
        evaluations_used: budget.used(),
        evaluations_at_target: at_target,
        best_value,
        best_position: best.1,
        iterations: generations,
        budget_exhausted: exhausted,
    })
}
