//! The Bat Algorithm.
//!
//! Each bat carries a position, a velocity, a pulse frequency, a loudness
//! `A_i` and a pulse emission rate `r_i`. Every iteration, bat by bat:
//!
//! 1. draw a frequency `f_i = f_min + (f_max - f_min) * beta` and fly:
//!    `v <- v + (x - x_best) * f_i`, `x' <- clamp(x + v)`;
//! 2. with probability `1 - r_i` replace `x'` by a random walk around the
//!    global best, `x_best + eps * <A>`, where `<A>` is the mean loudness and
//!    `eps` is uniform in `[-1, 1]` per coordinate;
//! 3. evaluate `x'` (one objective call per bat per iteration);
//! 4. if `rand < A_i` and `f(x') < f(x_best)`, move the bat to `x'`, make it
//!    the new global best, shrink `A_i <- alpha * A_i` and reset
//!    `r_i <- r_i0 * (1 - exp(-gamma * t))`.
//!
//! Rejected bats keep their old position but keep the new velocity and
//! frequency.

use serde::Serialize;

use crate::domain::{
    counted_evaluate, uniform_sample, Bounds, EvalBudget, Objective, Point, RandomStream,
    UnitSource,
};
use crate::error::{Error, Result};
use crate::trajectory::{TrajectoryRecord, TrajectorySink};
use crate::{RunReport, StopTarget};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatParams {
    /// Number of bats `n`.
    pub population: usize,
    pub f_min: f64,
    pub f_max: f64,
    /// Loudness decay factor applied on each accepted move.
    pub alpha: f64,
    /// Pulse-rate growth constant.
    pub gamma: f64,
    /// Initial loudness is drawn uniformly from this interval.
    pub initial_loudness: (f64, f64),
    /// Initial pulse rate `r_i0` is drawn uniformly from this interval.
    pub initial_pulse_rate: (f64, f64),
    pub max_iterations: u64,
}

impl Default for BatParams {
    fn default() -> Self {
        Self {
            population: 40,
            f_min: 0.0,
            f_max: 100.0,
            alpha: 0.9,
            gamma: 0.9,
            initial_loudness: (1.0, 2.0),
            initial_pulse_rate: (0.0, 1.0),
            max_iterations: 10_000,
        }
    }
}

impl BatParams {
    pub fn validate(&self) -> Result<()> {
        if self.population == 0 {
            return Err(Error::param("bat population must be at least 1"));
        }
        if !(self.f_min >= 0.0 && self.f_min <= self.f_max && self.f_max.is_finite()) {
            return Err(Error::param(format!(
                "need 0 <= f_min <= f_max, got f_min={} f_max={}",
                self.f_min, self.f_max
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param(format!(
                "alpha must be in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::param(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        let (a_lo, a_hi) = self.initial_loudness;
        if !(a_lo > 0.0 && a_lo <= a_hi && a_hi.is_finite()) {
            return Err(Error::param(format!(
                "initial loudness range must be positive and ordered, got [{a_lo}, {a_hi}]"
            )));
        }
        let (r_lo, r_hi) = self.initial_pulse_rate;
        if !(0.0 <= r_lo && r_lo <= r_hi && r_hi <= 1.0) {
            return Err(Error::param(format!(
                "initial pulse rate range must lie in [0, 1], got [{r_lo}, {r_hi}]"
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations must be positive"));
        }
        Ok(())
    }

    fn frequency(&self, beta: f64) -> f64 {
        self.f_min + (self.f_max - self.f_min) * beta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bat {
    pub position: Point,
    /// Objective value at `position`.
    pub value: f64,
    pub velocity: Vec<f64>,
    pub frequency: f64,
    pub loudness: f64,
    pub initial_loudness: f64,
    pub pulse_rate: f64,
    pub initial_pulse_rate: f64,
    /// Iterations at which this bat accepted a move, in order.
    pub acceptances: Vec<u64>,
}

/// The global best `x_*` and its value.
#[derive(Debug, Clone, PartialEq)]
pub struct Incumbent {
    pub position: Point,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatState {
    pub bats: Vec<Bat>,
    pub best: Incumbent,
    /// Completed iterations `t`.
    pub iteration: u64,
    pub rng: RandomStream,
    pub budget: EvalBudget,
    /// Set when a step ran out of budget before every bat was evaluated.
    pub budget_exhausted: bool,
}

impl BatState {
    pub fn average_loudness(&self) -> f64 {
        average_loudness(&self.bats)
    }

    pub fn positions(&self) -> Vec<Point> {
        self.bats.iter().map(|b| b.position.clone()).collect()
    }
}

/// Outcome of a single [`bat_step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    Completed,
    /// The budget ran dry part-way through; `iteration` was not advanced.
    BudgetExhausted,
}

/// Place `n` bats uniformly in the box and evaluate them.
///
/// Per bat the draws are: `d` position coordinates, frequency, loudness,
/// initial pulse rate.
pub fn init_bats(
    params: &BatParams,
    obj: &Objective,
    mut rng: RandomStream,
    mut budget: EvalBudget,
) -> Result<BatState> {
    params.validate()?;
    if budget.remaining() < params.population as u64 {
        return Err(Error::BudgetExceeded {
            max: budget.max_evaluations(),
        });
    }
    let bounds = obj.bounds();
    let mut bats = Vec::with_capacity(params.population);
    for _ in 0..params.population {
        let position = uniform_sample(bounds, &mut rng);
        let frequency = params.frequency(rng.unit());
        let loudness = lerp(params.initial_loudness, rng.unit());
        let r0 = lerp(params.initial_pulse_rate, rng.unit());
        let value = counted_evaluate(obj, &position, &mut budget)?;
        bats.push(Bat {
            velocity: vec![0.0; position.dim()],
            position,
            value,
            frequency,
            loudness,
            initial_loudness: loudness,
            pulse_rate: r0,
            initial_pulse_rate: r0,
            acceptances: Vec::new(),
        });
    }
    let best = current_best(&bats);
    Ok(BatState {
        bats,
        best,
        iteration: 0,
        rng,
        budget,
        budget_exhausted: false,
    })
}

fn lerp((lo, hi): (f64, f64), u: f64) -> f64 {
    lo + (hi - lo) * u
}

/// Lowest-valued bat; ties go to the lowest index.
fn current_best(bats: &[Bat]) -> Incumbent {
    let best = bats
        .iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("population is non-empty");
    Incumbent {
        position: best.position.clone(),
        value: best.value,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalMove {
    pub velocity: Vec<f64>,
    pub position: Point,
    pub frequency: f64,
}

/// Frequency draw plus velocity and position update. Consumes one draw.
pub fn frequency_and_global_move(
    bat: &Bat,
    best: &[f64],
    params: &BatParams,
    bounds: &Bounds,
    rng: &mut impl UnitSource,
) -> GlobalMove {
    debug_assert_eq!(bat.position.dim(), best.len());
    let frequency = params.frequency(rng.unit());
    let velocity: Vec<f64> = bat
        .velocity
        .iter()
        .zip(bat.position.iter().zip(best))
        .map(|(v, (x, b))| v + (x - b) * frequency)
        .collect();
    let mut coords: Vec<f64> = bat
        .position
        .iter()
        .zip(&velocity)
        .map(|(x, v)| x + v)
        .collect();
    bounds.clamp_in_place(&mut coords);
    GlobalMove {
        velocity,
        position: Point::from_clamped(coords),
        frequency,
    }
}

/// Random walk `base + eps * avg_loudness`, one uniform `eps` in `[-1, 1]`
/// per coordinate. Consumes `d` draws.
pub fn local_walk(
    base: &[f64],
    avg_loudness: f64,
    bounds: &Bounds,
    rng: &mut impl UnitSource,
) -> Point {
    debug_assert!(avg_loudness >= 0.0);
    let mut coords: Vec<f64> = base
        .iter()
        .map(|x| x + rng.symmetric() * avg_loudness)
        .collect();
    bounds.clamp_in_place(&mut coords);
    Point::from_clamped(coords)
}

pub fn average_loudness(bats: &[Bat]) -> f64 {
    debug_assert!(!bats.is_empty());
    bats.iter().map(|b| b.loudness).sum::<f64>() / bats.len() as f64
}

/// Loudness-gated acceptance. Always consumes exactly one draw.
///
/// On acceptance the bat moves to `candidate`, which becomes the global
/// best; loudness decays by `alpha` and the pulse rate is reset from the
/// iteration counter `iteration`.
pub fn accept_and_update(
    bat: &mut Bat,
    candidate: Point,
    candidate_value: f64,
    best: &mut Incumbent,
    iteration: u64,
    params: &BatParams,
    rng: &mut impl UnitSource,
) -> bool {
    let gate = rng.unit();
    if !(gate < bat.loudness && candidate_value < best.value) {
        return false;
    }
    best.position = candidate.clone();
    best.value = candidate_value;
    bat.position = candidate;
    bat.value = candidate_value;
    bat.loudness *= params.alpha;
    bat.pulse_rate = bat.initial_pulse_rate * (1.0 - (-params.gamma * iteration as f64).exp());
    bat.acceptances.push(iteration);
    true
}

/// One iteration over every bat in index order. Exactly `n` evaluations
/// when the budget allows.
pub fn bat_step(state: &mut BatState, params: &BatParams, obj: &Objective) -> Result<StepStatus> {
    if state.budget.is_exhausted() {
        return Err(Error::BudgetExceeded {
            max: state.budget.max_evaluations(),
        });
    }
    let bounds = obj.bounds();
    let BatState {
        bats,
        best,
        iteration,
        rng,
        budget,
        budget_exhausted,
    } = state;

    for i in 0..bats.len() {
        let flight = frequency_and_global_move(&bats[i], &best.position, params, bounds, rng);
        let bat = &mut bats[i];
        bat.velocity = flight.velocity;
        bat.frequency = flight.frequency;
        let mut candidate = flight.position;

        if rng.unit() > bat.pulse_rate {
            let avg = average_loudness(bats);
            candidate = local_walk(&best.position, avg, bounds, rng);
        }

        let value = match counted_evaluate(obj, &candidate, budget) {
            Ok(v) => v,
            Err(Error::BudgetExceeded { .. }) => {
                *budget_exhausted = true;
                return Ok(StepStatus::BudgetExhausted);
            }
            Err(e) => return Err(e),
        };
        accept_and_update(
            &mut bats[i],
            candidate,
            value,
            best,
            *iteration,
            params,
            rng,
        );
    }

    *iteration += 1;
    let ranked = current_best(bats);
    if ranked.value < best.value {
        *best = ranked;
    }
    Ok(StepStatus::Completed)
}

/// Run the Bat Algorithm from `seed` until `max_iterations`, until another
/// full iteration would overrun `max_evaluations`, or until `stop` is met.
///
/// The stop target is checked after initialization and after each completed
/// iteration, so `evaluations_used` is always `n * (1 + iterations)`.
pub fn run_bat(
    params: &BatParams,
    obj: &Objective,
    seed: u64,
    max_evaluations: u64,
    stop: Option<StopTarget>,
    mut recorder: Option<&mut dyn TrajectorySink>,
) -> Result<(BatState, RunReport)> {
    let budget = EvalBudget::new(max_evaluations)?;
    let mut state = init_bats(params, obj, RandomStream::new(seed), budget)?;
    let n = params.population as u64;
    let mut at_target = stop
        .filter(|s| s.reached(state.best.value))
        .map(|_| state.budget.used());

    while at_target.is_none() && state.iteration < params.max_iterations {
        if state.budget.remaining() < n {
            state.budget_exhausted = true;
            break;
        }
        bat_step(&mut state, params, obj)?;
        if let Some(sink) = recorder.as_deref_mut() {
            sink.record(TrajectoryRecord {
                iteration: state.iteration,
                positions: state.positions(),
                best_value: state.best.value,
            });
        }
        if stop.is_some_and(|s| s.reached(state.best.value)) {
            at_target = Some(state.budget.used());
        }
    }

    let report = RunReport {
        evaluations_used: state.budget.used(),
        evaluations_at_target: at_target,
        best_value: state.best.value,
        best_position: Some(state.best.position.clone()),
        iterations: state.iteration,
        budget_exhausted: state.budget_exhausted,
    };
    Ok((state, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::benchmark_spec;
    use crate::domain::testing::ScriptedDraws;
    use proptest::prelude::*;

    fn wide_1d() -> Bounds {
        Bounds::cube(-100.0, 100.0, 1).unwrap()
    }

    fn bat_at(position: &[f64], velocity: &[f64]) -> Bat {
        Bat {
            position: Point::new(position.to_vec()).unwrap(),
            value: f64::INFINITY,
            velocity: velocity.to_vec(),
            frequency: 0.0,
            loudness: 1.0,
            initial_loudness: 1.0,
            pulse_rate: 0.5,
            initial_pulse_rate: 1.0,
            acceptances: vec![],
        }
    }

    fn incumbent(value: f64) -> Incumbent {
        Incumbent {
            position: Point::new(vec![0.0]).unwrap(),
            value,
        }
    }

    fn sphere(dim: usize) -> Objective {
        benchmark_spec("dejong", dim).unwrap().objective
    }

    #[test]
    fn params_validation() {
        assert!(BatParams::default().validate().is_ok());
        let bad = [
            BatParams {
                population: 0,
                ..Default::default()
            },
            BatParams {
                f_min: 5.0,
                f_max: 1.0,
                ..Default::default()
            },
            BatParams {
                alpha: 1.0,
                ..Default::default()
            },
            BatParams {
                gamma: 0.0,
                ..Default::default()
            },
            BatParams {
                initial_loudness: (0.0, 1.0),
                ..Default::default()
            },
            BatParams {
                initial_pulse_rate: (0.5, 1.5),
                ..Default::default()
            },
            BatParams {
                max_iterations: 0,
                ..Default::default()
            },
        ];
        for p in bad {
            assert!(matches!(p.validate(), Err(Error::InvalidParam(_))), "{p:?}");
        }
    }

    #[test]
    fn init_counts_and_best() {
        let obj = sphere(3);
        let params = BatParams {
            population: 25,
            ..Default::default()
        };
        let state = init_bats(
            &params,
            &obj,
            RandomStream::new(5),
            EvalBudget::new(100).unwrap(),
        )
        .unwrap();
        assert_eq!(state.bats.len(), 25);
        assert_eq!(state.budget.used(), 25);
        assert_eq!(state.iteration, 0);
        let min = state
            .bats
            .iter()
            .map(|b| b.value)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(state.best.value, min);
        for b in &state.bats {
            assert!(b.velocity.iter().all(|&v| v == 0.0));
            assert!((0.0..=100.0).contains(&b.frequency));
            assert!((1.0..=2.0).contains(&b.loudness));
            assert_eq!(b.pulse_rate, b.initial_pulse_rate);
            assert_eq!(obj.evaluate(&b.position).unwrap(), b.value);
        }
    }

    #[test]
    fn init_with_zero_pulse_rates() {
        let params = BatParams {
            initial_pulse_rate: (0.0, 0.0),
            ..Default::default()
        };
        let state = init_bats(
            &params,
            &sphere(2),
            RandomStream::new(1),
            EvalBudget::new(40).unwrap(),
        )
        .unwrap();
        assert!(state.bats.iter().all(|b| b.pulse_rate == 0.0));
    }

    #[test]
    fn init_is_deterministic() {
        let p = BatParams::default();
        let obj = sphere(4);
        let a = init_bats(
            &p,
            &obj,
            RandomStream::new(77),
            EvalBudget::new(1000).unwrap(),
        )
        .unwrap();
        let b = init_bats(
            &p,
            &obj,
            RandomStream::new(77),
            EvalBudget::new(1000).unwrap(),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn init_rejects_small_budget() {
        let err = init_bats(
            &BatParams::default(),
            &sphere(2),
            RandomStream::new(1),
            EvalBudget::new(10).unwrap(),
        );
        assert_eq!(err.unwrap_err(), Error::BudgetExceeded { max: 10 });
    }

    #[test]
    fn global_move_at_the_best_keeps_velocity() {
        let bat = bat_at(&[1.0], &[0.5]);
        let mut draws = ScriptedDraws::new(&[0.7]);
        let m =
            frequency_and_global_move(&bat, &[1.0], &BatParams::default(), &wide_1d(), &mut draws);
        assert_eq!(m.velocity, vec![0.5]);
        assert_eq!(m.position.coords(), &[1.5]);
        assert_eq!(draws.consumed, 1);
    }

    #[test]
    fn global_move_frequency_edges() {
        let bat = bat_at(&[2.0], &[0.25]);
        let p = BatParams::default();
        let mut zero = ScriptedDraws::new(&[0.0]);
        let m = frequency_and_global_move(&bat, &[0.0], &p, &wide_1d(), &mut zero);
        assert_eq!(m.frequency, 0.0);
        assert_eq!(m.velocity, vec![0.25]);

        let mut one = ScriptedDraws::new(&[1.0]);
        let m = frequency_and_global_move(&bat, &[0.0], &p, &wide_1d(), &mut one);
        assert_eq!(m.frequency, 100.0);
    }

    #[test]
    fn global_move_hand_example() {
        // f_i = 1: v = 0 + (2 - 0) * 1 = 2, x = 2 + 2 = 4.
        let p = BatParams {
            f_min: 1.0,
            f_max: 1.0,
            ..Default::default()
        };
        let bat = bat_at(&[2.0], &[0.0]);
        let mut draws = ScriptedDraws::new(&[0.3]);
        let m = frequency_and_global_move(&bat, &[0.0], &p, &wide_1d(), &mut draws);
        assert_eq!(m.velocity, vec![2.0]);
        assert_eq!(m.position.coords(), &[4.0]);
    }

    #[test]
    fn global_move_clamps_position_but_not_velocity() {
        let bat = bat_at(&[90.0], &[0.0]);
        let mut draws = ScriptedDraws::new(&[1.0]);
        let m =
            frequency_and_global_move(&bat, &[0.0], &BatParams::default(), &wide_1d(), &mut draws);
        assert_eq!(m.velocity, vec![9000.0]);
        assert_eq!(m.position.coords(), &[100.0]);
    }

    #[test]
    fn local_walk_examples() {
        let b = wide_1d();
        let mut d = ScriptedDraws::new(&[0.9]);
        assert_eq!(local_walk(&[1.0], 0.0, &b, &mut d).coords(), &[1.0]);
        // eps = 2u - 1 = 0
        let mut d = ScriptedDraws::new(&[0.5]);
        assert_eq!(local_walk(&[1.0], 3.0, &b, &mut d).coords(), &[1.0]);
        // eps = 0.5 at u = 0.75: 1 + 0.5 * 2 = 2
        let mut d = ScriptedDraws::new(&[0.75]);
        assert_eq!(local_walk(&[1.0], 2.0, &b, &mut d).coords(), &[2.0]);

        let b3 = Bounds::cube(-100.0, 100.0, 3).unwrap();
        let mut d = ScriptedDraws::new(&[0.5, 0.5, 0.5]);
        local_walk(&[0.0, 0.0, 0.0], 1.0, &b3, &mut d);
        assert_eq!(d.consumed, 3);
    }

    #[test]
    fn average_loudness_examples() {
        let mut bats = vec![bat_at(&[0.0], &[0.0]), bat_at(&[0.0], &[0.0])];
        assert_eq!(average_loudness(&bats), 1.0);
        bats[1].loudness = 2.0;
        assert_eq!(average_loudness(&bats), 1.5);

        // Universal acceptance round from A = 1 with alpha = 0.9.
        let p = BatParams::default();
        let mut bats = vec![bat_at(&[0.0], &[0.0]); 4];
        let mut best = incumbent(100.0);
        for (k, bat) in bats.iter_mut().enumerate() {
            let mut d = ScriptedDraws::new(&[0.0]);
            let cand = Point::new(vec![k as f64]).unwrap();
            assert!(accept_and_update(
                bat,
                cand,
                50.0 - k as f64,
                &mut best,
                3,
                &p,
                &mut d
            ));
        }
        assert!((average_loudness(&bats) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn acceptance_requires_improvement() {
        let p = BatParams::default();
        let mut bat = bat_at(&[3.0], &[0.0]);
        let mut best = incumbent(1.0);
        let mut d = ScriptedDraws::new(&[0.0]);
        let cand = Point::new(vec![2.0]).unwrap();
        assert!(!accept_and_update(
            &mut bat, cand, 1.5, &mut best, 0, &p, &mut d
        ));
        assert_eq!(d.consumed, 1);
        assert_eq!(bat.position.coords(), &[3.0]);
        assert_eq!(bat.loudness, 1.0);
        assert_eq!(best.value, 1.0);

        // Ties reject.
        let mut d = ScriptedDraws::new(&[0.0]);
        let cand = Point::new(vec![2.0]).unwrap();
        assert!(!accept_and_update(
            &mut bat, cand, 1.0, &mut best, 0, &p, &mut d
        ));
    }

    #[test]
    fn acceptance_gated_by_loudness_draw() {
        let p = BatParams::default();
        let mut bat = bat_at(&[3.0], &[0.0]);
        bat.loudness = 0.4;
        let mut best = incumbent(1.0);
        let mut d = ScriptedDraws::new(&[0.5]);
        let cand = Point::new(vec![0.0]).unwrap();
        assert!(!accept_and_update(
            &mut bat, cand, 0.0, &mut best, 2, &p, &mut d
        ));
    }

    #[test]
    fn acceptance_updates_schedules() {
        let p = BatParams::default();
        let mut bat = bat_at(&[3.0], &[0.0]);
        let mut best = incumbent(10.0);
        let mut d = ScriptedDraws::new(&[0.2]);
        let cand = Point::new(vec![1.0]).unwrap();
        assert!(accept_and_update(
            &mut bat,
            cand.clone(),
            1.0,
            &mut best,
            0,
            &p,
            &mut d
        ));
        assert_eq!(bat.loudness, 0.9);
        assert_eq!(bat.pulse_rate, 0.0);
        assert_eq!(bat.position, cand);
        assert_eq!(best.position, cand);
        assert_eq!(best.value, 1.0);
        assert_eq!(bat.acceptances, vec![0]);

        let mut d = ScriptedDraws::new(&[0.2]);
        let cand = Point::new(vec![0.5]).unwrap();
        assert!(accept_and_update(
            &mut bat, cand, 0.25, &mut best, 1, &p, &mut d
        ));
        assert!((bat.pulse_rate - 0.593_430_340_259_400_9).abs() < 1e-12);
        assert!((bat.loudness - 0.81).abs() < 1e-15);
    }

    #[test]
    fn schedules_reach_their_limits() {
        let p = BatParams::default();
        let mut bat = bat_at(&[0.0], &[0.0]);
        let mut best = incumbent(f64::MAX);
        for t in 0..1000u64 {
            // A forced acceptance each iteration.
            let mut d = ScriptedDraws::new(&[0.0]);
            let v = -(t as f64);
            accept_and_update(
                &mut bat,
                Point::new(vec![0.0]).unwrap(),
                v,
                &mut best,
                t,
                &p,
                &mut d,
            );
        }
        assert!(bat.loudness < 1e-4);
        assert!((bat.pulse_rate - bat.initial_pulse_rate).abs() < 1e-12);
    }

    #[test]
    fn step_spends_one_evaluation_per_bat() {
        let obj = sphere(2);
        let p = BatParams {
            population: 25,
            ..Default::default()
        };
        let mut state = init_bats(
            &p,
            &obj,
            RandomStream::new(3),
            EvalBudget::new(1000).unwrap(),
        )
        .unwrap();
        let before = state.best.value;
        assert_eq!(bat_step(&mut state, &p, &obj), Ok(StepStatus::Completed));
        assert_eq!(state.budget.used(), 50);
        assert_eq!(state.iteration, 1);
        assert!(state.best.value <= before);
    }

    #[test]
    fn step_without_local_walk_when_pulse_rate_is_one() {
        // No branch draw exceeds r_i = 1, so each bat consumes exactly three
        // draws: beta, branch, acceptance. An acceptance zeroes r_i only after
        // that bat's branch draw.
        let obj = sphere(3);
        let p = BatParams {
            population: 5,
            initial_pulse_rate: (1.0, 1.0),
            ..Default::default()
        };
        let mut state = init_bats(
            &p,
            &obj,
            RandomStream::new(11),
            EvalBudget::new(100).unwrap(),
        )
        .unwrap();
        let mut shadow = state.rng.clone();
        bat_step(&mut state, &p, &obj).unwrap();
        for _ in 0..15 {
            shadow.unit();
        }
        assert_eq!(state.rng, shadow);
    }

    #[test]
    fn step_reports_partial_budget() {
        let obj = sphere(2);
        let p = BatParams {
            population: 10,
            ..Default::default()
        };
        let mut state =
            init_bats(&p, &obj, RandomStream::new(3), EvalBudget::new(15).unwrap()).unwrap();
        assert_eq!(
            bat_step(&mut state, &p, &obj),
            Ok(StepStatus::BudgetExhausted)
        );
        assert_eq!(state.budget.used(), 15);
        assert_eq!(state.iteration, 0);
        assert!(state.budget_exhausted);
        assert!(matches!(
            bat_step(&mut state, &p, &obj),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn frozen_frequencies_move_only_by_walk() {
        // f_min = f_max = 0 with zero initial velocity: global moves are
        // identity, so the best can only improve through the local walk.
        let obj = sphere(2);
        let p = BatParams {
            f_min: 0.0,
            f_max: 0.0,
            ..Default::default()
        };
        let mut state = init_bats(
            &p,
            &obj,
            RandomStream::new(8),
            EvalBudget::new(4000).unwrap(),
        )
        .unwrap();
        let start = state.best.value;
        for _ in 0..20 {
            let prev_positions = state.positions();
            let prev_best = state.best.position.clone();
            bat_step(&mut state, &p, &obj).unwrap();
            for (b, before) in state.bats.iter().zip(&prev_positions) {
                assert!(b.velocity.iter().all(|&v| v == 0.0));
                // Any change of position is an accepted walk, i.e. the new best
                // region, never a flight.
                if &b.position != before {
                    assert!(obj.evaluate(&b.position).unwrap() < obj.evaluate(&prev_best).unwrap());
                }
            }
        }
        assert!(state.best.value < start);
    }

    #[test]
    fn run_is_reproducible() {
        let obj = sphere(4);
        let p = BatParams::default();
        let mut ta = Vec::new();
        let mut tb = Vec::new();
        let (sa, ra) = run_bat(&p, &obj, 42, 2000, None, Some(&mut ta)).unwrap();
        let (sb, rb) = run_bat(&p, &obj, 42, 2000, None, Some(&mut tb)).unwrap();
        assert_eq!(sa, sb);
        assert_eq!(ra, rb);
        assert_eq!(ta, tb);
        assert_eq!(ta.len() as u64, ra.iterations);
    }

    #[test]
    fn run_stops_at_target() {
        let obj = sphere(1);
        let stop = StopTarget {
            known_min: 0.0,
            tolerance: 1e3,
        };
        let (_, report) =
            run_bat(&BatParams::default(), &obj, 1, 10_000, Some(stop), None).unwrap();
        assert_eq!(report.evaluations_at_target, Some(40));
        assert_eq!(report.iterations, 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn run_invariants(seed in any::<u64>(), dim in 1usize..5, n in 2usize..20) {
            let obj = sphere(dim);
            let p = BatParams { population: n, ..Default::default() };
            let mut trace = Vec::new();
            let (state, report) = run_bat(&p, &obj, seed, 1500, None, Some(&mut trace)).unwrap();

            prop_assert_eq!(report.evaluations_used, n as u64 * (1 + report.iterations));
            prop_assert!(report.evaluations_used <= 1500);
            prop_assert!(1500 - report.evaluations_used < n as u64);

            let mut last = f64::INFINITY;
            for rec in &trace {
                prop_assert!(rec.best_value <= last);
                last = rec.best_value;
                prop_assert_eq!(rec.positions.len(), n);
                for pos in &rec.positions {
                    prop_assert!(obj.bounds().contains(pos));
                }
            }
            prop_assert_eq!(obj.evaluate(&state.best.position).unwrap(), state.best.value);

            for bat in &state.bats {
                let k = bat.acceptances.len() as i32;
                let mut expected = bat.initial_loudness;
                for _ in 0..k {
                    expected *= p.alpha;
                }
                prop_assert_eq!(bat.loudness, expected);
                prop_assert!(bat.pulse_rate >= 0.0 && bat.pulse_rate <= bat.initial_pulse_rate);
                prop_assert!(bat.acceptances.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }
}
