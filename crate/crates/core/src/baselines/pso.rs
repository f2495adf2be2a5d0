use serde::Serialize;

use crate::domain::{
    counted_evaluate, uniform_sample, Bounds, EvalBudget, Objective, Point, RandomStream,
    UnitSource,
};
use crate::error::{Error, Result};
use crate::trajectory::{TrajectoryRecord, TrajectorySink};
use crate::{RunReport, StopTarget};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsoParams {
    pub population: usize,
    /// Cognitive weight (pull toward the personal best).
    pub c1: f64,
    /// Social weight (pull toward the swarm best).
    pub c2: f64,
    pub inertia: f64,
    pub max_iterations: u64,
    /// Per-coordinate speed cap as a fraction of that coordinate's range.
    pub velocity_limit: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            population: 40,
            c1: 2.0,
            c2: 2.0,
            inertia: 1.0,
            max_iterations: 10_000,
            velocity_limit: 0.5,
        }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::param("swarm needs at least 2 particles"));
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0 && self.c1.is_finite() && self.c2.is_finite()) {
            return Err(Error::param(format!(
                "learning parameters must be non-negative, got c1={} c2={}",
                self.c1, self.c2
            )));
        }
        if !self.inertia.is_finite() {
            return Err(Error::param("inertia must be finite"));
        }
        if !(self.velocity_limit > 0.0 && self.velocity_limit.is_finite()) {
            return Err(Error::param("velocity limit must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Point,
    pub velocity: Vec<f64>,
    pub best_position: Point,
    pub best_value: f64,
}

/// `v <- I v + c1 u1 (pbest - x) + c2 u2 (gbest - x)`, speed-capped, then
/// `x <- clamp(x + v)`. Draws `u1, u2` per coordinate.
pub fn move_particle(
    particle: &mut Particle,
    swarm_best: &[f64],
    params: &PsoParams,
    bounds: &Bounds,
    rng: &mut impl UnitSource,
) {
    let mut coords = particle.position.coords().to_vec();
    for (k, x) in coords.iter_mut().enumerate() {
        let (u1, u2) = (rng.unit(), rng.unit());
        let cap = params.velocity_limit * bounds.width(k);
        let v = params.inertia * particle.velocity[k]
            + params.c1 * u1 * (particle.best_position[k] - *x)
            + params.c2 * u2 * (swarm_best[k] - *x);
        particle.velocity[k] = v.clamp(-cap, cap);
        *x += particle.velocity[k];
    }
    bounds.clamp_in_place(&mut coords);
    particle.position = Point::from_clamped(coords);
}

pub fn run_pso(
    params: &PsoParams,
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

    let mut swarm = Vec::with_capacity(params.population);
    for _ in 0..params.population {
        let position = uniform_sample(bounds, &mut rng);
        let value = counted_evaluate(obj, &position, &mut budget)?;
        swarm.push(Particle {
            velocity: vec![0.0; position.dim()],
            best_position: position.clone(),
            position,
            best_value: value,
        });
    }
    let lead = swarm
        .iter()
        .reduce(|a, b| if b.best_value < a.best_value { b } else { a })
        .expect("non-empty swarm");
    let (mut gbest, mut gbest_value) = (lead.best_position.clone(), lead.best_value);

    let reached = |v: f64| stop.is_some_and(|s| s.reached(v));
    let mut at_target = reached(gbest_value).then(|| budget.used());
    let mut iterations = 0;
    let mut exhausted = false;

    while at_target.is_none() && iterations < params.max_iterations {
        if budget.remaining() < n {
            exhausted = true;
            break;
        }
        for particle in &mut swarm {
            move_particle(particle, &gbest, params, bounds, &mut rng);
            let value = counted_evaluate(obj, &particle.position, &mut budget)?;
            if value < particle.best_value {
                particle.best_value = value;
                particle.best_position = particle.position.clone();
            }
            if value < gbest_value {
                gbest_value = value;
                gbest = particle.position.clone();
            }
        }
        iterations += 1;
        if let Some(sink) = recorder.as_deref_mut() {
            sink.record(TrajectoryRecord {
                iteration: iterations,
                positions: swarm.iter().map(|p| p.position.clone()).collect(),
                best_value: gbest_value,
            });
        }
        if reached(gbest_value) {
            at_target = Some(budget.used());
        }
    }

    Ok(RunReport {
        evaluations_used: budget.used(),
        evaluations_at_target: at_target,
        best_value: gbest_value,
        best_position: Some(gbest),
        iterations,
        budget_exhausted: exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::benchmark_spec;

    #[test]
    fn params_validation() {
        assert!(PsoParams::default().validate().is_ok());
        for bad in [
            PsoParams {
                population: 1,
                ..Default::default()
            },
            PsoParams {
                c1: -1.0,
                ..Default::default()
            },
            PsoParams {
                c2: f64::NAN,
                ..Default::default()
            },
            PsoParams {
                max_iterations: 0,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn stationary_particle_stays_put() {
        let bounds = Bounds::cube(-10.0, 10.0, 3).unwrap();
        let here = Point::new(vec![1.0, -2.0, 3.0]).unwrap();
        let mut p = Particle {
            position: here.clone(),
            velocity: vec![0.0; 3],
            best_position: here.clone(),
            best_value: 0.0,
        };
        let mut rng = RandomStream::new(4);
        for _ in 0..50 {
            move_particle(&mut p, &here, &PsoParams::default(), &bounds, &mut rng);
            assert_eq!(p.position, here);
        }
    }

    #[test]
    fn speed_is_capped() {
        let bounds = Bounds::cube(-10.0, 10.0, 1).unwrap();
        let mut p = Particle {
            position: Point::new(vec![-10.0]).unwrap(),
            velocity: vec![100.0],
            best_position: Point::new(vec![10.0]).unwrap(),
            best_value: 0.0,
        };
        move_particle(
            &mut p,
            &[10.0],
            &PsoParams::default(),
            &bounds,
            &mut RandomStream::new(0),
        );
        assert_eq!(p.velocity, vec![10.0]);
        assert_eq!(p.position.coords(), &[0.0]);
    }

    #[test]
    fn accounting_and_determinism() {
        let obj = benchmark_spec("dejong", 3).unwrap().objective;
        let p = PsoParams {
            population: 7,
            ..Default::default()
        };
        let mut ta = Vec::new();
        let a = run_pso(&p, &obj, 9, 1000, None, Some(&mut ta)).unwrap();
        let b = run_pso(&p, &obj, 9, 1000, None, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluations_used, 7 * (1 + a.iterations));
        assert_eq!(a.iterations, 141);
        assert!(a.budget_exhausted);
        assert!(ta.windows(2).all(|w| w[1].best_value <= w[0].best_value));
    }

    #[test]
    fn too_small_budget() {
        let obj = benchmark_spec("dejong", 2).unwrap().objective;
        assert_eq!(
            run_pso(&PsoParams::default(), &obj, 0, 39, None, None),
            Err(Error::BudgetExceeded { max: 39 })
        );
    }
}
