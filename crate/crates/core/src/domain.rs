//! Shared domain types: box bounds, points, objectives, the seeded random
//! stream and evaluation budgets.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};

/// Name of the pinned generator behind [`RandomStream`], recorded in result metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9, seed_from_u64)";

/// Axis-aligned search box `lower[k] < upper[k]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidBounds("dimension must be at least 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        for (k, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidBounds(format!(
                    "coordinate {k}: need finite lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lower, upper]` on every one of `dim` coordinates.
    pub fn cube(lower: f64, upper: f64, dim: usize) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, k: usize) -> f64 {
        self.upper[k] - self.lower[k]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Clamp coordinates in place. NaN maps to the lower edge.
    pub(crate) fn clamp_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.max(*lo).min(*hi);
        }
    }
}

/// A candidate location with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(coords))
    }

    /// Callers guarantee finiteness (clamped or sampled inside bounds).
    pub(crate) fn from_clamped(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

pub type ObjectiveFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A named, deterministic function over a bounded domain, optionally with
/// its known global optimum.
#[derive(Clone)]
pub struct Objective {
    name: String,
    bounds: Bounds,
    known_min: Option<f64>,
    known_argmin: Option<Point>,
    func: Arc<ObjectiveFn>,
}

impl Objective {
    pub fn new(
        name: impl Into<String>,
        bounds: Bounds,
        func: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            bounds,
            known_min: None,
            known_argmin: None,
            func: Arc::new(func),
        }
    }

    pub fn with_known_min(mut self, value: f64) -> Self {
        self.known_min = Some(value);
        self
    }

    pub fn with_known_argmin(mut self, argmin: Point) -> Result<Self> {
        if argmin.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: argmin.dim(),
            });
        }
        self.known_argmin = Some(argmin);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn known_min(&self) -> Option<f64> {
        self.known_min
    }

    pub fn known_argmin(&self) -> Option<&Point> {
        self.known_argmin.as_ref()
    }

    /// Uncounted evaluation with a dimension check.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok((self.func)(x))
    }
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("bounds", &self.bounds)
            .field("known_min", &self.known_min)
            .field("known_argmin", &self.known_argmin)
            .finish_non_exhaustive()
    }
}

/// Source of uniform unit draws.
///
/// The bat operators are written against this trait so tests can script the
/// exact draw sequence; production code always passes a [`RandomStream`].
pub trait UnitSource {
    /// Uniform draw in `[0, 1)`.
    fn unit(&mut self) -> f64;

    /// Uniform draw in `[-1, 1]`, consuming exactly one unit draw.
    fn symmetric(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }
}

/// Seeded, reproducible random stream confined to a single trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

impl UnitSource for RandomStream {
    fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

/// Counts objective calls against a hard cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EvalBudget {
    max_evaluations: u64,
    used: u64,
}

impl EvalBudget {
    pub fn new(max_evaluations: u64) -> Result<Self> {
        if max_evaluations == 0 {
            return Err(Error::param("max_evaluations must be positive"));
        }
        Ok(Self {
            max_evaluations,
            used: 0,
        })
    }

    pub fn max_evaluations(&self) -> u64 {
        self.max_evaluations
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.max_evaluations - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.max_evaluations
    }
}

/// Project `x` onto the box coordinate-wise.
pub fn clamp_to_bounds(x: &Point, bounds: &Bounds) -> Result<Point> {
    if x.dim() != bounds.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            actual: x.dim(),
        });
    }
    let mut coords = x.0.clone();
    bounds.clamp_in_place(&mut coords);
    Ok(Point(coords))
}

/// Uniform point in `[lower, upper)`, consuming exactly `d` unit draws.
pub fn uniform_sample(bounds: &Bounds, rng: &mut impl UnitSource) -> Point {
    let coords = bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(lo, hi)| lo + (hi - lo) * rng.unit())
        .collect();
    Point(coords)
}

/// Evaluate `x` and charge one call to `budget`.
///
/// Fails with [`Error::BudgetExceeded`] (leaving `used` untouched) when the
/// budget is already spent.
pub fn counted_evaluate(obj: &Objective, x: &[f64], budget: &mut EvalBudget) -> Result<f64> {
    if budget.is_exhausted() {
        return Err(Error::BudgetExceeded {
            max: budget.max_evaluations,
        });
    }
    let value = obj.evaluate(x)?;
    budget.used += 1;
    Ok(value)
}
