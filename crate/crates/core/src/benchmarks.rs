//! Continuous test functions with their domains and known optima.
//!
//! Rosenbrock (as printed, with `(1 - x_i^2)^2`), eggcrate, De Jong's sphere,
//! Ackley and Michalewicz follow their published formulas. The remaining
//! comparison functions use their usual literature definitions and domains.

use std::f64::consts::{E, PI, TAU};

use serde::Serialize;

use crate::domain::{Bounds, Objective, Point};
use crate::error::{Error, Result};

/// Where a function definition comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Citation {
    PaperEquation,
    StandardLiterature,
}

/// Which dimensions a function is defined for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimRule {
    AtLeast(usize),
    Exactly(usize),
}

impl DimRule {
    pub fn admits(self, dim: usize) -> bool {
        match self {
            DimRule::AtLeast(min) => dim >= min,
            DimRule::Exactly(d) => dim == d,
        }
    }
}

impl std::fmt::Display for DimRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DimRule::AtLeast(min) => write!(f, "dim>={min}"),
            DimRule::Exactly(d) => write!(f, "dim={d}"),
        }
    }
}

/// A registry entry: everything needed to instantiate a [`BenchmarkSpec`].
#[derive(Debug, Clone, Copy)]
pub struct BenchmarkEntry {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub citation: Citation,
    pub dims: DimRule,
    pub default_dim: usize,
    /// Same interval on every coordinate.
    pub domain: (f64, f64),
    pub func: fn(&[f64]) -> f64,
    optimum: fn(usize) -> Option<(f64, Vec<f64>)>,
}

impl BenchmarkEntry {
    /// Known global minimum value and one minimizer for dimension `dim`.
    pub fn optimum(&self, dim: usize) -> Option<(f64, Vec<f64>)> {
        (self.optimum)(dim)
    }
}

/// A benchmark instantiated at a concrete dimension.
#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    pub name: &'static str,
    pub objective: Objective,
    pub default_dim: usize,
    pub citation: Citation,
}

impl BenchmarkSpec {
    pub fn dim(&self) -> usize {
        self.objective.dim()
    }
}

pub fn rosenbrock_paper(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let sq = w[0] * w[0];
            (1.0 - sq).powi(2) + 100.0 * (w[1] - sq).powi(2)
        })
        .sum()
}

pub fn rosenbrock_classic(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| (1.0 - w[0]).powi(2) + 100.0 * (w[1] - w[0] * w[0]).powi(2))
        .sum()
}

pub fn eggcrate(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    a * a + b * b + 25.0 * (a.sin().powi(2) + b.sin().powi(2))
}

pub fn dejong_sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn ackley(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / d;
    let cos = x.iter().map(|v| (TAU * v).cos()).sum::<f64>() / d;
    20.0 + E - 20.0 * (-0.2 * sq.sqrt()).exp() - cos.exp()
}

/// Steepness exponent `m` of the Michalewicz function.
pub const MICHALEWICZ_M: i32 = 10;

fn michalewicz_term(i: usize, x: f64) -> f64 {
    -x.sin() * ((i as f64) * x * x / PI).sin().powi(2 * MICHALEWICZ_M)
}

pub fn michalewicz(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(k, &v)| michalewicz_term(k + 1, v))
        .sum()
}

pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (TAU * v).cos())
            .sum::<f64>()
}

pub fn griewank(x: &[f64]) -> f64 {
    let sum = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let prod: f64 = x
        .iter()
        .enumerate()
        .map(|(k, v)| (v / ((k + 1) as f64).sqrt()).cos())
        .product();
    1.0 + sum - prod
}

pub fn easom(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    -a.cos() * b.cos() * (-((a - PI).powi(2) + (b - PI).powi(2))).exp()
}

const SCHWEFEL_PEAK: f64 = 418.982_887_272_433_7;
const SCHWEFEL_ARGMIN: f64 = 420.968_746_359_982_03;

pub fn schwefel(x: &[f64]) -> f64 {
    SCHWEFEL_PEAK * x.len() as f64 - x.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>()
}

fn shubert_factor(v: f64) -> f64 {
    (1..=5)
        .map(|i| {
            let i = i as f64;
            i * ((i + 1.0) * v + i).cos()
        })
        .sum()
}

pub fn shubert(x: &[f64]) -> f64 {
    shubert_factor(x[0]) * shubert_factor(x[1])
}

const SHUBERT_MIN: f64 = -186.730_908_831_023_83;

/// Negated four-peak Gaussian mixture: two tall peaks at `(0, 0)` and
/// `(0, -4)`, two shorter ones at `(±4, 4)`.
pub fn multiple_peaks(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    let bump = |cx: f64, cy: f64| (-(a - cx).powi(2) - (b - cy).powi(2)).exp();
    -(bump(4.0, 4.0) + bump(-4.0, 4.0) + 2.0 * (bump(0.0, 0.0) + bump(0.0, -4.0)))
}

// The mixture tails shift the tall peak slightly off the origin.
const MULTIPLE_PEAKS_MIN: f64 = -2.000_000_225_070_78;
const MULTIPLE_PEAKS_ARGMIN: [f64; 2] = [0.0, -4.501_422_185_851_170_5e-7];

/// Per-coordinate minimizer of one separable Michalewicz term: dense scan
/// followed by golden-section refinement of the best bracket.
fn michalewicz_coordinate_min(i: usize) -> (f64, f64) {
    const SAMPLES: usize = 20_000;
    let h = PI / SAMPLES as f64;
    let best = (0..=SAMPLES)
        .map(|s| s as f64 * h)
        .min_by(|a, b| michalewicz_term(i, *a).total_cmp(&michalewicz_term(i, *b)))
        .unwrap_or(0.0);
    let (mut lo, mut hi) = ((best - h).max(0.0), (best + h).min(PI));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        if michalewicz_term(i, a) < michalewicz_term(i, b) {
            hi = b;
        } else {
            lo = a;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, michalewicz_term(i, x))
}

/// Global minimum of the d-dimensional Michalewicz function. The function is
/// a sum of one-dimensional terms, so the optimum decomposes per coordinate.
pub fn michalewicz_optimum(dim: usize) -> (f64, Vec<f64>) {
    let (argmin, values): (Vec<f64>, Vec<f64>) = (1..=dim).map(michalewicz_coordinate_min).unzip();
    (values.iter().sum(), argmin)
}

static REGISTRY: [BenchmarkEntry; 12] = [
    BenchmarkEntry {
        name: "rosenbrock_paper",
        aliases: &["rosenbrock"],
        citation: Citation::PaperEquation,
        dims: DimRule::AtLeast(2),
        default_dim: 16,
        domain: (-2.048, 2.048),
        func: rosenbrock_paper,
        optimum: |d| Some((0.0, vec![1.0; d])),
    },
    BenchmarkEntry {
        name: "rosenbrock_classic",
        aliases: &[],
        citation: Citation::StandardLiterature,
        dims: DimRule::AtLeast(2),
        default_dim: 16,
        domain: (-2.048, 2.048),
        func: rosenbrock_classic,
        optimum: |d| Some((0.0, vec![1.0; d])),
    },
    BenchmarkEntry {
        name: "eggcrate",
        aliases: &[],
        citation: Citation::PaperEquation,
        dims: DimRule::Exactly(2),
        default_dim: 2,
        domain: (-TAU, TAU),
        func: eggcrate,
        optimum: |d| Some((0.0, vec![0.0; d])),
    },
    BenchmarkEntry {
        name: "dejong",
        aliases: &["dejong_sphere", "sphere"],
        citation: Citation::PaperEquation,
        dims: DimRule::AtLeast(1),
        default_dim: 256,
        domain: (-10.0, 10.0),
        func: dejong_sphere,
        optimum: |d| Some((0.0, vec![0.0; d])),
    },
    BenchmarkEntry {
        name: "ackley",
        aliases: &[],
        citation: Citation::PaperEquation,
        dims: DimRule::AtLeast(1),
        default_dim: 128,
        domain: (-30.0, 30.0),
        func: ackley,
        optimum: |d| Some((0.0, vec![0.0; d])),
    },
    BenchmarkEntry {
        name: "michalewicz",
        aliases: &[],
        citation: Citation::PaperEquation,
        dims: DimRule::AtLeast(1),
        default_dim: 16,
        domain: (0.0, PI),
        func: michalewicz,
        optimum: |d| Some(michalewicz_optimum(d)),
    },
    BenchmarkEntry {
        name: "rastrigin",
        aliases: &[],
        citation: Citation::StandardLiterature,
        dims: DimRule::AtLeast(1),
        default_dim: 2,
        domain: (-5.12, 5.12),
        func: rastrigin,
        optimum: |d| Some((0.0, vec![0.0; d])),
    },
    BenchmarkEntry {
        name: "griewank",
        aliases: &["griewangk"],
        citation: Citation::StandardLiterature,
        dims: DimRule::AtLeast(1),
        default_dim: 2,
        domain: (-600.0, 600.0),
        func: griewank,
        optimum: |d| Some((0.0, vec![0.0; d])),
    },
    BenchmarkEntry {
        name: "easom",
        aliases: &[],
        citation: Citation::StandardLiterature,
        dims: DimRule::Exactly(2),
        default_dim: 2,
        domain: (-100.0, 100.0),
        func: easom,
        optimum: |_| Some((-1.0, vec![PI, PI])),
    },
    BenchmarkEntry {
        name: "schwefel",
        aliases: &[],
        citation: Citation::StandardLiterature,
        dims: DimRule::AtLeast(1),
        default_dim: 128,
        domain: (-500.0, 500.0),
        func: schwefel,
        optimum: |d| Some((0.0, vec![SCHWEFEL_ARGMIN; d])),
    },
    BenchmarkEntry {
        name: "shubert",
        aliases: &[],
        citation: Citation::StandardLiterature,
        dims: DimRule::Exactly(2),
        default_dim: 2,
        domain: (-10.0, 10.0),
        func: shubert,
        optimum: |_| {
            Some((
                SHUBERT_MIN,
                vec![-1.425_128_428_319_761, -0.800_321_100_471_973_1],
            ))
        },
    },
    BenchmarkEntry {
        name: "multiple_peaks",
        aliases: &["four_peaks"],
        citation: Citation::StandardLiterature,
        dims: DimRule::Exactly(2),
        default_dim: 2,
        domain: (-5.0, 5.0),
        func: multiple_peaks,
        optimum: |_| Some((MULTIPLE_PEAKS_MIN, MULTIPLE_PEAKS_ARGMIN.to_vec())),
    },
];

/// All registered functions in registry order.
pub fn registry() -> &'static [BenchmarkEntry] {
    &REGISTRY
}

/// Look up a function by name or alias.
pub fn lookup(name: &str) -> Result<&'static BenchmarkEntry> {
    REGISTRY
        .iter()
        .find(|e| e.name == name || e.aliases.contains(&name))
        .ok_or_else(|| Error::UnknownFunction(name.to_string()))
}

/// Instantiate a registered function at dimension `dim`.
pub fn benchmark_spec(name: &str, dim: usize) -> Result<BenchmarkSpec> {
    let entry = lookup(name)?;
    if !entry.dims.admits(dim) {
        return Err(Error::UnsupportedDimension {
            name: entry.name.to_string(),
            dim,
        });
    }
    let bounds = Bounds::cube(entry.domain.0, entry.domain.1, dim)?;
    let mut objective = Objective::new(entry.name, bounds, entry.func);
    if let Some((value, argmin)) = entry.optimum(dim) {
        objective = objective
            .with_known_min(value)
            .with_known_argmin(Point::new(argmin)?)?;
    }
    Ok(BenchmarkSpec {
        name: entry.name,
        objective,
        default_dim: entry.default_dim,
        citation: entry.citation,
    })
}

/// Evaluate a registered function by name, checking its dimension rule.
pub fn evaluate_benchmark(name: &str, x: &Point) -> Result<f64> {
    let entry = lookup(name)?;
    if !entry.dims.admits(x.dim()) {
        return Err(Error::UnsupportedDimension {
            name: entry.name.to_string(),
            dim: x.dim(),
        });
    }
    Ok((entry.func)(x))
}
