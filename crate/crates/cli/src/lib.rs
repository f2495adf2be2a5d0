//! Command-line front end: run seeded experiments, compare algorithms, record
//! trajectories and list the benchmark registry.
//!
//! Exit codes: `0` success, `1` runtime failure, `2` invalid flags, `3`
//! unknown function or algorithm.

mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use batswarm::benchmarks::{self, BenchmarkSpec};
use batswarm::harness::{
    run_experiment, run_trial, Algorithm, AlgorithmConfig, Execution, DEFAULT_MAX_EVALUATIONS,
    DEFAULT_TOLERANCE,
};
use batswarm::{BatParams, Error, GaParams, PsoParams, TrajectoryRecord};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::{Metadata, Sink};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "batswarm",
    version,
    about = "Bat Algorithm, PSO and GA benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run seeded trials of one algorithm on one function, one row per trial
    Run(RunArgs),
    /// Compare algorithms across functions, one summary row per pair
    Compare(CompareArgs),
    /// Record the population after every iteration of a single run
    Trace(TraceArgs),
    /// Print registered benchmark functions and their dimension rules
    ListFunctions,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value = "bat")]
    algorithm: String,
    #[arg(long)]
    function: String,
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    functions: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "bat,pso,ga")]
    algorithms: Vec<String>,
    #[command(flatten)]
    protocol: ProtocolArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[arg(long, default_value = "bat")]
    algorithm: String,
    #[arg(long)]
    function: String,
    /// Problem dimension (defaults to the function's default)
    #[arg(long)]
    dim: Option<usize>,
    /// Number of iterations to record
    #[arg(long, default_value_t = 20)]
    iters: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ProtocolArgs {
    /// Problem dimension (defaults to each function's default)
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Success when best - known_min <= tolerance
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_EVALUATIONS)]
    max_evals: u64,
    /// Master seed; trial seeds are derived from it
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Population size for every algorithm
    #[arg(long, default_value_t = 40)]
    pop: usize,
    /// Bat loudness decay
    #[arg(long)]
    alpha: Option<f64>,
    /// Bat pulse-rate growth
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    fmin: Option<f64>,
    #[arg(long)]
    fmax: Option<f64>,
    /// PSO cognitive weight
    #[arg(long)]
    c1: Option<f64>,
    /// PSO social weight
    #[arg(long)]
    c2: Option<f64>,
    /// PSO inertia
    #[arg(long)]
    inertia: Option<f64>,
    /// GA per-gene mutation probability
    #[arg(long)]
    pm: Option<f64>,
    /// GA crossover probability
    #[arg(long)]
    pc: Option<f64>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file (stdout when omitted); a `.meta.json` sidecar is written next to it
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Unknown(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Unknown(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Unknown(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownFunction(_) | Error::UnknownAlgorithm(_) => {
                CliError::Unknown(e.to_string())
            }
            Error::InvalidParam(_)
            | Error::UnsupportedDimension { .. }
            | Error::MissingOptimum(_)
            | Error::InvalidBounds(_)
            | Error::DimensionMismatch { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Parse `argv` (including the program name), execute, and return the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Trace(args) => cmd_trace(args),
        Command::ListFunctions => cmd_list(),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

impl ParamArgs {
    fn config(&self, algorithm: Algorithm) -> Result<AlgorithmConfig, CliError> {
        let config = match algorithm {
            Algorithm::Bat => {
                let d = BatParams::default();
                AlgorithmConfig::Bat(BatParams {
                    population: self.pop,
                    alpha: self.alpha.unwrap_or(d.alpha),
                    gamma: self.gamma.unwrap_or(d.gamma),
                    f_min: self.fmin.unwrap_or(d.f_min),
                    f_max: self.fmax.unwrap_or(d.f_max),
                    ..d
                })
            }
            Algorithm::Pso => {
                let d = PsoParams::default();
                AlgorithmConfig::Pso(PsoParams {
                    population: self.pop,
                    c1: self.c1.unwrap_or(d.c1),
                    c2: self.c2.unwrap_or(d.c2),
                    inertia: self.inertia.unwrap_or(d.inertia),
                    ..d
                })
            }
            Algorithm::Ga => {
                let d = GaParams::default();
                AlgorithmConfig::Ga(GaParams {
                    population: self.pop,
                    p_mutation: self.pm.unwrap_or(d.p_mutation),
                    p_crossover: self.pc.unwrap_or(d.p_crossover),
                    ..d
                })
            }
        };
        config.validate()?;
        Ok(config)
    }

    fn configs(&self, names: &[String]) -> Result<Vec<AlgorithmConfig>, CliError> {
        let algorithms = names
            .iter()
            .map(|n| n.trim().parse::<Algorithm>())
            .collect::<Result<Vec<_>, _>>()?;
        algorithms.into_iter().map(|a| self.config(a)).collect()
    }
}

impl ProtocolArgs {
    fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(CliError::Usage(
                "--tolerance must be a non-negative number".into(),
            ));
        }
        if self.max_evals == 0 {
            return Err(CliError::Usage("--max-evals must be positive".into()));
        }
        Ok(())
    }
}

fn resolve_spec(name: &str, dim: Option<usize>) -> Result<BenchmarkSpec, CliError> {
    let entry = benchmarks::lookup(name.trim())?;
    Ok(benchmarks::benchmark_spec(
        entry.name,
        dim.unwrap_or(entry.default_dim),
    )?)
}

#[derive(Serialize)]
struct ProblemMeta {
    function: &'static str,
    dim: usize,
    lower: f64,
    upper: f64,
    known_min: Option<f64>,
    citation: benchmarks::Citation,
}

impl ProblemMeta {
    fn of(spec: &BenchmarkSpec) -> Self {
        let b = spec.objective.bounds();
        Self {
            function: spec.name,
            dim: spec.dim(),
            lower: b.lower()[0],
            upper: b.upper()[0],
            known_min: spec.objective.known_min(),
            citation: spec.citation,
        }
    }
}

#[derive(Serialize)]
struct RunConfig<'a> {
    algorithm: &'a AlgorithmConfig,
    problem: ProblemMeta,
    trials: u64,
    tolerance: f64,
    max_evals: u64,
    master_seed: u64,
    format: Format,
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    args.protocol.validate()?;
    let algorithm: Algorithm = args.algorithm.trim().parse()?;
    let spec = resolve_spec(&args.function, args.protocol.dim)?;
    let config = args.params.config(algorithm)?;
    let format = args.output.format.unwrap_or(Format::Csv);
    let p = &args.protocol;

    let runs = run_experiment(
        std::slice::from_ref(&config),
        &spec,
        Some(p.tolerance),
        p.max_evals,
        p.trials,
        p.seed,
        Execution::Parallel,
    )?;

    let meta = Metadata::new(
        "run",
        RunConfig {
            algorithm: &config,
            problem: ProblemMeta::of(&spec),
            trials: p.trials,
            tolerance: p.tolerance,
            max_evals: p.max_evals,
            master_seed: p.seed,
            format,
        },
    );
    let mut sink = Sink::open(args.output.output.as_deref())?;
    output::write_trials(&mut sink, format, &runs[0].trials)?;
    sink.finish(&meta)
}

#[derive(Serialize)]
struct CompareConfig<'a> {
    algorithms: &'a [AlgorithmConfig],
    problems: Vec<ProblemMeta>,
    trials: u64,
    tolerance: f64,
    max_evals: u64,
    master_seed: u64,
    format: Format,
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    args.protocol.validate()?;
    let configs = args.params.configs(&args.algorithms)?;
    let specs = args
        .functions
        .iter()
        .map(|f| resolve_spec(f, args.protocol.dim))
        .collect::<Result<Vec<_>, _>>()?;
    let format = args.output.format.unwrap_or(Format::Csv);
    let p = &args.protocol;

    let mut rows = Vec::new();
    for spec in &specs {
        let runs = run_experiment(
            &configs,
            spec,
            Some(p.tolerance),
            p.max_evals,
            p.trials,
            p.seed,
            Execution::Parallel,
        )?;
        for r in runs {
            rows.push(output::SummaryRow {
                function: spec.name,
                dim: spec.dim(),
                algorithm: r.algorithm,
                trials: r.summary.trial_count,
                mean_evals: r.summary.mean_evals,
                std_evals: r.summary.std_evals,
                success_rate: r.summary.success_rate,
                master_seed: p.seed,
                tool_version: TOOL_VERSION,
            });
        }
    }

    let meta = Metadata::new(
        "compare",
        CompareConfig {
            algorithms: &configs,
            problems: specs.iter().map(ProblemMeta::of).collect(),
            trials: p.trials,
            tolerance: p.tolerance,
            max_evals: p.max_evals,
            master_seed: p.seed,
            format,
        },
    );
    let mut sink = Sink::open(args.output.output.as_deref())?;
    output::write_summaries(&mut sink, format, &rows)?;
    sink.finish(&meta)
}

#[derive(Serialize)]
struct TraceConfig<'a> {
    algorithm: &'a AlgorithmConfig,
    problem: ProblemMeta,
    iterations: u64,
    seed: u64,
    format: Format,
}

fn cmd_trace(args: TraceArgs) -> Result<(), CliError> {
    let algorithm: Algorithm = args.algorithm.trim().parse()?;
    let spec = resolve_spec(&args.function, args.dim)?;
    if args.iters == 0 {
        return Err(CliError::Usage("--iters must be at least 1".into()));
    }
    let mut config = args.params.config(algorithm)?;
    match &mut config {
        AlgorithmConfig::Bat(p) => p.max_iterations = args.iters,
        AlgorithmConfig::Pso(p) => p.max_iterations = args.iters,
        AlgorithmConfig::Ga(p) => p.max_generations = args.iters,
    }
    let budget = config.population() as u64 * (args.iters + 1);
    let format = args.output.format.unwrap_or(Format::Jsonl);

    let mut records: Vec<TrajectoryRecord> = Vec::new();
    run_trial(&config, &spec, None, budget, args.seed, Some(&mut records))?;

    let meta = Metadata::new(
        "trace",
        TraceConfig {
            algorithm: &config,
            problem: ProblemMeta::of(&spec),
            iterations: args.iters,
            seed: args.seed,
            format,
        },
    );
    let mut sink = Sink::open(args.output.output.as_deref())?;
    output::write_trace(&mut sink, format, &records)?;
    sink.finish(&meta)
}

fn cmd_list() -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for e in benchmarks::registry() {
        writeln!(out, "{}\t{}\tdefault={}", e.name, e.dims, e.default_dim)?;
    }
    Ok(())
}
