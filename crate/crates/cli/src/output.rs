use std::io::Write;
use std::path::{Path, PathBuf};

use batswarm::domain::RNG_ALGORITHM;
use batswarm::harness::{Algorithm, TrialResult};
use batswarm::TrajectoryRecord;
use serde::Serialize;

use crate::{CliError, Format, TOOL_VERSION};

/// Reals in CSV carry 17 significant digits so they round-trip exactly.
fn real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

/// Everything needed to reproduce an output file, written as a sidecar.
#[derive(Serialize)]
pub(crate) struct Metadata<C: Serialize> {
    tool: &'static str,
    tool_version: &'static str,
    command: &'static str,
    rng: &'static str,
    seed_derivation: &'static str,
    statistics: &'static str,
    success_rule: &'static str,
    config: C,
}

impl<C: Serialize> Metadata<C> {
    pub(crate) fn new(command: &'static str, config: C) -> Self {
        Self {
            tool: "batswarm",
            tool_version: TOOL_VERSION,
            command,
            rng: RNG_ALGORITHM,
            seed_derivation:
                "trial k of algorithm a: mix64(mix64(master_seed) ^ (tag(a) << 40 | k)), \
                              mix64 = SplitMix64 finalizer, tag bat=1 pso=2 ga=3",
            statistics:
                "mean and sample std (divisor s-1) of evaluations over successful trials only; \
                         success_rate over all trials",
            success_rule:
                "best - known_min <= tolerance, checked after initialization and after each \
                           full iteration; evaluations counted at that point",
            config,
        }
    }
}

/// Output is buffered and only written once the whole run has succeeded, so
/// a failed run never leaves a partial file behind.
pub(crate) struct Sink {
    path: Option<PathBuf>,
    buf: Vec<u8>,
}

impl Sink {
    pub(crate) fn open(path: Option<&Path>) -> Result<Self, CliError> {
        Ok(Self {
            path: path.map(Path::to_path_buf),
            buf: Vec::new(),
        })
    }

    pub(crate) fn finish<C: Serialize>(self, meta: &Metadata<C>) -> Result<(), CliError> {
        match self.path {
            None => {
                let stdout = std::io::stdout();
                let mut out = stdout.lock();
                out.write_all(&self.buf)?;
                out.flush()?;
            }
            Some(path) => {
                std::fs::write(&path, &self.buf)?;
                let mut side = path.into_os_string();
                side.push(".meta.json");
                let mut json = serde_json::to_vec_pretty(meta)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                json.push(b'\n');
                std::fs::write(side, json)?;
            }
        }
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Runtime(e.to_string())
}

fn write_jsonl<T: Serialize>(
    sink: &mut Sink,
    items: impl IntoIterator<Item = T>,
) -> Result<(), CliError> {
    for item in items {
        serde_json::to_writer(&mut sink.buf, &item)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        sink.buf.push(b'\n');
    }
    Ok(())
}

pub(crate) fn write_trials(
    sink: &mut Sink,
    format: Format,
    trials: &[TrialResult],
) -> Result<(), CliError> {
    match format {
        Format::Jsonl => write_jsonl(sink, trials),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink.buf);
            w.write_record([
                "algorithm",
                "function",
                "dim",
                "seed",
                "evaluations_used",
                "success",
                "best_value",
                "iterations",
            ])
            .map_err(csv_error)?;
            for t in trials {
                w.write_record([
                    t.algorithm.to_string(),
                    t.function.clone(),
                    t.dim.to_string(),
                    t.seed.to_string(),
                    t.evaluations_used.to_string(),
                    t.success.to_string(),
                    real(t.best_value),
                    t.iterations.to_string(),
                ])
                .map_err(csv_error)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Debug, Serialize)]
pub(crate) struct SummaryRow {
    pub function: &'static str,
    pub dim: usize,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub mean_evals: Option<f64>,
    pub std_evals: Option<f64>,
    pub success_rate: f64,
    pub master_seed: u64,
    pub tool_version: &'static str,
}

pub(crate) fn write_summaries(
    sink: &mut Sink,
    format: Format,
    rows: &[SummaryRow],
) -> Result<(), CliError> {
    match format {
        Format::Jsonl => write_jsonl(sink, rows),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink.buf);
            w.write_record([
                "function",
                "dim",
                "algorithm",
                "trials",
                "mean_evals",
                "std_evals",
                "success_rate",
                "master_seed",
                "tool_version",
            ])
            .map_err(csv_error)?;
            for r in rows {
                w.write_record([
                    r.function.to_string(),
                    r.dim.to_string(),
                    r.algorithm.to_string(),
                    r.trials.to_string(),
                    opt_real(r.mean_evals),
                    opt_real(r.std_evals),
                    real(r.success_rate),
                    r.master_seed.to_string(),
                    r.tool_version.to_string(),
                ])
                .map_err(csv_error)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub(crate) fn write_trace(
    sink: &mut Sink,
    format: Format,
    records: &[TrajectoryRecord],
) -> Result<(), CliError> {
    match format {
        Format::Jsonl => write_jsonl(sink, records),
        Format::Csv => {
            let dim = records
                .first()
                .and_then(|r| r.positions.first())
                .map_or(0, |p| p.len());
            let mut w = csv::Writer::from_writer(&mut sink.buf);
            let mut header = vec!["iter".to_string(), "agent".to_string()];
            header.extend((0..dim).map(|k| format!("x{k}")));
            header.push("best".into());
            w.write_record(&header).map_err(csv_error)?;
            for r in records {
                for (i, p) in r.positions.iter().enumerate() {
                    let mut row = vec![r.iteration.to_string(), i.to_string()];
                    row.extend(p.iter().map(|&x| real(x)));
                    row.push(real(r.best_value));
                    w.write_record(&row).map_err(csv_error)?;
                }
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for v in [0.1, 1.0 / 3.0, 877.25, 1e-300, -2.000_000_225_070_78] {
            assert_eq!(real(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(opt_real(None), "");
        assert_eq!(real(f64::INFINITY), "inf");
    }
}
