//! Per-iteration population snapshots for convergence and path plots.

use serde::Serialize;

use crate::domain::Point;

/// One population snapshot taken after an iteration completes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    #[serde(rename = "iter")]
    pub iteration: u64,
    pub positions: Vec<Point>,
    #[serde(rename = "best")]
    pub best_value: f64,
}

/// Receives snapshots in strictly increasing iteration order.
pub trait TrajectorySink {
    fn record(&mut self, record: TrajectoryRecord);
}

impl TrajectorySink for Vec<TrajectoryRecord> {
    fn record(&mut self, record: TrajectoryRecord) {
        debug_assert!(self
            .last()
            .is_none_or(|last| last.iteration < record.iteration));
        self.push(record);
    }
}
