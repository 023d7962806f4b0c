use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Optimal,
    /// The filter constraints admit no input.
    Infeasible,
    /// A barrier needed by the filter is nonpositive, so the constraints
    /// cannot be formed.
    Undefined,
}

impl StepStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            StepStatus::Optimal => "optimal",
            StepStatus::Infeasible => "infeasible",
            StepStatus::Undefined => "undefined",
        }
    }
}

/// Everything logged at one sample time.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub state: Vec<f64>,
    pub nominal: Vec<f64>,
    /// Applied input; equals `nominal` when the filter failed.
    pub input: Vec<f64>,
    /// All chain barriers, `NaN` where undefined.
    pub barriers: Vec<f64>,
    pub first_order: Vec<f64>,
    /// `NaN` when margins are not logged or the constraints are undefined.
    pub margin: f64,
    pub status: StepStatus,
    pub in_safe_set: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Logged rows, including the final state.
    pub steps: usize,
    /// The run stopped early on an infeasible or undefined step.
    pub truncated: bool,
    pub barrier_names: Vec<String>,
    /// Column-wise minimum of every logged barrier, ignoring `NaN`.
    pub barrier_min: Vec<f64>,
    /// Minimum over time of each state constraint.
    pub first_order_min: Vec<f64>,
    /// Rows where some state constraint is below `-tolerance`.
    pub violation_count: usize,
    pub infeasible_count: usize,
    pub undefined_count: usize,
    /// Rows outside the certified safe set.
    pub outside_count: usize,
    pub min_margin: f64,
    pub tolerance: f64,
}

impl Summary {
    pub fn worst_first_order(&self) -> f64 {
        self.first_order_min
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// No violation, infeasibility or undefined step.
    pub fn is_clean(&self) -> bool {
        self.violation_count == 0 && self.infeasible_count == 0 && self.undefined_count == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryLog {
    pub dimension: usize,
    pub barrier_names: Vec<String>,
    pub records: Vec<StepRecord>,
    pub summary: Summary,
}

fn column_min(values: impl Iterator<Item = f64>) -> f64 {
    values.filter(|v| !v.is_nan()).fold(f64::NAN, f64::min)
}

impl TrajectoryLog {
    pub(crate) fn new(
        dimension: usize,
        barrier_names: Vec<String>,
        records: Vec<StepRecord>,
        tolerance: f64,
        truncated: bool,
    ) -> Self {
        let cols = barrier_names.len();
        let barrier_min = (0..cols)
            .map(|k| column_min(records.iter().map(|r| r.barriers[k])))
            .collect();
        let first_cols = records.first().map_or(0, |r| r.first_order.len());
        let first_order_min = (0..first_cols)
            .map(|k| column_min(records.iter().map(|r| r.first_order[k])))
            .collect();
        let count = |f: &dyn Fn(&StepRecord) -> bool| records.iter().filter(|r| f(r)).count();
        let summary = Summary {
            steps: records.len(),
            truncated,
            barrier_names: barrier_names.clone(),
            barrier_min,
            first_order_min,
            violation_count: count(&|r| r.first_order.iter().any(|&h| h < -tolerance)),
            infeasible_count: count(&|r| r.status == StepStatus::Infeasible),
            undefined_count: count(&|r| r.status == StepStatus::Undefined),
            outside_count: count(&|r| !r.in_safe_set),
            min_margin: column_min(records.iter().map(|r| r.margin)),
            tolerance,
        };
        Self {
            dimension,
            barrier_names,
            records,
            summary,
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.t)
    }

    pub fn csv_header(&self) -> Vec<String> {
        let m = self.dimension;
        let state_len = self.records.first().map_or(0, |r| r.state.len());
        let mut h = vec!["t".to_string()];
        h.extend((1..=state_len).map(|i| format!("x_{i}")));
        h.extend((1..=m).map(|i| format!("u_nom_{i}")));
        h.extend((1..=m).map(|i| format!("u_{i}")));
        h.extend(self.barrier_names.iter().cloned());
        h.push("margin".into());
        h.push("status".into());
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.csv_header())?;
        for r in &self.records {
            let mut row: Vec<String> = Vec::with_capacity(3 + r.state.len() + r.barriers.len());
            row.push(r.t.to_string());
            row.extend(
                r.state
                    .iter()
                    .chain(&r.nominal)
                    .chain(&r.input)
                    .chain(&r.barriers)
                    .map(|v| v.to_string()),
            );
            row.push(r.margin.to_string());
            row.push(r.status.as_str().to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}
