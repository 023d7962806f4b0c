use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::sampling::{default_ranges, sample_states};
use super::scenario::Scenario;
use super::trajectory::Summary;
use crate::error::{Error, Result};

/// Values substituted at one JSON pointer into the base scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    /// RFC 6901 pointer, e.g. `/params/gamma/0`.
    pub pointer: String,
    pub values: Vec<Value>,
}

/// Initial states drawn inside the certified set of every parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledStates {
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    /// Per-order `[lo, hi]`; defaults to [`default_ranges`].
    #[serde(default)]
    pub ranges: Option<Vec<[f64; 2]>>,
}

/// Cartesian product of the axes, times the sampled initial states if any.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub sampled_initial_states: Option<SampledStates>,
}

impl Grid {
    fn parameter_points(&self) -> Vec<Vec<(&str, &Value)>> {
        let mut points = vec![Vec::new()];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push((axis.pointer.as_str(), v));
                        q
                    })
                })
                .collect();
        }
        points
    }

    pub fn point_count(&self) -> usize {
        let params: usize = self.axes.iter().map(|a| a.values.len()).product();
        params * self.sampled_initial_states.as_ref().map_or(1, |s| s.count)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Substituted pointer values, plus `initial_state` when sampled.
    pub key: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub runs: usize,
    pub errors: usize,
    pub runs_with_violations: usize,
    pub total_violations: usize,
    pub total_infeasible: usize,
    pub total_undefined: usize,
    /// Smallest state-constraint value seen in any run.
    pub worst_first_order_min: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// Every run completed without violation, infeasibility or error.
    pub fn is_clean(&self) -> bool {
        self.errors == 0
            && self.runs_with_violations == 0
            && self.total_infeasible == 0
            && self.total_undefined == 0
    }
}

fn patch(base: &Value, assignments: &[(&str, &Value)]) -> Result<Value> {
    let mut doc = base.clone();
    for &(pointer, value) in assignments {
        let slot = doc.pointer_mut(pointer).ok_or_else(|| {
            Error::Scenario(format!(
                "grid pointer {pointer} does not exist in the scenario"
            ))
        })?;
        *slot = value.clone();
    }
    Ok(doc)
}

/// Runs every grid point on `jobs` worker threads (all cores when `None`).
/// Row order is deterministic.
pub fn sweep(base: &Scenario, grid: &Grid, jobs: Option<usize>) -> Result<SweepReport> {
    if grid.point_count() == 0 {
        return Err(Error::Scenario("sweep grid is empty".into()));
    }
    let base_value = serde_json::to_value(base)?;
    let mut scenarios: Vec<(Map<String, Value>, Result<Scenario>)> = Vec::new();
    for point in grid.parameter_points() {
        let mut key = Map::new();
        for &(p, v) in &point {
            key.insert(p.to_string(), v.clone());
        }
        let scenario = patch(&base_value, &point).and_then(Scenario::from_value);
        match (&grid.sampled_initial_states, scenario) {
            (None, s) => scenarios.push((key, s)),
            (Some(spec), Ok(s)) => match sampled(&s, spec) {
                Ok(states) => {
                    for (k, x) in states.into_iter().enumerate() {
                        let mut key = key.clone();
                        key.insert("initial_state".into(), Value::from(k));
                        let mut s = s.clone();
                        s.initial_state = x;
                        scenarios.push((key, Ok(s)));
                    }
                }
                Err(e) => scenarios.push((key, Err(e))),
            },
            (Some(_), Err(e)) => scenarios.push((key, Err(e))),
        }
    }

    let run_all = || -> Vec<SweepRow> {
        scenarios
            .into_par_iter()
            .map(
                |(key, scenario)| match scenario.and_then(|s| super::run(&s)) {
                    Ok(log) => SweepRow {
                        key,
                        summary: Some(log.summary),
                        error: None,
                    },
                    Err(e) => SweepRow {
                        key,
                        summary: None,
                        error: Some(e.to_string()),
                    },
                },
            )
            .collect()
    };
    let rows = match jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::Scenario(format!("thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };
    Ok(aggregate(rows))
}

fn sampled(s: &Scenario, spec: &SampledStates) -> Result<Vec<Vec<f64>>> {
    let filter = s.build_filter()?;
    let ranges = match &spec.ranges {
        Some(r) => r.iter().map(|&[lo, hi]| (lo, hi)).collect(),
        None => default_ranges(&filter),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(sample_states(&filter, &ranges, spec.count, &mut rng)?
        .into_iter()
        .map(|x| x.into_vec())
        .collect())
}

fn aggregate(rows: Vec<SweepRow>) -> SweepReport {
    let summaries = || rows.iter().filter_map(|r| r.summary.as_ref());
    SweepReport {
        runs: rows.len(),
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
        runs_with_violations: summaries().filter(|s| s.violation_count > 0).count(),
        total_violations: summaries().map(|s| s.violation_count).sum(),
        total_infeasible: summaries().map(|s| s.infeasible_count).sum(),
        total_undefined: summaries().map(|s| s.undefined_count).sum(),
        worst_first_order_min: summaries()
            .map(Summary::worst_first_order)
            .fold(f64::INFINITY, f64::min),
        rows,
    }
}
