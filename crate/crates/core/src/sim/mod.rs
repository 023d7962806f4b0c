//! Fixed-step closed-loop simulation under the safety filter.
//!
//! A [`Scenario`] is read from JSON and compiled into a [`Simulation`]. Each
//! step evaluates the filter constraints at the sampled state, solves the
//! min-norm program against the nominal input, holds the result over the
//! step and advances the chain. Runs are single-threaded and bit-for-bit
//! deterministic; [`sweep`] fans independent runs out over a thread pool.

mod filter;
mod integrate;
mod nominal;
pub mod sampling;
mod scenario;
mod sweep;
mod trajectory;

pub use filter::Filter;
pub use integrate::{exact_step, Integrator};
pub use nominal::{NominalController, NominalSpec, OneOrMany, Segment};
pub use scenario::{ParamsSpec, ProblemSpec, Scenario, SimSettings, Simulation, TuningSpec};
pub use sweep::{sweep, Axis, Grid, SampledStates, SweepReport, SweepRow};
pub use trajectory::{StepRecord, StepStatus, Summary, TrajectoryLog};

use crate::error::{Error, Result};
use crate::model::State;
use crate::qp::{feasibility_margin, solve, FilterProblem, SolveStatus};

impl Simulation {
    /// Number of held steps; `N + 1` rows are logged.
    pub fn step_count(&self) -> usize {
        (self.settings.horizon / self.settings.dt).round() as usize
    }

    /// Allowed undershoot of a state constraint: `5·dt` scaled by the
    /// largest input magnitude when that exceeds one.
    pub fn tolerance(&self) -> f64 {
        5.0 * self.settings.dt * self.input_bounds.largest_magnitude().max(1.0)
    }

    pub fn controller(&self) -> NominalController {
        NominalController::new(
            self.nominal.clone(),
            self.plant.dimension,
            self.settings.seed,
        )
    }

    /// Evaluates and solves the filter at `x`, then advances one step.
    pub fn step(
        &self,
        nominal: &mut NominalController,
        x: &State<f64>,
        t: f64,
    ) -> Result<(State<f64>, StepRecord)> {
        let record = self.record(nominal, x, t)?;
        let next = self
            .settings
            .integrator
            .advance(x.as_slice(), &record.input, self.settings.dt);
        Ok((State::new(next, self.plant.dimension)?, record))
    }

    fn record(
        &self,
        nominal: &mut NominalController,
        x: &State<f64>,
        t: f64,
    ) -> Result<StepRecord> {
        let u_nom = nominal.input(t, x, &self.filter, &self.input_bounds);
        let barriers = self.filter.barrier_values(x)?;
        let first_order = self.filter.first_order_barriers(x);
        let in_safe_set = self.filter.contains(x);
        let (input, margin, status) = match self.filter.constraints(x) {
            Ok(constraints) => {
                let problem = FilterProblem::new(u_nom.clone(), constraints, self.input_bounds);
                let sol = solve(&problem)?;
                let margin = if self.settings.margins {
                    feasibility_margin(&problem)?
                } else {
                    f64::NAN
                };
                let status = match sol.status {
                    SolveStatus::Optimal => StepStatus::Optimal,
                    SolveStatus::Infeasible => StepStatus::Infeasible,
                };
                (sol.u, margin, status)
            }
            Err(Error::Domain { .. }) => (u_nom.clone(), f64::NAN, StepStatus::Undefined),
            Err(e) => return Err(e),
        };
        if !in_safe_set {
            log::debug!("t = {t}: state left the certified set");
        }
        Ok(StepRecord {
            t,
            state: x.as_slice().to_vec(),
            nominal: u_nom,
            input,
            barriers,
            first_order,
            margin,
            status,
            in_safe_set,
        })
    }

    /// Runs from the initial state over the horizon, stopping at the first
    /// infeasible or undefined step.
    pub fn run(&self) -> Result<TrajectoryLog> {
        let steps = self.step_count();
        let dt = self.settings.dt;
        let mut nominal = self.controller();
        let mut x = self.initial_state.clone();
        let mut records = Vec::with_capacity(steps + 1);
        let mut truncated = false;
        for k in 0..=steps {
            let t = k as f64 * dt;
            let (next, record) = self.step(&mut nominal, &x, t)?;
            let status = record.status;
            records.push(record);
            if status != StepStatus::Optimal {
                log::warn!("run truncated at t = {t}: {}", status.as_str());
                truncated = k < steps;
                break;
            }
            x = next;
        }
        Ok(TrajectoryLog::new(
            self.plant.dimension,
            self.filter.barrier_names(),
            records,
            self.tolerance(),
            truncated,
        ))
    }
}

/// Compiles and runs a scenario.
pub fn run(scenario: &Scenario) -> Result<TrajectoryLog> {
    scenario.compile()?.run()
}
