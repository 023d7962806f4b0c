//! Scenario files and their compilation into a runnable [`Simulation`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::filter::Filter;
use super::integrate::Integrator;
use super::nominal::NominalSpec;
use crate::error::{Error, Result};
use crate::full::{reparametrize, ChainGains, FullParams};
use crate::mimo::{HyperplaneSpec, MimoParams};
use crate::model::{
    validate_plant, InputBounds, PlantSpec, State, StateBounds, ValidationReport, Violation,
};
use crate::simplified::SimplifiedParams;
use crate::tuning::{tune, validate_params, Problem, TuningInputs};

/// Which constraint family the filter certifies, with its geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    Simplified {
        lower_bound: f64,
    },
    Full {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Mimo {
        hyperplanes: Vec<HyperplaneSpec<f64>>,
        #[serde(default)]
        top_margin: bool,
    },
}

/// Explicit gains and margins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamsSpec {
    /// One value per derivative order, shared by every chain.
    Shared { gamma: Vec<f64>, epsilon: Vec<f64> },
    /// Independent gains for each lower and upper chain of a box problem.
    Chains {
        lower: Vec<ChainGains<f64>>,
        upper: Vec<ChainGains<f64>>,
    },
    /// Independent gains for each hyperplane.
    Rows { rows: Vec<ChainGains<f64>> },
}

/// Tuning hyperparameters; bounds come from the rest of the scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuningSpec {
    pub delta: f64,
    pub gamma1: f64,
    #[serde(default)]
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    #[serde(default)]
    pub eta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSettings {
    pub dt: f64,
    #[serde(rename = "T", alias = "horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default)]
    pub seed: u64,
    /// Log the feasibility margin at every step.
    #[serde(default = "default_true")]
    pub margins: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub plant: PlantSpec,
    pub input_bounds: InputBounds<f64>,
    pub problem: ProblemSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuning: Option<TuningSpec>,
    pub initial_state: Vec<f64>,
    pub nominal: NominalSpec,
    pub sim: SimSettings,
}

/// A validated scenario ready to run.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub plant: PlantSpec,
    pub input_bounds: InputBounds<f64>,
    pub filter: Filter,
    pub initial_state: State<f64>,
    pub nominal: NominalSpec,
    pub settings: SimSettings,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        Ok(serde_json::from_value(value)?)
    }

    /// Builds the filter without checking the initial state or the
    /// simulation settings.
    pub fn build_filter(&self) -> Result<Filter> {
        let mut report = validate_plant::<f64>(&self.plant, &self.input_bounds, None);
        report.into_result(())?;
        report = ValidationReport::default();
        let n = self.plant.order;
        let filter = match &self.problem {
            ProblemSpec::Simplified { lower_bound } => {
                self.expect_siso_box()?;
                let (gamma, epsilon) = match self.explicit_params()? {
                    ParamsSpec::Shared { gamma, epsilon } => (gamma.clone(), epsilon.clone()),
                    _ => {
                        return Err(scenario(
                            "simplified problems take shared `gamma`/`epsilon` params",
                        ))
                    }
                };
                expect_len("γ", n, gamma.len())?;
                Filter::Simplified(SimplifiedParams::new(
                    *lower_bound,
                    gamma,
                    epsilon,
                    &self.input_bounds,
                )?)
            }
            ProblemSpec::Full { lower, upper } => {
                self.expect_siso_box()?;
                let bounds = StateBounds::new(lower.clone(), upper.clone())?;
                expect_len("state bounds", n, bounds.order())?;
                Filter::Full(self.full_params(bounds)?)
            }
            ProblemSpec::Mimo {
                hyperplanes,
                top_margin,
            } => {
                if !matches!(self.input_bounds, InputBounds::Ball { .. }) {
                    report.push(Violation::InputShape { expected: "ball" });
                }
                if hyperplanes.is_empty() {
                    return Err(scenario("at least one hyperplane is required"));
                }
                for (k, h) in hyperplanes.iter().enumerate() {
                    if h.direction.len() != self.plant.dimension {
                        report.push(Violation::Length {
                            what: "hyperplane direction",
                            expected: self.plant.dimension,
                            found: h.direction.len(),
                        });
                    } else {
                        h.check_into(k, &mut report);
                    }
                }
                report.into_result(())?;
                let rows = match self.explicit_params()? {
                    ParamsSpec::Shared { gamma, epsilon } => vec![
                        ChainGains {
                            gamma: gamma.clone(),
                            epsilon: epsilon.clone(),
                        };
                        hyperplanes.len()
                    ],
                    ParamsSpec::Rows { rows } => rows.clone(),
                    ParamsSpec::Chains { .. } => {
                        return Err(scenario("mimo problems take shared params or `rows`"))
                    }
                };
                expect_len("params rows", hyperplanes.len(), rows.len())?;
                let params =
                    MimoParams::new(n, rows, &self.input_bounds)?.with_top_margin(*top_margin);
                Filter::Mimo {
                    hyperplanes: hyperplanes.clone(),
                    params,
                }
            }
        };
        Ok(filter)
    }

    /// Validates everything and fixes the initial state.
    pub fn compile(&self) -> Result<Simulation> {
        let filter = self.build_filter()?;
        let s = &self.sim;
        if !(s.dt > 0.0 && s.dt.is_finite()) {
            return Err(scenario(format!("dt must be positive, got {}", s.dt)));
        }
        if !(s.horizon >= s.dt && s.horizon.is_finite()) {
            return Err(scenario(format!(
                "T must be at least dt, got {}",
                s.horizon
            )));
        }
        let initial_state = State::new(self.initial_state.clone(), self.plant.dimension)?;
        initial_state.expect_order(self.plant.order, self.plant.dimension)?;
        if !filter.contains(&initial_state) {
            return Err(scenario("initial state is outside the certified safe set"));
        }
        self.nominal.check(self.plant.dimension)?;
        Ok(Simulation {
            plant: self.plant,
            input_bounds: self.input_bounds,
            filter,
            initial_state,
            nominal: self.nominal.clone(),
            settings: s.clone(),
        })
    }

    fn expect_siso_box(&self) -> Result<()> {
        if self.plant.dimension != 1 || !matches!(self.input_bounds, InputBounds::Box { .. }) {
            return Err(Error::Validation(ValidationReport::single(
                Violation::InputShape { expected: "box" },
            )));
        }
        Ok(())
    }

    fn explicit_params(&self) -> Result<&ParamsSpec> {
        match (&self.params, &self.tuning) {
            (Some(p), None) => Ok(p),
            (None, Some(_)) => Err(scenario("`tuning` is only supported for full problems")),
            (Some(_), Some(_)) => Err(scenario("give either `params` or `tuning`, not both")),
            (None, None) => Err(scenario("missing `params`")),
        }
    }

    fn full_params(&self, bounds: StateBounds<f64>) -> Result<FullParams<f64>> {
        let n = bounds.order();
        match (&self.params, &self.tuning) {
            (Some(_), Some(_)) => Err(scenario("give either `params` or `tuning`, not both")),
            (None, None) => Err(scenario("missing `params` or `tuning`")),
            (None, Some(t)) => {
                let inputs = TuningInputs {
                    delta: t.delta,
                    gamma1: t.gamma1,
                    alpha: t.alpha.clone(),
                    beta: t.beta.clone(),
                    eta: t.eta.clone(),
                    input_bounds: self.input_bounds,
                    state_bounds: bounds.clone(),
                };
                inputs.validate().into_result(())?;
                tune(&inputs)?.to_full_params(bounds)
            }
            (Some(ParamsSpec::Shared { gamma, epsilon }), None) => {
                validate_params(n, gamma, epsilon, &self.input_bounds, Problem::Full)
                    .into_result(())?;
                reparametrize(n, gamma, epsilon, bounds)
            }
            (Some(ParamsSpec::Chains { lower, upper }), None) => {
                let mut report = ValidationReport::default();
                for chain in lower.iter().chain(upper) {
                    report.extend(validate_params(
                        chain.len(),
                        &chain.gamma,
                        &chain.epsilon,
                        &self.input_bounds,
                        Problem::Full,
                    ));
                }
                report.into_result(())?;
                FullParams::new(bounds, lower.clone(), upper.clone())
            }
            (Some(ParamsSpec::Rows { .. }), None) => Err(scenario(
                "full problems take shared params or `lower`/`upper` chains",
            )),
        }
    }
}

fn scenario(msg: impl Into<String>) -> Error {
    Error::Scenario(msg.into())
}

fn expect_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Validation(ValidationReport::single(
            Violation::Length {
                what,
                expected,
                found,
            },
        )))
    }
}
