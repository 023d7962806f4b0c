use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::filter::Filter;
use crate::error::{Error, Result};
use crate::model::{InputBounds, State};

/// A scalar broadcast to every input component, or one value per component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn expand(&self, m: usize) -> Result<Vec<f64>> {
        match self {
            OneOrMany::One(v) => Ok(vec![*v; m]),
            OneOrMany::Many(v) if v.len() == m => Ok(v.clone()),
            OneOrMany::Many(v) => Err(Error::Scenario(format!(
                "nominal value has {} components, plant has {m}",
                v.len()
            ))),
        }
    }
}

impl From<f64> for OneOrMany {
    fn from(v: f64) -> Self {
        OneOrMany::One(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub value: OneOrMany,
}

/// Nominal controller `u_nom(t, x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NominalSpec {
    Constant {
        value: OneOrMany,
    },
    /// `A sin(2π f t + φ)` per component; `frequency` in hertz.
    Sinusoid {
        amplitude: OneOrMany,
        frequency: f64,
        #[serde(default = "zero")]
        phase: OneOrMany,
    },
    /// Piecewise constant; before the first segment the input is zero.
    Schedule {
        segments: Vec<Segment>,
    },
    /// Saturated input toward the nearest state constraint.
    Adversarial,
    /// Uniform draws from the input set, each held for `hold` seconds.
    Random {
        hold: f64,
    },
}

fn zero() -> OneOrMany {
    OneOrMany::One(0.0)
}

impl NominalSpec {
    pub(crate) fn check(&self, m: usize) -> Result<()> {
        match self {
            NominalSpec::Constant { value } => value.expand(m).map(drop),
            NominalSpec::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => {
                amplitude.expand(m)?;
                phase.expand(m)?;
                if !frequency.is_finite() {
                    return Err(Error::Scenario("sinusoid frequency must be finite".into()));
                }
                Ok(())
            }
            NominalSpec::Schedule { segments } => {
                if segments.windows(2).any(|w| w[1].start < w[0].start) {
                    return Err(Error::Scenario(
                        "schedule segments must be sorted by start".into(),
                    ));
                }
                segments
                    .iter()
                    .try_for_each(|s| s.value.expand(m).map(drop))
            }
            NominalSpec::Adversarial => Ok(()),
            NominalSpec::Random { hold } => {
                if *hold > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Scenario("random nominal needs hold > 0".into()))
                }
            }
        }
    }
}

/// Stateful evaluator of a [`NominalSpec`]; the only source of randomness
/// in a run.
#[derive(Clone, Debug)]
pub struct NominalController {
    spec: NominalSpec,
    dimension: usize,
    rng: ChaCha8Rng,
    held: Option<(u64, Vec<f64>)>,
}

impl NominalController {
    pub fn new(spec: NominalSpec, dimension: usize, seed: u64) -> Self {
        Self {
            spec,
            dimension,
            rng: ChaCha8Rng::seed_from_u64(seed),
            held: None,
        }
    }

    pub fn input(
        &mut self,
        t: f64,
        x: &State<f64>,
        filter: &Filter,
        bounds: &InputBounds<f64>,
    ) -> Vec<f64> {
        let m = self.dimension;
        let expand = |v: &OneOrMany| v.expand(m).expect("checked at compile time");
        match &self.spec {
            NominalSpec::Constant { value } => expand(value),
            NominalSpec::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => {
                let w = 2.0 * std::f64::consts::PI * frequency * t;
                expand(amplitude)
                    .iter()
                    .zip(expand(phase))
                    .map(|(a, p)| a * (w + p).sin())
                    .collect()
            }
            NominalSpec::Schedule { segments } => segments
                .iter()
                .rev()
                .find(|s| s.start <= t)
                .map(|s| expand(&s.value))
                .unwrap_or_else(|| vec![0.0; m]),
            NominalSpec::Adversarial => filter.adversarial_input(x, bounds),
            NominalSpec::Random { hold } => {
                let slot = (t / hold + 1e-9).floor() as u64;
                if self.held.as_ref().is_none_or(|(s, _)| *s != slot) {
                    let draw = sample_input(&mut self.rng, bounds, m);
                    self.held = Some((slot, draw));
                }
                self.held
                    .as_ref()
                    .map(|(_, v)| v.clone())
                    .unwrap_or_default()
            }
        }
    }
}

fn sample_input(rng: &mut ChaCha8Rng, bounds: &InputBounds<f64>, m: usize) -> Vec<f64> {
    match *bounds {
        InputBounds::Box { lower, upper } => {
            (0..m).map(|_| rng.random_range(lower..=upper)).collect()
        }
        InputBounds::Ball { radius } => loop {
            let v: Vec<f64> = (0..m).map(|_| rng.random_range(-radius..=radius)).collect();
            if v.iter().map(|c| c * c).sum::<f64>() <= radius * radius {
                break v;
            }
        },
    }
}
