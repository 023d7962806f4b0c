//! Analytic input-constrained control barrier function (ICCBF) safety
//! filters for chains of integrators.
//!
//! The plant is `ẋ_1 = x_2, …, ẋ_n = u` with bounded `u`. Three families of
//! state constraints are supported, each with a recursively built barrier
//! chain whose final constraint on `u` is always satisfiable inside the
//! certified set:
//!
//! * [`simplified`]: a single lower bound on `x_1`;
//! * [`full`]: box bounds on every derivative, with gains from [`tuning`];
//! * [`mimo`]: hyperplane bounds on the position of an `m`-dimensional chain.
//!
//! [`qp`] solves the min-norm filter program, and [`sim`] runs closed-loop
//! scenarios that check forward invariance empirically.
//!
//! Math is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases below
//! fix double precision, which the simulator uses throughout.

pub mod chain;
pub mod error;
pub mod full;
pub mod mimo;
pub mod model;
pub mod qp;
pub mod scalar;
pub mod sim;
pub mod simplified;
pub mod stopping;
pub mod tuning;

pub use error::{Error, Result};
pub use model::{
    validate_plant, HalfspaceConstraint, InputBounds, PlantSpec, State, StateBounds,
    ValidationReport, Violation,
};
pub use scalar::Scalar;

pub type State64 = model::State<f64>;
pub type InputBounds64 = model::InputBounds<f64>;
pub type StateBounds64 = model::StateBounds<f64>;
pub type Halfspace64 = model::HalfspaceConstraint<f64>;
pub type ChainEval64 = chain::ChainEval<f64>;
pub type SimplifiedParams64 = simplified::SimplifiedParams<f64>;
pub type FullParams64 = full::FullParams<f64>;
pub type FullChainEval64 = full::FullChainEval<f64>;
pub type TuningInputs64 = tuning::TuningInputs<f64>;
pub type TunedParams64 = tuning::TunedParams<f64>;
pub type HyperplaneSpec64 = mimo::HyperplaneSpec<f64>;
pub type MimoParams64 = mimo::MimoParams<f64>;
pub type FilterProblem64 = qp::FilterProblem<f64>;
pub type FilterSolution64 = qp::FilterSolution<f64>;
