//! Plant, bound, and constraint types shared by every filter.
//!
//! States use the block layout `[x_1; x_2; ...; x_n]` where each block has
//! `dimension` entries. Single-input problems are the `dimension == 1` case
//! of the same layout.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Order and per-axis dimension of an integrator chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantSpec {
    pub order: usize,
    #[serde(default = "one")]
    pub dimension: usize,
}

fn one() -> usize {
    1
}

impl PlantSpec {
    pub fn siso(order: usize) -> Self {
        Self {
            order,
            dimension: 1,
        }
    }

    pub fn state_len(&self) -> usize {
        self.order * self.dimension
    }
}

/// Actuator limits: a scalar interval or a Euclidean ball.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputBounds<T> {
    Box { lower: T, upper: T },
    Ball { radius: T },
}

impl<T: Scalar> InputBounds<T> {
    pub fn symmetric(limit: T) -> Self {
        InputBounds::Box {
            lower: -limit,
            upper: limit,
        }
    }

    /// Largest admissible push in the positive direction (`ū` or the ball radius).
    pub fn upper_magnitude(&self) -> T {
        match *self {
            InputBounds::Box { upper, .. } => upper,
            InputBounds::Ball { radius } => radius,
        }
    }

    /// `min{-u̱, ū}` for boxes, the radius for balls.
    pub fn symmetric_magnitude(&self) -> T {
        match *self {
            InputBounds::Box { lower, upper } => (-lower).min(upper),
            InputBounds::Ball { radius } => radius,
        }
    }

    pub fn largest_magnitude(&self) -> T {
        match *self {
            InputBounds::Box { lower, upper } => (-lower).max(upper),
            InputBounds::Ball { radius } => radius,
        }
    }
}

/// Per-order box bounds `x̱_j ≤ x_j ≤ x̄_j`, `j = 1..n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateBounds<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Scalar> StateBounds<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        let bounds = Self { lower, upper };
        let mut report = ValidationReport::default();
        bounds.check_into(bounds.lower.len(), &mut report);
        report.into_result(bounds)
    }

    /// Symmetric bounds `[-limit_j, limit_j]`.
    pub fn symmetric(limits: &[T]) -> Result<Self> {
        Self::new(limits.iter().map(|&l| -l).collect(), limits.to_vec())
    }

    pub fn order(&self) -> usize {
        self.lower.len()
    }

    pub fn width(&self, j: usize) -> T {
        self.upper[j] - self.lower[j]
    }

    pub(crate) fn check_into(&self, order: usize, report: &mut ValidationReport) {
        if self.lower.len() != order || self.upper.len() != order {
            report.push(Violation::Length {
                what: "state bounds",
                expected: order,
                found: self.lower.len().min(self.upper.len()),
            });
            return;
        }
        for (j, (&lo, &hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            let order = j + 1;
            if !lo.is_finite() || !hi.is_finite() {
                report.push(Violation::NonFinite {
                    what: "state bound",
                });
                continue;
            }
            if lo >= hi {
                report.push(Violation::StateBoundOrder { order });
            }
            if order >= 2 {
                if lo >= T::zero() {
                    report.push(Violation::StateLowerNotNegative { order });
                }
                if hi <= T::zero() {
                    report.push(Violation::StateUpperNotPositive { order });
                }
            }
        }
    }
}

/// One affine input constraint `b·u + c ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceConstraint<T> {
    pub b: Vec<T>,
    pub c: T,
}

impl<T: Scalar> HalfspaceConstraint<T> {
    pub fn new(b: Vec<T>, c: T) -> Self {
        Self { b, c }
    }

    /// Scalar lower bound `u ≥ -c`.
    pub fn lower(c: T) -> Self {
        Self {
            b: vec![T::one()],
            c,
        }
    }

    /// Scalar upper bound `u ≤ c`.
    pub fn upper(c: T) -> Self {
        Self {
            b: vec![-T::one()],
            c,
        }
    }

    pub fn dimension(&self) -> usize {
        self.b.len()
    }

    /// Signed slack `b·u + c` at `u`.
    pub fn slack(&self, u: &[T]) -> T {
        crate::scalar::dot(&self.b, u) + self.c
    }
}

/// Plant state in block layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct State<T> {
    values: Vec<T>,
    dimension: usize,
}

impl<T: Scalar> State<T> {
    pub fn new(values: Vec<T>, dimension: usize) -> Result<Self> {
        if dimension == 0 || values.is_empty() || !values.len().is_multiple_of(dimension) {
            return Err(Error::Dimension {
                what: "state",
                expected: dimension.max(1),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(ValidationReport::single(
                Violation::NonFinite { what: "state" },
            )));
        }
        Ok(Self { values, dimension })
    }

    /// Scalar chain state `(x_1, ..., x_n)`.
    pub fn siso(values: Vec<T>) -> Result<Self> {
        Self::new(values, 1)
    }

    pub fn order(&self) -> usize {
        self.values.len() / self.dimension
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<T> {
        self.values
    }

    /// Block `x_i` for derivative order `i` (1-based).
    pub fn block(&self, order: usize) -> &[T] {
        let start = (order - 1) * self.dimension;
        &self.values[start..start + self.dimension]
    }

    /// Scalar entry `x_i` of a single-input chain (1-based).
    pub fn x(&self, order: usize) -> T {
        debug_assert_eq!(self.dimension, 1);
        self.values[order - 1]
    }

    pub(crate) fn expect_order(&self, order: usize, dimension: usize) -> Result<()> {
        if self.order() != order || self.dimension != dimension {
            return Err(Error::Dimension {
                what: "state",
                expected: order * dimension,
                found: self.values.len(),
            });
        }
        Ok(())
    }
}

/// One violated invariant.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    OrderZero,
    DimensionZero,
    InputLowerNotNegative,
    InputUpperNotPositive,
    BallRadiusNotPositive,
    /// Box bounds where a ball is required or vice versa.
    InputShape {
        expected: &'static str,
    },
    StateBoundOrder {
        order: usize,
    },
    StateLowerNotNegative {
        order: usize,
    },
    StateUpperNotPositive {
        order: usize,
    },
    Length {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    NonFinite {
        what: &'static str,
    },
    GainNotPositive {
        index: usize,
    },
    MarginNotPositive {
        index: usize,
    },
    GainCap {
        index: usize,
        value: f64,
        cap: f64,
    },
    DirectionNotUnit {
        constraint: usize,
        norm: f64,
    },
    OutOfRange {
        what: &'static str,
        value: f64,
    },
    FractionOutOfRange {
        what: &'static str,
        index: usize,
        value: f64,
    },
    UnsupportedOrder {
        order: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OrderZero => write!(f, "n ≥ 1 required"),
            Violation::DimensionZero => write!(f, "m ≥ 1 required"),
            Violation::InputLowerNotNegative => write!(f, "u̱ < 0 required"),
            Violation::InputUpperNotPositive => write!(f, "ū > 0 required"),
            Violation::BallRadiusNotPositive => write!(f, "ball radius > 0 required"),
            Violation::InputShape { expected } => write!(f, "{expected} input bounds required"),
            Violation::StateBoundOrder { order } => {
                write!(f, "x̱_{order} < x̄_{order} required")
            }
            Violation::StateLowerNotNegative { order } => {
                write!(f, "x̱_j < 0 for j ≥ 2 (violated at j = {order})")
            }
            Violation::StateUpperNotPositive { order } => {
                write!(f, "x̄_j > 0 for j ≥ 2 (violated at j = {order})")
            }
            Violation::Length {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected length {expected}, found {found}"),
            Violation::NonFinite { what } => write!(f, "{what} must be finite"),
            Violation::GainNotPositive { index } => write!(f, "γ_i > 0 required (i = {index})"),
            Violation::MarginNotPositive { index } => write!(f, "ε_i > 0 required (i = {index})"),
            Violation::GainCap { index, value, cap } => {
                write!(
                    f,
                    "γ_{index} = {value} exceeds the implementability cap {cap}"
                )
            }
            Violation::DirectionNotUnit { constraint, norm } => {
                write!(
                    f,
                    "hyperplane {constraint} direction has norm {norm}, expected 1"
                )
            }
            Violation::OutOfRange { what, value } => {
                write!(f, "{what} = {value} out of range")
            }
            Violation::FractionOutOfRange { what, index, value } => {
                write!(f, "{what}_{index} = {value} must lie in (0, 1)")
            }
            Violation::UnsupportedOrder { order } => {
                write!(f, "no tuning procedure for n = {order}")
            }
        }
    }
}

/// Every violated invariant found by a validation pass; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn single(violation: Violation) -> Self {
        Self {
            violations: vec![violation],
        }
    }

    pub fn push(&mut self, violation: Violation) {
        self.violations.push(violation);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, violation: &Violation) -> bool {
        self.violations.contains(violation)
    }

    pub fn into_result<V>(self, value: V) -> Result<V> {
        if self.is_valid() {
            Ok(value)
        } else {
            Err(Error::Validation(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_input_bounds<T: Scalar>(
    bounds: &InputBounds<T>,
    report: &mut ValidationReport,
) {
    match *bounds {
        InputBounds::Box { lower, upper } => {
            if !lower.is_finite() || !upper.is_finite() {
                report.push(Violation::NonFinite {
                    what: "input bound",
                });
                return;
            }
            if lower >= T::zero() {
                report.push(Violation::InputLowerNotNegative);
            }
            if upper <= T::zero() {
                report.push(Violation::InputUpperNotPositive);
            }
        }
        InputBounds::Ball { radius } => {
            if !(radius > T::zero()) || !radius.is_finite() {
                report.push(Violation::BallRadiusNotPositive);
            }
        }
    }
}

/// Checks plant, input bounds, and optional state bounds; never fails.
pub fn validate_plant<T: Scalar>(
    spec: &PlantSpec,
    bounds: &InputBounds<T>,
    state_bounds: Option<&StateBounds<T>>,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    if spec.order == 0 {
        report.push(Violation::OrderZero);
    }
    if spec.dimension == 0 {
        report.push(Violation::DimensionZero);
    }
    check_input_bounds(bounds, &mut report);
    if let InputBounds::Box { .. } = bounds {
        if spec.dimension > 1 {
            report.push(Violation::InputShape { expected: "ball" });
        }
    }
    if let Some(sb) = state_bounds {
        sb.check_into(spec.order, &mut report);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_integrator_with_unit_box_is_valid() {
        let report = validate_plant(&PlantSpec::siso(2), &InputBounds::symmetric(1.0), None);
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn positive_lower_input_bound_is_reported() {
        let bounds = InputBounds::Box {
            lower: 0.5,
            upper: 1.0,
        };
        let report = validate_plant(&PlantSpec::siso(2), &bounds, None);
        assert_eq!(report.violations, vec![Violation::InputLowerNotNegative]);
        assert_eq!(report.to_string(), "u̱ < 0 required");
    }

    #[test]
    fn positive_lower_velocity_bound_is_reported() {
        let sb = StateBounds {
            lower: vec![-1.0, 0.1, -1.0],
            upper: vec![1.0, 1.0, 1.0],
        };
        let report = validate_plant(&PlantSpec::siso(3), &InputBounds::symmetric(1.0), Some(&sb));
        assert_eq!(
            report.violations,
            vec![Violation::StateLowerNotNegative { order: 2 }]
        );
        assert!(report.to_string().starts_with("x̱_j < 0 for j ≥ 2"));
    }

    #[test]
    fn first_order_bounds_may_share_a_sign() {
        let sb = StateBounds::new(vec![2.0, -1.0], vec![5.0, 1.0]).unwrap();
        let report = validate_plant(&PlantSpec::siso(2), &InputBounds::symmetric(1.0), Some(&sb));
        assert!(report.is_valid());
    }

    #[test]
    fn report_collects_every_violation() {
        let spec = PlantSpec {
            order: 0,
            dimension: 0,
        };
        let bounds = InputBounds::Box {
            lower: 1.0,
            upper: -1.0,
        };
        let report = validate_plant(&spec, &bounds, None);
        assert_eq!(report.violations.len(), 4);
    }

    #[test]
    fn ball_radius_must_be_positive() {
        let report = validate_plant(
            &PlantSpec {
                order: 2,
                dimension: 2,
            },
            &InputBounds::Ball { radius: 0.0 },
            None,
        );
        assert_eq!(report.violations, vec![Violation::BallRadiusNotPositive]);
    }

    #[test]
    fn state_blocks() {
        let s = State::new(vec![1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(s.order(), 2);
        assert_eq!(s.block(2), &[3.0, 4.0]);
        assert!(State::new(vec![1.0, 2.0, 3.0], 2).is_err());
        assert!(State::siso(vec![f64::NAN]).is_err());
    }

    #[test]
    fn halfspace_slack() {
        let h = HalfspaceConstraint::<f64>::upper(0.3);
        assert!((h.slack(&[0.1]) - 0.2).abs() < 1e-15);
        assert_eq!(HalfspaceConstraint::lower(0.9).slack(&[-0.9]), 0.0);
    }
}
