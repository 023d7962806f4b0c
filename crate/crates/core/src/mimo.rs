//! Hyperplane constraints `r_k·x_1 + s_k ≥ 0` on an `m`-dimensional chain
//! with a ball input set.
//!
//! Each hyperplane gets an independent chain of length `n` driven by the
//! projections `r_k·x_i`. Joint feasibility of the `p` resulting
//! constraints is not guaranteed by construction and has to be checked by
//! the caller (see [`crate::qp::feasibility_margin`]).

use serde::{Deserialize, Serialize};

use crate::chain::{self, ChainEval};
use crate::error::Result;
use crate::full::ChainGains;
use crate::model::{HalfspaceConstraint, InputBounds, State, ValidationReport, Violation};
use crate::scalar::{dot, norm, Scalar};
use crate::tuning::{validate_params, Problem};

/// Unit direction `r_k` and offset `s_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneSpec<T> {
    pub direction: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> HyperplaneSpec<T> {
    pub fn new(direction: Vec<T>, offset: T) -> Result<Self> {
        let spec = Self { direction, offset };
        let mut report = ValidationReport::default();
        spec.check_into(0, &mut report);
        report.into_result(spec)
    }

    /// Normalizes `direction` and rescales `offset` to describe the same set.
    pub fn normalized(direction: &[T], offset: T) -> Result<Self> {
        let len = norm(direction);
        Self::new(direction.iter().map(|&v| v / len).collect(), offset / len)
    }

    pub(crate) fn check_into(&self, index: usize, report: &mut ValidationReport) {
        let len = norm(&self.direction);
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
        if !((len - T::one()).abs() <= tol) {
            report.push(Violation::DirectionNotUnit {
                constraint: index + 1,
                norm: len.as_f64(),
            });
        }
        if !self.offset.is_finite() {
            report.push(Violation::NonFinite {
                what: "hyperplane offset",
            });
        }
    }

    /// `r_k·x_1 + s_k`.
    pub fn first_barrier(&self, state: &State<T>) -> T {
        dot(&self.direction, state.block(1)) + self.offset
    }
}

/// Per-hyperplane gains `γ_{k1..kn}` and margins `ε_{k1..kn}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MimoParams<T> {
    pub rows: Vec<ChainGains<T>>,
    /// Subtract `ε_{kn}` inside the closing coefficient.
    #[serde(default)]
    pub top_margin: bool,
}

impl<T: Scalar> MimoParams<T> {
    /// Checks positivity and `γ_{k(n−1)} ≤ √(2ū)` for every row.
    pub fn new(order: usize, rows: Vec<ChainGains<T>>, input: &InputBounds<T>) -> Result<Self> {
        let mut report = ValidationReport::default();
        if !matches!(input, InputBounds::Ball { .. }) {
            report.push(Violation::InputShape { expected: "ball" });
        }
        for row in &rows {
            report.extend(validate_params(
                order,
                &row.gamma,
                &row.epsilon,
                input,
                Problem::Simplified,
            ));
        }
        report.into_result(Self {
            rows,
            top_margin: false,
        })
    }

    /// Same gains and margins for every hyperplane.
    pub fn shared(
        count: usize,
        gamma: Vec<T>,
        epsilon: Vec<T>,
        input: &InputBounds<T>,
    ) -> Result<Self> {
        let order = gamma.len();
        Self::new(order, vec![ChainGains { gamma, epsilon }; count], input)
    }

    pub fn with_top_margin(mut self, on: bool) -> Self {
        self.top_margin = on;
        self
    }
}

pub fn eval_mimo_chain<T: Scalar>(
    spec: &HyperplaneSpec<T>,
    row: &ChainGains<T>,
    state: &State<T>,
) -> Result<ChainEval<T>> {
    state.expect_order(row.len(), spec.direction.len())?;
    let drivers: Vec<T> = (2..=state.order())
        .map(|i| dot(&spec.direction, state.block(i)))
        .collect();
    Ok(chain::evaluate(
        spec.first_barrier(state),
        &drivers,
        &row.gamma,
        &row.epsilon,
    ))
}

/// Every chain is defined and meets its `ε²/γ²` thresholds. Without the
/// top margin the filter only keeps `h_{kn} ≥ 0`, so that is the last
/// threshold.
pub fn in_mimo_safe_set<T: Scalar>(
    specs: &[HyperplaneSpec<T>],
    params: &MimoParams<T>,
    state: &State<T>,
) -> bool {
    specs.iter().zip(&params.rows).all(|(spec, row)| {
        let Ok(e) = eval_mimo_chain(spec, row, state) else {
            return false;
        };
        let n = row.len();
        if params.top_margin {
            return e.meets_thresholds(&row.gamma, &row.epsilon);
        }
        e.is_complete()
            && e.barriers()[n - 1] >= T::zero()
            && e.barriers()[..n - 1]
                .iter()
                .zip(row.gamma.iter().zip(&row.epsilon))
                .all(|(&h, (&g, &eps))| h >= chain::threshold(g, eps))
    })
}

/// Constraint `k` is `r_k·u + C_k ≥ 0`.
pub fn mimo_filter_constraints<T: Scalar>(
    specs: &[HyperplaneSpec<T>],
    params: &MimoParams<T>,
    state: &State<T>,
) -> Result<Vec<HalfspaceConstraint<T>>> {
    specs
        .iter()
        .zip(&params.rows)
        .map(|(spec, row)| {
            let eval = eval_mimo_chain(spec, row, state)?;
            let c = chain::closing_coefficient(&eval, &row.gamma, &row.epsilon, params.top_margin)?;
            Ok(HalfspaceConstraint::new(spec.direction.clone(), c))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplified::{self, SimplifiedParams};

    fn row(gamma: &[f64], epsilon: &[f64]) -> ChainGains<f64> {
        ChainGains {
            gamma: gamma.to_vec(),
            epsilon: epsilon.to_vec(),
        }
    }

    #[test]
    fn projection_drops_orthogonal_coordinates() {
        let spec = HyperplaneSpec::new(vec![1.0, 0.0], 0.0).unwrap();
        let x = State::new(vec![1.0, 7.0, 0.5, -3.0], 2).unwrap();
        let e = eval_mimo_chain(&spec, &row(&[1.0, 1.0], &[0.1, 0.1]), &x).unwrap();
        assert_eq!(e.barrier(1).unwrap(), 1.0);
        assert!((e.barrier(2).unwrap() - 1.4).abs() < 1e-15);

        let spec_y = HyperplaneSpec::new(vec![0.0, 1.0], 0.0).unwrap();
        let e = eval_mimo_chain(&spec_y, &row(&[1.0, 1.0], &[0.1, 0.1]), &x).unwrap();
        assert_eq!(e.barrier(1).unwrap(), 7.0);
    }

    #[test]
    fn scalar_reduction_matches_simplified_chain() {
        let lower = -0.4;
        let gamma = [1.2, 0.9, 2.0];
        let eps = [0.05, 0.02, 0.01];
        let sp = SimplifiedParams::with_gains(lower, gamma.to_vec(), eps.to_vec()).unwrap();
        let spec = HyperplaneSpec::new(vec![1.0], -lower).unwrap();
        let params = MimoParams {
            rows: vec![row(&gamma, &eps)],
            top_margin: true,
        };
        for x in [[0.3, -0.2, 0.1], [2.0, 1.0, -1.0], [-0.35, 0.4, 0.0]] {
            let s = State::siso(x.to_vec()).unwrap();
            let a = simplified::eval_chain(&sp, &s).unwrap();
            let b = eval_mimo_chain(&spec, &params.rows[0], &s).unwrap();
            assert_eq!(a, b);
            if let Ok(ca) = simplified::filter_constraint(&sp, &s) {
                let cb = mimo_filter_constraints(std::slice::from_ref(&spec), &params, &s).unwrap();
                assert_eq!(ca, cb[0]);
            }
        }
    }

    #[test]
    fn top_margin_flag_shifts_coefficient() {
        let spec = HyperplaneSpec::new(vec![1.0], 0.0).unwrap();
        let x = State::siso(vec![1.0, 0.0]).unwrap();
        let off = MimoParams {
            rows: vec![row(&[1.0, 1.0], &[0.1, 0.05])],
            top_margin: false,
        };
        let on = off.clone().with_top_margin(true);
        let specs = [spec];
        let c_off = mimo_filter_constraints(&specs, &off, &x).unwrap()[0].c;
        let c_on = mimo_filter_constraints(&specs, &on, &x).unwrap()[0].c;
        assert!((c_off - c_on - 0.05).abs() < 1e-15);
    }

    #[test]
    fn deep_interior_admits_zero_input() {
        let spec = HyperplaneSpec::new(vec![0.6, 0.8], 10.0).unwrap();
        let params = MimoParams::shared(
            1,
            vec![1.0, 1.0],
            vec![0.1, 0.1],
            &InputBounds::Ball { radius: 1.0 },
        )
        .unwrap();
        let x = State::new(vec![0.0, 0.0, 0.0, 0.0], 2).unwrap();
        let cons = mimo_filter_constraints(&[spec], &params, &x).unwrap();
        assert!(cons[0].c > 1.0);
    }

    #[test]
    fn slab_yields_two_opposing_constraints() {
        let specs = [
            HyperplaneSpec::new(vec![1.0, 0.0], 1.0).unwrap(),
            HyperplaneSpec::new(vec![-1.0, 0.0], 1.0).unwrap(),
        ];
        let params = MimoParams::shared(
            2,
            vec![1.0, 1.0],
            vec![0.1, 0.1],
            &InputBounds::Ball { radius: 1.0 },
        )
        .unwrap();
        let x = State::new(vec![0.0, 0.0, 0.0, 0.0], 2).unwrap();
        let cons = mimo_filter_constraints(&specs, &params, &x).unwrap();
        assert_eq!(cons.len(), 2);
        assert_eq!(cons[1].b, vec![-1.0, 0.0]);
        assert!(in_mimo_safe_set(&specs, &params, &x));
    }

    #[test]
    fn rejects_non_unit_direction_and_cap_violation() {
        assert!(HyperplaneSpec::new(vec![1.0, 1.0], 0.0).is_err());
        let h = HyperplaneSpec::<f64>::normalized(&[3.0, 4.0], 5.0).unwrap();
        assert!((h.offset - 1.0).abs() < 1e-15);
        let ball = InputBounds::Ball { radius: 0.5 };
        assert!(MimoParams::shared(1, vec![1.1, 1.0], vec![0.1, 0.1], &ball).is_err());
        assert!(MimoParams::shared(
            1,
            vec![1.0, 1.0],
            vec![0.1, 0.1],
            &InputBounds::symmetric(1.0)
        )
        .is_err());
    }
}
