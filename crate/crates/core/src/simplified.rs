//! Single lower bound `x_1 ≥ x̱_1` on a scalar integrator chain.

use serde::{Deserialize, Serialize};

use crate::chain::{self, ChainEval};
use crate::error::Result;
use crate::model::{HalfspaceConstraint, InputBounds, State, ValidationReport};
use crate::scalar::Scalar;
use crate::tuning::{check_gains_and_margins, validate_params, Problem};

/// Barrier location with per-order gains `γ_1..γ_n` and margins `ε_1..ε_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplifiedParams<T> {
    pub barrier: T,
    pub gamma: Vec<T>,
    pub epsilon: Vec<T>,
}

impl<T: Scalar> SimplifiedParams<T> {
    /// Validates positivity and the implementability cap `γ_{n-1} ≤ √(2ū)`.
    pub fn new(barrier: T, gamma: Vec<T>, epsilon: Vec<T>, input: &InputBounds<T>) -> Result<Self> {
        let report = validate_params(gamma.len(), &gamma, &epsilon, input, Problem::Simplified);
        report.into_result(Self {
            barrier,
            gamma,
            epsilon,
        })
    }

    /// Validates positivity only, for evaluating barriers without an input limit.
    pub fn with_gains(barrier: T, gamma: Vec<T>, epsilon: Vec<T>) -> Result<Self> {
        let mut report = ValidationReport::default();
        check_gains_and_margins(gamma.len(), &gamma, &epsilon, &mut report);
        report.into_result(Self {
            barrier,
            gamma,
            epsilon,
        })
    }

    pub fn order(&self) -> usize {
        self.gamma.len()
    }

    /// Per-order membership thresholds `ε_i²/γ_i²`.
    pub fn thresholds(&self) -> Vec<T> {
        self.gamma
            .iter()
            .zip(&self.epsilon)
            .map(|(&g, &e)| chain::threshold(g, e))
            .collect()
    }
}

pub fn eval_chain<T: Scalar>(
    params: &SimplifiedParams<T>,
    state: &State<T>,
) -> Result<ChainEval<T>> {
    state.expect_order(params.order(), 1)?;
    let x = state.as_slice();
    Ok(chain::evaluate(
        x[0] - params.barrier,
        &x[1..],
        &params.gamma,
        &params.epsilon,
    ))
}

/// `h_i(x) ≥ ε_i²/γ_i²` for every `i`; false when any barrier is undefined.
pub fn in_composite_safe_set<T: Scalar>(params: &SimplifiedParams<T>, state: &State<T>) -> bool {
    eval_chain(params, state)
        .map(|e| e.meets_thresholds(&params.gamma, &params.epsilon))
        .unwrap_or(false)
}

/// The constraint `u + c_1 ≥ 0`.
pub fn filter_constraint<T: Scalar>(
    params: &SimplifiedParams<T>,
    state: &State<T>,
) -> Result<HalfspaceConstraint<T>> {
    let eval = eval_chain(params, state)?;
    let c = chain::closing_coefficient(&eval, &params.gamma, &params.epsilon, true)?;
    Ok(HalfspaceConstraint::lower(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn params(barrier: f64, gamma: &[f64], epsilon: &[f64]) -> SimplifiedParams<f64> {
        SimplifiedParams::with_gains(barrier, gamma.to_vec(), epsilon.to_vec()).unwrap()
    }

    fn state(x: &[f64]) -> State<f64> {
        State::siso(x.to_vec()).unwrap()
    }

    #[test]
    fn second_order_barrier_by_hand() {
        let p = params(0.0, &[2.0, 1.0], &[0.1, 0.05]);
        let e = eval_chain(&p, &state(&[1.0, 0.5])).unwrap();
        assert_eq!(e.barrier(1).unwrap(), 1.0);
        assert!((e.barrier(2).unwrap() - 2.4).abs() < 1e-15);
        assert_eq!(e.offset(1).unwrap(), 0.0);
    }

    #[test]
    fn boundary_of_first_set_leaves_second_undefined() {
        let p = params(0.0, &[1.0, 1.0], &[0.1, 0.1]);
        let e = eval_chain(&p, &state(&[0.0, 3.0])).unwrap();
        assert_eq!(e.barrier(1).unwrap(), 0.0);
        assert!(matches!(e.barrier(2), Err(Error::Domain { order: 1, .. })));
        assert!(filter_constraint(&p, &state(&[0.0, 3.0])).is_err());
    }

    #[test]
    fn third_order_chain_by_hand() {
        let p = params(0.0, &[1.0, 1.0, 1.0], &[0.1, 0.1, 0.1]);
        let e = eval_chain(&p, &state(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(e.barrier(1).unwrap(), 1.0);
        assert!((e.barrier(2).unwrap() - 0.9).abs() < 1e-15);
        // h_3 = 0 + √0.9 − 1/2 − 0.1
        let h3 = 0.9f64.sqrt() - 0.6;
        assert!((e.barrier(3).unwrap() - h3).abs() < 1e-15);
        assert!((e.barrier(3).unwrap() - 0.348683).abs() < 1e-6);
        // Δ_2 = γ_1/(2√h_1) · (h_2 + Δ_1 + ε_1) = (0.9 + 0.1)/2
        assert!((e.offset(2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn membership_examples() {
        let p1 = params(0.0, &[1.0], &[0.1]);
        assert!(in_composite_safe_set(&p1, &state(&[1.0])));
        let p2 = params(0.0, &[1.0, 1.0], &[0.1, 0.1]);
        assert!(!in_composite_safe_set(&p2, &state(&[0.005, 0.0])));
        assert!(!in_composite_safe_set(&p2, &state(&[1.0, -2.0])));
        assert!(in_composite_safe_set(&p2, &state(&[1.0, 0.0])));
        // wrong length is simply not a member
        assert!(!in_composite_safe_set(&p2, &state(&[1.0])));
    }

    #[test]
    fn filter_coefficient_by_hand() {
        let p = params(0.0, &[1.0, 1.0], &[0.1, 0.05]);
        let con = filter_constraint(&p, &state(&[1.0, 0.0])).unwrap();
        assert_eq!(con.b, vec![1.0]);
        let expected = 0.9f64.sqrt() + 0.5 * (0.9 + 0.1) - 0.5 - 0.05;
        assert!((con.c - expected).abs() < 1e-15);
        assert!((con.c - 0.898683).abs() < 1e-6);
    }

    #[test]
    fn single_integrator_coefficient() {
        let p = params(0.0, &[1.0], &[0.1]);
        let con = filter_constraint(&p, &state(&[4.0])).unwrap();
        assert!((con.c - 1.9).abs() < 1e-15);
    }

    #[test]
    fn second_order_barrier_has_no_gamma_zero_term() {
        // closed form h_2 = x_2 + γ_1 √(x_1 − x̱_1) − ε_1, coded independently
        let (lo, g1, e1) = (-0.3, 1.7, 0.02);
        let p = params(lo, &[g1, 0.4], &[e1, 0.01]);
        for &(x1, x2) in &[(0.5, -1.0), (2.0, 3.0), (-0.29, 0.0)] {
            let e = eval_chain(&p, &state(&[x1, x2])).unwrap();
            let expected = x2 + g1 * (x1 - lo).sqrt() - e1;
            assert_eq!(e.barrier(2).unwrap(), expected);
        }
    }

    #[test]
    fn cap_is_enforced_by_constructor() {
        let bounds = InputBounds::symmetric(0.5);
        let err = SimplifiedParams::new(0.0, vec![1.1, 1.0], vec![0.1, 0.1], &bounds).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(SimplifiedParams::new(0.0, vec![1.0, 1.0], vec![0.1, 0.1], &bounds).is_ok());
    }
}
