//! Box constraints `x̱_j ≤ x_j ≤ x̄_j` on every derivative of a scalar chain.
//!
//! Each bound `j` gets its own chain of length `n − j + 1`; the barrier at
//! chain position `i` involves derivative order `i + j − 1`. Lower chains
//! are driven by `+x`, upper chains by `−x`.

use serde::{Deserialize, Serialize};

use crate::chain::{self, ChainEval};
use crate::error::{Error, Result};
use crate::model::{HalfspaceConstraint, State, StateBounds, ValidationReport, Violation};
use crate::scalar::Scalar;

/// Gains and margins of one chain, lowest order first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainGains<T> {
    pub gamma: Vec<T>,
    pub epsilon: Vec<T>,
}

impl<T: Scalar> ChainGains<T> {
    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullParams<T> {
    pub bounds: StateBounds<T>,
    /// `lower[j - 1]` parametrizes the chain of `x̱_j`.
    pub lower: Vec<ChainGains<T>>,
    pub upper: Vec<ChainGains<T>>,
}

impl<T: Scalar> FullParams<T> {
    /// General constructor with independent gains for all `2n` chains.
    pub fn new(
        bounds: StateBounds<T>,
        lower: Vec<ChainGains<T>>,
        upper: Vec<ChainGains<T>>,
    ) -> Result<Self> {
        let n = bounds.order();
        let mut report = ValidationReport::default();
        if n == 0 {
            report.push(Violation::OrderZero);
        }
        bounds.check_into(n, &mut report);
        for chains in [&lower, &upper] {
            if chains.len() != n {
                report.push(Violation::Length {
                    what: "chains",
                    expected: n,
                    found: chains.len(),
                });
                continue;
            }
            for (j, gains) in chains.iter().enumerate() {
                crate::tuning::check_gains_and_margins(
                    n - j,
                    &gains.gamma,
                    &gains.epsilon,
                    &mut report,
                );
            }
        }
        report.into_result(Self {
            bounds,
            lower,
            upper,
        })
    }

    pub fn order(&self) -> usize {
        self.bounds.order()
    }
}

/// Shares one gain and one margin per derivative order across all chains:
/// `γ̱_{ji} = γ̄_{ji} = γ_{i+j−1}` and likewise for `ε`.
pub fn reparametrize<T: Scalar>(
    order: usize,
    gamma: &[T],
    epsilon: &[T],
    bounds: StateBounds<T>,
) -> Result<FullParams<T>> {
    let mut report = ValidationReport::default();
    if order == 0 {
        report.push(Violation::OrderZero);
    }
    crate::tuning::check_gains_and_margins(order, gamma, epsilon, &mut report);
    bounds.check_into(order, &mut report);
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    let chain = |j: usize| ChainGains {
        gamma: gamma[j..].to_vec(),
        epsilon: epsilon[j..].to_vec(),
    };
    let lower: Vec<_> = (0..order).map(chain).collect();
    let upper = lower.clone();
    Ok(FullParams {
        bounds,
        lower,
        upper,
    })
}

/// All `2n` chains evaluated at one state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullChainEval<T> {
    lower: Vec<ChainEval<T>>,
    upper: Vec<ChainEval<T>>,
}

impl<T: Scalar> FullChainEval<T> {
    /// Lower chain of bound `j` (1-based).
    pub fn lower(&self, j: usize) -> &ChainEval<T> {
        &self.lower[j - 1]
    }

    pub fn upper(&self, j: usize) -> &ChainEval<T> {
        &self.upper[j - 1]
    }

    pub fn lower_chains(&self) -> &[ChainEval<T>] {
        &self.lower
    }

    pub fn upper_chains(&self) -> &[ChainEval<T>] {
        &self.upper
    }
}

pub fn eval_full_chain<T: Scalar>(
    params: &FullParams<T>,
    state: &State<T>,
) -> Result<FullChainEval<T>> {
    let n = params.order();
    state.expect_order(n, 1)?;
    let x = state.as_slice();
    let negated: Vec<T> = x.iter().map(|&v| -v).collect();
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for j in 0..n {
        let lo = &params.lower[j];
        let hi = &params.upper[j];
        lower.push(chain::evaluate(
            x[j] - params.bounds.lower[j],
            &x[j + 1..],
            &lo.gamma,
            &lo.epsilon,
        ));
        upper.push(chain::evaluate(
            params.bounds.upper[j] - x[j],
            &negated[j + 1..],
            &hi.gamma,
            &hi.epsilon,
        ));
    }
    Ok(FullChainEval { lower, upper })
}

/// Every lower and upper barrier meets its `ε²/γ²` threshold.
pub fn in_full_safe_set<T: Scalar>(params: &FullParams<T>, state: &State<T>) -> bool {
    let Ok(eval) = eval_full_chain(params, state) else {
        return false;
    };
    let lower_ok = eval
        .lower
        .iter()
        .zip(&params.lower)
        .all(|(e, g)| e.meets_thresholds(&g.gamma, &g.epsilon));
    lower_ok
        && eval
            .upper
            .iter()
            .zip(&params.upper)
            .all(|(e, g)| e.meets_thresholds(&g.gamma, &g.epsilon))
}

/// The `2n` filter constraints: `u + c_j ≥ 0` for the lower chains
/// `j = 1..n`, then `−u + c_{n+j} ≥ 0` for the upper chains.
pub fn full_filter_constraints<T: Scalar>(
    params: &FullParams<T>,
    state: &State<T>,
) -> Result<Vec<HalfspaceConstraint<T>>> {
    let eval = eval_full_chain(params, state)?;
    let n = params.order();
    let mut out = Vec::with_capacity(2 * n);
    for (e, g) in eval.lower.iter().zip(&params.lower) {
        let c = chain::closing_coefficient(e, &g.gamma, &g.epsilon, true)?;
        out.push(HalfspaceConstraint::lower(c));
    }
    for (e, g) in eval.upper.iter().zip(&params.upper) {
        let c = chain::closing_coefficient(e, &g.gamma, &g.epsilon, true)?;
        out.push(HalfspaceConstraint::upper(c));
    }
    Ok(out)
}
