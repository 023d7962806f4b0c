//! Gain and margin selection for the box-constrained problem (`n ≤ 3`), and
//! validation of user-supplied gains for any order.
//!
//! Each helper below is one line of the tuning procedure; the `tune_n*`
//! functions only sequence them.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::full::{reparametrize, FullParams};
use crate::model::{check_input_bounds, InputBounds, StateBounds, ValidationReport, Violation};
use crate::scalar::Scalar;

/// Which certified problem a gain vector is meant for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    /// Single lower bound (also used for each hyperplane chain, with the
    /// ball radius in place of `ū`).
    Simplified,
    /// Box bounds on every derivative.
    Full,
}

/// Hyperparameters of the tuning procedure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuningInputs<T> {
    /// Interior margin `δ ∈ (0, x̄_1 − x̱_1)`.
    pub delta: T,
    /// Nominal first gain `γ_1* > 0`.
    pub gamma1: T,
    /// `α_2..α_n`, all positive.
    #[serde(default)]
    pub alpha: Vec<T>,
    /// `β_1..β_n` in `(0, 1)`.
    pub beta: Vec<T>,
    /// `η_1..η_{n−1}` in `(0, 1)`.
    #[serde(default)]
    pub eta: Vec<T>,
    pub input_bounds: InputBounds<T>,
    pub state_bounds: StateBounds<T>,
}

impl<T: Scalar> TuningInputs<T> {
    pub fn order(&self) -> usize {
        self.state_bounds.order()
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.order();
        let mut report = ValidationReport::default();
        if n == 0 {
            report.push(Violation::OrderZero);
            return report;
        }
        self.state_bounds.check_into(n, &mut report);
        check_input_bounds(&self.input_bounds, &mut report);
        if !matches!(self.input_bounds, InputBounds::Box { .. }) {
            report.push(Violation::InputShape { expected: "box" });
        }
        if report.is_valid() {
            let width = self.state_bounds.width(0);
            if !(self.delta > T::zero() && self.delta < width) {
                report.push(Violation::OutOfRange {
                    what: "δ",
                    value: self.delta.as_f64(),
                });
            }
        }
        if !(self.gamma1 > T::zero()) || !self.gamma1.is_finite() {
            report.push(Violation::GainNotPositive { index: 1 });
        }
        let lengths: [(&'static str, usize, usize); 3] = [
            ("α", n - 1, self.alpha.len()),
            ("β", n, self.beta.len()),
            ("η", n - 1, self.eta.len()),
        ];
        for (what, expected, found) in lengths {
            if expected != found {
                report.push(Violation::Length {
                    what,
                    expected,
                    found,
                });
            }
        }
        for &a in &self.alpha {
            if !(a > T::zero()) || !a.is_finite() {
                report.push(Violation::OutOfRange {
                    what: "α",
                    value: a.as_f64(),
                });
            }
        }
        let unit = |v: T| v > T::zero() && v < T::one();
        for (what, values) in [("β", &self.beta), ("η", &self.eta)] {
            for (k, &v) in values.iter().enumerate() {
                if !unit(v) {
                    report.push(Violation::FractionOutOfRange {
                        what,
                        index: k + 1,
                        value: v.as_f64(),
                    });
                }
            }
        }
        report
    }

    fn input_limits(&self) -> (T, T) {
        match self.input_bounds {
            InputBounds::Box { lower, upper } => (lower, upper),
            InputBounds::Ball { radius } => (-radius, radius),
        }
    }
}

/// Shared gains `γ_1..γ_n` and margins `ε_1..ε_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TunedParams<T> {
    pub gamma: Vec<T>,
    pub epsilon: Vec<T>,
}

impl<T: Scalar> TunedParams<T> {
    /// Expands the shared values onto all `2n` chains.
    pub fn to_full_params(&self, bounds: StateBounds<T>) -> Result<FullParams<T>> {
        reparametrize(self.gamma.len(), &self.gamma, &self.epsilon, bounds)
    }
}

/// Saturation cap `√(2(1−η) min{−u̱, ū})`.
pub fn gain_cap<T: Scalar>(eta: T, lower: T, upper: T) -> T {
    (T::two() * (T::one() - eta) * (-lower).min(upper)).sqrt()
}

/// `ε_1 = (1 − β_1) min{γ_1 √δ, γ_1 √(x̄_1 − x̱_1) / 2}`.
pub fn first_margin<T: Scalar>(beta1: T, gamma1: T, delta: T, width1: T) -> T {
    (T::one() - beta1) * (gamma1 * delta.sqrt()).min(gamma1 * width1.sqrt() * T::half())
}

/// The four candidates whose maximum is `γ_2`.
pub fn second_gain_terms<T: Scalar>(
    gamma1: T,
    alpha2: T,
    beta1: T,
    delta: T,
    width1: T,
    lower2: T,
    upper2: T,
) -> [T; 4] {
    let half = T::half();
    let g2 = gamma1 * gamma1;
    [
        (half + alpha2) * g2 / (beta1 * gamma1 * delta.sqrt()).sqrt(),
        (T::one() + alpha2) * g2 / (beta1 * gamma1 * width1.sqrt()).sqrt(),
        (half + alpha2) * g2 / (-lower2).sqrt(),
        (half + alpha2) * g2 / upper2.sqrt(),
    ]
}

/// Margin of order `k ≥ 2`:
/// `(1 − β_k) min{α_k γ_{k−1}²/2, γ_k √(−x̱_k), γ_k √x̄_k, γ_k √(x̄_k − x̱_k)/2}`.
pub fn higher_margin<T: Scalar>(
    beta: T,
    alpha: T,
    gamma_prev: T,
    gamma: T,
    lower: T,
    upper: T,
) -> T {
    let terms = [
        alpha * gamma_prev * gamma_prev * T::half(),
        gamma * (-lower).sqrt(),
        gamma * upper.sqrt(),
        gamma * (upper - lower).sqrt() * T::half(),
    ];
    (T::one() - beta) * min_of(&terms)
}

/// The four candidates whose minimum is the backed-off `γ_1` once `γ_2`
/// has been capped.
pub fn first_gain_backoff_terms<T: Scalar>(
    gamma2: T,
    alpha2: T,
    beta1: T,
    delta: T,
    width1: T,
    lower2: T,
    upper2: T,
) -> [T; 4] {
    let half = T::half();
    let two_thirds = T::lit(2.0 / 3.0);
    [
        (gamma2 * (beta1 * delta.sqrt()).sqrt() / (half + alpha2)).powf(two_thirds),
        (gamma2 * (beta1 * width1.sqrt()).sqrt() / (T::one() + alpha2)).powf(two_thirds),
        (gamma2 * (-lower2).sqrt() / (half + alpha2)).sqrt(),
        (gamma2 * upper2.sqrt() / (half + alpha2)).sqrt(),
    ]
}

/// Inputs of the six-term maximum defining `γ_3`.
#[derive(Clone, Copy, Debug)]
pub struct ThirdGainInputs<T> {
    pub gamma1: T,
    pub gamma2: T,
    pub alpha2: T,
    pub alpha3: T,
    pub beta2: T,
    pub eta1: T,
    pub lower2: T,
    pub upper2: T,
    pub lower3: T,
    pub upper3: T,
}

pub fn third_gain_terms<T: Scalar>(v: &ThirdGainInputs<T>) -> [T; 6] {
    let half = T::half();
    let one = T::one();
    let g2 = v.gamma2 * v.gamma2;
    [
        (one + v.alpha3) * g2 / (v.gamma1 * (v.beta2 * v.alpha2).sqrt()),
        (half + v.alpha3) * g2 / (v.beta2 * v.gamma2 * (-v.lower2).sqrt()).sqrt(),
        (half + v.alpha3) * g2 / (v.beta2 * v.gamma2 * v.upper2.sqrt()).sqrt(),
        (one + v.alpha3) * g2 / (v.beta2 * v.gamma2 * (v.upper2 - v.lower2).sqrt()).sqrt(),
        (half + v.alpha3) * g2 / (-v.eta1 * v.lower3).sqrt(),
        (half + v.alpha3) * g2 / (v.eta1 * v.upper3).sqrt(),
    ]
}

fn max_of<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().fold(T::neg_infinity(), T::max)
}

fn min_of<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().fold(T::infinity(), T::min)
}

fn checked<T: Scalar>(inputs: &TuningInputs<T>, order: usize) -> Result<()> {
    let mut report = inputs.validate();
    if inputs.order() != order {
        report.push(Violation::Length {
            what: "state bounds",
            expected: order,
            found: inputs.order(),
        });
    }
    report.into_result(())
}

pub fn tune_n1<T: Scalar>(inputs: &TuningInputs<T>) -> Result<TunedParams<T>> {
    checked(inputs, 1)?;
    let gamma1 = inputs.gamma1;
    let eps1 = first_margin(
        inputs.beta[0],
        gamma1,
        inputs.delta,
        inputs.state_bounds.width(0),
    );
    Ok(TunedParams {
        gamma: vec![gamma1],
        epsilon: vec![eps1],
    })
}

pub fn tune_n2<T: Scalar>(inputs: &TuningInputs<T>) -> Result<TunedParams<T>> {
    checked(inputs, 2)?;
    let (u_lo, u_hi) = inputs.input_limits();
    let sb = &inputs.state_bounds;
    let width1 = sb.width(0);
    let (lo2, hi2) = (sb.lower[1], sb.upper[1]);
    let (alpha2, beta1, beta2) = (inputs.alpha[0], inputs.beta[0], inputs.beta[1]);

    let gamma1 = inputs.gamma1.min(gain_cap(inputs.eta[0], u_lo, u_hi));
    let gamma2 = max_of(&second_gain_terms(
        gamma1,
        alpha2,
        beta1,
        inputs.delta,
        width1,
        lo2,
        hi2,
    ));
    let eps1 = first_margin(beta1, gamma1, inputs.delta, width1);
    let eps2 = higher_margin(beta2, alpha2, gamma1, gamma2, lo2, hi2);
    Ok(TunedParams {
        gamma: vec![gamma1, gamma2],
        epsilon: vec![eps1, eps2],
    })
}

pub fn tune_n3<T: Scalar>(inputs: &TuningInputs<T>) -> Result<TunedParams<T>> {
    checked(inputs, 3)?;
    let (u_lo, u_hi) = inputs.input_limits();
    let sb = &inputs.state_bounds;
    let width1 = sb.width(0);
    let (lo2, hi2, lo3, hi3) = (sb.lower[1], sb.upper[1], sb.lower[2], sb.upper[2]);
    let (alpha2, alpha3) = (inputs.alpha[0], inputs.alpha[1]);
    let (beta1, beta2, beta3) = (inputs.beta[0], inputs.beta[1], inputs.beta[2]);
    let (eta1, eta2) = (inputs.eta[0], inputs.eta[1]);
    let delta = inputs.delta;

    let first_cap = inputs.gamma1.min(gain_cap(eta1, u_lo, u_hi));
    let mut gamma1 = first_cap;
    let mut gamma2 = max_of(&second_gain_terms(
        gamma1, alpha2, beta1, delta, width1, lo2, hi2,
    ));
    let second_cap = gain_cap(eta2, u_lo, u_hi);
    if gamma2 > gamma2.min(second_cap) {
        gamma2 = second_cap;
        gamma1 = min_of(&first_gain_backoff_terms(
            gamma2, alpha2, beta1, delta, width1, lo2, hi2,
        ));
        if gamma1 > first_cap {
            warn!(
                "backed-off γ_1 = {} exceeds its saturation cap {}",
                gamma1, first_cap
            );
        }
    }
    let gamma3 = max_of(&third_gain_terms(&ThirdGainInputs {
        gamma1,
        gamma2,
        alpha2,
        alpha3,
        beta2,
        eta1,
        lower2: lo2,
        upper2: hi2,
        lower3: lo3,
        upper3: hi3,
    }));
    let eps1 = first_margin(beta1, gamma1, delta, width1);
    let eps2 = higher_margin(beta2, alpha2, gamma1, gamma2, lo2, hi2);
    let eps3 = higher_margin(beta3, alpha3, gamma2, gamma3, lo3, hi3);
    Ok(TunedParams {
        gamma: vec![gamma1, gamma2, gamma3],
        epsilon: vec![eps1, eps2, eps3],
    })
}

/// Dispatches on the order given by the state bounds.
pub fn tune<T: Scalar>(inputs: &TuningInputs<T>) -> Result<TunedParams<T>> {
    match inputs.order() {
        1 => tune_n1(inputs),
        2 => tune_n2(inputs),
        3 => tune_n3(inputs),
        order => Err(Error::Validation(ValidationReport::single(
            Violation::UnsupportedOrder { order },
        ))),
    }
}

pub(crate) fn check_gains_and_margins<T: Scalar>(
    order: usize,
    gamma: &[T],
    epsilon: &[T],
    report: &mut ValidationReport,
) {
    if gamma.len() != order {
        report.push(Violation::Length {
            what: "γ",
            expected: order,
            found: gamma.len(),
        });
    }
    if epsilon.len() != order {
        report.push(Violation::Length {
            what: "ε",
            expected: order,
            found: epsilon.len(),
        });
    }
    for (i, &g) in gamma.iter().enumerate() {
        if !(g > T::zero()) || !g.is_finite() {
            report.push(Violation::GainNotPositive { index: i + 1 });
        }
    }
    for (i, &e) in epsilon.iter().enumerate() {
        if !(e > T::zero()) || !e.is_finite() {
            report.push(Violation::MarginNotPositive { index: i + 1 });
        }
    }
}

/// Positivity plus the implementability cap on `γ_{n−1}`:
/// `√(2ū)` for [`Problem::Simplified`], `√(2 min{−u̱, ū})` for [`Problem::Full`].
pub fn validate_params<T: Scalar>(
    order: usize,
    gamma: &[T],
    epsilon: &[T],
    bounds: &InputBounds<T>,
    problem: Problem,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    if order == 0 {
        report.push(Violation::OrderZero);
    }
    check_gains_and_margins(order, gamma, epsilon, &mut report);
    check_input_bounds(bounds, &mut report);
    if order >= 2 && gamma.len() == order {
        let limit = match problem {
            Problem::Simplified => bounds.upper_magnitude(),
            Problem::Full => bounds.symmetric_magnitude(),
        };
        let cap = (T::two() * limit).sqrt();
        let g = gamma[order - 2];
        if g > cap {
            report.push(Violation::GainCap {
                index: order - 1,
                value: g.as_f64(),
                cap: cap.as_f64(),
            });
        }
    }
    report
}
