//! Square-root barrier recursion shared by the single-bound, box, and
//! hyperplane filters.
//!
//! A chain of length `L` is driven by a first barrier `h_1` and the
//! projected higher-order states `y_2..y_L`:
//!
//! ```text
//! h_i = y_i + γ_{i-1} √h_{i-1} − γ_{i-2}²/2 − ε_{i-1}          (γ_0 = 0)
//! Δ_1 = 0,  Δ_i = γ_{i-1} / (2√h_{i-1}) · (h_i + Δ_{i-1} + ε_{i-1})
//! ```
//!
//! and closes with the filter coefficient
//!
//! ```text
//! c = γ_L √h_L − γ_{L-1}²/2 − ε_L + γ_{L-1} / (2√h_{L-1}) · (h_L + Δ_{L-1} + ε_{L-1})
//! ```
//!
//! where every `L-1` term vanishes for `L = 1`. Evaluation stops at the first
//! nonpositive barrier: later entries would need its square root in a
//! denominator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Barrier values `h_1..h_L` and offsets `Δ_1..Δ_{L-1}` at one state.
///
/// Entries past the first nonpositive barrier are undefined and not stored.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainEval<T> {
    len: usize,
    h: Vec<T>,
    delta: Vec<T>,
}

impl<T: Scalar> ChainEval<T> {
    /// Chain length `L`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Every barrier up to order `L` is defined.
    pub fn is_complete(&self) -> bool {
        self.h.len() == self.len
    }

    /// Defined barriers, lowest order first.
    pub fn barriers(&self) -> &[T] {
        &self.h
    }

    /// Defined offsets `Δ_1, Δ_2, ...`.
    pub fn offsets(&self) -> &[T] {
        &self.delta
    }

    /// Barrier `h_order` (1-based).
    pub fn barrier(&self, order: usize) -> Result<T> {
        assert!(
            (1..=self.len).contains(&order),
            "barrier order {order} outside 1..={}",
            self.len
        );
        self.h
            .get(order - 1)
            .copied()
            .ok_or_else(|| self.domain_error(order))
    }

    /// Offset `Δ_order` (1-based, `order < L`).
    pub fn offset(&self, order: usize) -> Result<T> {
        assert!(
            (1..self.len).contains(&order),
            "offset order {order} outside 1..{}",
            self.len
        );
        self.delta
            .get(order - 1)
            .copied()
            .ok_or_else(|| self.domain_error(order))
    }

    /// The first nonpositive barrier that truncated evaluation, if any.
    pub fn truncated_at(&self) -> Option<(usize, T)> {
        if self.is_complete() {
            None
        } else {
            self.h.last().map(|&v| (self.h.len(), v))
        }
    }

    fn domain_error(&self, requested: usize) -> Error {
        let (order, value) = self
            .truncated_at()
            .expect("domain error raised on a complete chain");
        Error::Domain {
            order,
            value: value.as_f64(),
            requested,
        }
    }

    /// `h_i ≥ ε_i²/γ_i²` for every order.
    pub(crate) fn meets_thresholds(&self, gains: &[T], margins: &[T]) -> bool {
        self.is_complete()
            && self
                .h
                .iter()
                .zip(gains.iter().zip(margins))
                .all(|(&h, (&g, &e))| h >= threshold(g, e))
    }
}

/// Membership threshold `ε²/γ²` of one barrier.
pub fn threshold<T: Scalar>(gain: T, margin: T) -> T {
    (margin * margin) / (gain * gain)
}

/// Evaluates one chain.
///
/// `drivers[k]` is the projected state entering `h_{k+2}`; its length is
/// `L - 1`. `gains` and `margins` have length `L`.
pub(crate) fn evaluate<T: Scalar>(
    first: T,
    drivers: &[T],
    gains: &[T],
    margins: &[T],
) -> ChainEval<T> {
    let len = drivers.len() + 1;
    debug_assert_eq!(gains.len(), len);
    debug_assert_eq!(margins.len(), len);

    let mut h = Vec::with_capacity(len);
    let mut delta = Vec::with_capacity(len.saturating_sub(1));
    h.push(first);
    if len > 1 {
        delta.push(T::zero());
    }

    for i in 2..=len {
        let prev = h[i - 2];
        if !(prev > T::zero()) {
            break;
        }
        let gain_prev = gains[i - 2];
        let gain_prev2 = if i >= 3 { gains[i - 3] } else { T::zero() };
        let root = prev.sqrt();
        let hi = drivers[i - 2] + gain_prev * root
            - gain_prev2 * gain_prev2 * T::half()
            - margins[i - 2];
        h.push(hi);
        if i < len {
            let d = gain_prev / (T::two() * root) * (hi + delta[i - 2] + margins[i - 2]);
            delta.push(d);
        }
    }

    ChainEval { len, h, delta }
}

/// Filter coefficient `c` closing the chain; the constraint is `b·u + c ≥ 0`
/// with `b` the chain's input direction.
pub(crate) fn closing_coefficient<T: Scalar>(
    eval: &ChainEval<T>,
    gains: &[T],
    margins: &[T],
    include_top_margin: bool,
) -> Result<T> {
    let len = eval.len();
    let top = eval.barrier(len)?;
    if top < T::zero() {
        return Err(Error::Domain {
            order: len,
            value: top.as_f64(),
            requested: len,
        });
    }
    let mut c = gains[len - 1] * top.sqrt();
    if include_top_margin {
        c = c - margins[len - 1];
    }
    if len >= 2 {
        let below = eval.barrier(len - 1)?;
        let gain_below = gains[len - 2];
        let offset = eval.offset(len - 1)?;
        c = c - gain_below * gain_below * T::half()
            + gain_below / (T::two() * below.sqrt()) * (top + offset + margins[len - 2]);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_entry_chain_has_no_offsets() {
        let e = evaluate(2.0, &[], &[1.0], &[0.1]);
        assert!(e.is_complete());
        assert!(e.offsets().is_empty());
        let c = closing_coefficient(&e, &[1.0], &[0.1], true).unwrap();
        assert!((c - (2.0f64.sqrt() - 0.1)).abs() < 1e-15);
    }

    #[test]
    fn truncates_at_nonpositive_barrier() {
        let e = evaluate(0.0, &[1.0, 1.0], &[1.0; 3], &[0.1; 3]);
        assert_eq!(e.barriers(), &[0.0]);
        assert_eq!(e.truncated_at(), Some((1, 0.0)));
        match e.barrier(2) {
            Err(Error::Domain {
                order, requested, ..
            }) => {
                assert_eq!((order, requested), (1, 2));
            }
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn negative_top_barrier_has_no_coefficient() {
        let e = evaluate(1.0, &[-5.0], &[1.0, 1.0], &[0.1, 0.1]);
        assert!(e.is_complete());
        assert!(closing_coefficient(&e, &[1.0, 1.0], &[0.1, 0.1], true).is_err());
    }
}
