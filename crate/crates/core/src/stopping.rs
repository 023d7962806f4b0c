//! Minimum stopping distance of a unit-mass particle braking at `ū`.
//!
//! Diagnostics only: this is the independent closed form that the
//! second-order square-root barrier is checked against. The production
//! filters never call into it.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StoppingQuery<T> {
    pub position: T,
    pub velocity: T,
    pub barrier: T,
    /// Maximum deceleration `ū > 0`.
    pub max_accel: T,
}

/// `x_2²/(2ū)` when moving toward the barrier, else zero.
pub fn min_stopping_distance<T: Scalar>(q: &StoppingQuery<T>) -> T {
    if q.velocity < T::zero() {
        q.velocity * q.velocity / (T::two() * q.max_accel)
    } else {
        T::zero()
    }
}

/// `x_2 ≥ −√(2ū(x_1 − x̱_1))`.
pub fn safe_by_stopping_criterion<T: Scalar>(q: &StoppingQuery<T>) -> Result<bool> {
    let gap = q.position - q.barrier;
    if gap < T::zero() {
        return Err(Error::Domain {
            order: 1,
            value: gap.as_f64(),
            requested: 2,
        });
    }
    Ok(q.velocity >= -(T::two() * q.max_accel * gap).sqrt())
}

/// Applies full braking `u = ū` from the query state for `horizon` seconds
/// and reports whether the position stays above `x̱_1 − 10·dt²·ū` at every
/// sample.
///
/// Only meaningful when [`safe_by_stopping_criterion`] holds.
pub fn bang_bang_escape_check<T: Scalar>(q: &StoppingQuery<T>, dt: T, horizon: T) -> bool {
    let tol = T::lit(10.0) * dt * dt * q.max_accel;
    let floor = q.barrier - tol;
    let steps = (horizon / dt).ceil().to_usize().unwrap_or(0);
    let (mut x, mut v) = (q.position, q.velocity);
    if x < floor {
        return false;
    }
    for _ in 0..steps {
        x = x + v * dt + q.max_accel * dt * dt * T::half();
        v = v + q.max_accel * dt;
        if x < floor {
            return false;
        }
    }
    true
}
