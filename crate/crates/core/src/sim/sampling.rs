//! Rejection sampling of states inside the certified safe set.
//!
//! Barriers of order `i` depend only on derivative blocks `1..=i`, so blocks
//! are drawn one at a time and each prefix is rejected as soon as one of the
//! barriers it determines falls below threshold.

use rand::Rng;

use super::filter::Filter;
use crate::error::{Error, Result};
use crate::model::State;

/// Draws per block before restarting from block 1.
const BLOCK_ATTEMPTS: usize = 10_000;
/// Restarts before giving up on one sample.
const RESTARTS: usize = 1_000;

/// Default sampling box per derivative order: the state bounds for box
/// problems, `[x̱_1, x̱_1 + 4]` then `[−2, 2]` for a single bound, and
/// `[−3, 3]` per component for hyperplanes.
pub fn default_ranges(filter: &Filter) -> Vec<(f64, f64)> {
    let n = filter.order();
    match filter {
        Filter::Simplified(p) => std::iter::once((p.barrier, p.barrier + 4.0))
            .chain(std::iter::repeat_n((-2.0, 2.0), n - 1))
            .collect(),
        Filter::Full(p) => p
            .bounds
            .lower
            .iter()
            .copied()
            .zip(p.bounds.upper.iter().copied())
            .collect(),
        Filter::Mimo { .. } => vec![(-3.0, 3.0); n],
    }
}

/// One state in the certified set, each block drawn uniformly from `ranges`.
pub fn sample_state<R: Rng>(
    filter: &Filter,
    ranges: &[(f64, f64)],
    rng: &mut R,
) -> Result<State<f64>> {
    let n = filter.order();
    let m = filter.dimension();
    if ranges.len() != n {
        return Err(Error::Dimension {
            what: "sampling ranges",
            expected: n,
            found: ranges.len(),
        });
    }
    let mut x = State::new(vec![0.0; n * m], m)?;
    for _ in 0..RESTARTS {
        if fill(filter, ranges, rng, &mut x) {
            return Ok(x);
        }
    }
    Err(Error::Scenario(
        "could not sample a state inside the certified set; widen or move the sampling ranges"
            .into(),
    ))
}

fn fill<R: Rng>(filter: &Filter, ranges: &[(f64, f64)], rng: &mut R, x: &mut State<f64>) -> bool {
    let m = x.dimension();
    for (i, &(lo, hi)) in ranges.iter().enumerate() {
        let accepted = (0..BLOCK_ATTEMPTS).any(|_| {
            for c in 0..m {
                x.as_mut_slice()[i * m + c] = if hi > lo {
                    rng.random_range(lo..hi)
                } else {
                    lo
                };
            }
            filter.prefix_ok(x, i + 1)
        });
        if !accepted {
            return false;
        }
    }
    filter.contains(x)
}

/// `count` independent samples.
pub fn sample_states<R: Rng>(
    filter: &Filter,
    ranges: &[(f64, f64)],
    count: usize,
    rng: &mut R,
) -> Result<Vec<State<f64>>> {
    (0..count)
        .map(|_| sample_state(filter, ranges, rng))
        .collect()
}
