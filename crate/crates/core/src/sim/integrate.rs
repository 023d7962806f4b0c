//! One zero-order-hold step of `ẋ_1 = x_2, …, ẋ_n = u`.
//!
//! The state is stored block-major: block `i` holds the `m` components of
//! the `i`-th derivative, and every component evolves independently.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Closed-form polynomial solution; exact for piecewise-constant input.
    #[default]
    Exact,
    Rk4,
    Euler,
}

impl Integrator {
    /// Advances `x` (length `n·m`) by `dt` under constant input `u` (length `m`).
    pub fn advance(self, x: &[f64], u: &[f64], dt: f64) -> Vec<f64> {
        let m = u.len();
        match self {
            Integrator::Exact => exact_step(x, u, dt),
            Integrator::Euler => {
                let k = derivative(x, u);
                x.iter().zip(&k).map(|(&v, &d)| v + dt * d).collect()
            }
            Integrator::Rk4 => {
                let shifted = |base: &[f64], k: &[f64], h: f64| -> Vec<f64> {
                    base.iter().zip(k).map(|(&v, &d)| v + h * d).collect()
                };
                let k1 = derivative(x, u);
                let k2 = derivative(&shifted(x, &k1, dt / 2.0), u);
                let k3 = derivative(&shifted(x, &k2, dt / 2.0), u);
                let k4 = derivative(&shifted(x, &k3, dt), u);
                debug_assert_eq!(x.len() % m, 0);
                (0..x.len())
                    .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                    .collect()
            }
        }
    }
}

fn derivative(x: &[f64], u: &[f64]) -> Vec<f64> {
    let m = u.len();
    let mut d = Vec::with_capacity(x.len());
    d.extend_from_slice(&x[m..]);
    d.extend_from_slice(u);
    d
}

/// `x_i ← Σ_{j≥i} x_j dt^{j−i}/(j−i)! + u dt^{n−i+1}/(n−i+1)!`
pub fn exact_step(x: &[f64], u: &[f64], dt: f64) -> Vec<f64> {
    let m = u.len();
    let n = x.len() / m;
    // coeff[k] = dt^k / k!
    let mut coeff = Vec::with_capacity(n + 1);
    coeff.push(1.0);
    for k in 1..=n {
        coeff.push(coeff[k - 1] * dt / k as f64);
    }
    let mut out = vec![0.0; x.len()];
    for i in 0..n {
        for c in 0..m {
            let mut acc = 0.0;
            for j in i..n {
                acc += x[j * m + c] * coeff[j - i];
            }
            out[i * m + c] = acc + u[c] * coeff[n - i];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_single_integrator_is_constant() {
        assert_eq!(exact_step(&[3.0], &[0.0], 0.1), vec![3.0]);
    }

    #[test]
    fn double_and_triple_integrator_updates() {
        assert_eq!(exact_step(&[0.0, 1.0], &[2.0], 0.5), vec![0.75, 2.0]);
        assert_eq!(
            exact_step(&[0.0, 0.0, 0.0], &[6.0], 1.0),
            vec![1.0, 3.0, 6.0]
        );
    }

    #[test]
    fn components_evolve_independently() {
        // m = 2, n = 2: blocks (p_x, p_y), (v_x, v_y)
        let x = exact_step(&[0.0, 1.0, 1.0, 0.0], &[0.0, 2.0], 1.0);
        assert_eq!(x, vec![1.0, 2.0, 1.0, 2.0]);
    }

    #[test]
    fn rk4_is_exact_up_to_fourth_order_chains() {
        let x = [0.3, -0.2, 0.5, 1.0];
        let a = exact_step(&x, &[-0.7], 0.25);
        let b = Integrator::Rk4.advance(&x, &[-0.7], 0.25);
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-14);
        }
    }

    #[test]
    fn euler_drops_higher_terms() {
        assert_eq!(
            Integrator::Euler.advance(&[0.0, 1.0], &[2.0], 0.5),
            vec![0.5, 2.0]
        );
    }
}
