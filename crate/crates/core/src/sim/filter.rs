use crate::error::Result;
use crate::full::{eval_full_chain, full_filter_constraints, in_full_safe_set, FullParams};
use crate::mimo::{
    eval_mimo_chain, in_mimo_safe_set, mimo_filter_constraints, HyperplaneSpec, MimoParams,
};
use crate::model::{HalfspaceConstraint, InputBounds, State};
use crate::simplified::{eval_chain, filter_constraint, in_composite_safe_set, SimplifiedParams};
use crate::ChainEval64;

/// One of the three certified filters, in double precision.
#[derive(Clone, Debug)]
pub enum Filter {
    Simplified(SimplifiedParams<f64>),
    Full(FullParams<f64>),
    Mimo {
        hyperplanes: Vec<HyperplaneSpec<f64>>,
        params: MimoParams<f64>,
    },
}

fn padded(eval: &ChainEval64, out: &mut Vec<f64>) {
    out.extend_from_slice(eval.barriers());
    out.extend(std::iter::repeat_n(
        f64::NAN,
        eval.len() - eval.barriers().len(),
    ));
}

impl Filter {
    pub fn order(&self) -> usize {
        match self {
            Filter::Simplified(p) => p.order(),
            Filter::Full(p) => p.order(),
            Filter::Mimo { params, .. } => params.rows[0].len(),
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Filter::Mimo { hyperplanes, .. } => hyperplanes[0].direction.len(),
            _ => 1,
        }
    }

    pub fn constraints(&self, x: &State<f64>) -> Result<Vec<HalfspaceConstraint<f64>>> {
        match self {
            Filter::Simplified(p) => Ok(vec![filter_constraint(p, x)?]),
            Filter::Full(p) => full_filter_constraints(p, x),
            Filter::Mimo {
                hyperplanes,
                params,
            } => mimo_filter_constraints(hyperplanes, params, x),
        }
    }

    /// Membership in the certified composite safe set.
    pub fn contains(&self, x: &State<f64>) -> bool {
        match self {
            Filter::Simplified(p) => in_composite_safe_set(p, x),
            Filter::Full(p) => in_full_safe_set(p, x),
            Filter::Mimo {
                hyperplanes,
                params,
            } => in_mimo_safe_set(hyperplanes, params, x),
        }
    }

    /// Column names matching [`Filter::barrier_values`].
    pub fn barrier_names(&self) -> Vec<String> {
        let n = self.order();
        match self {
            Filter::Simplified(_) => (1..=n).map(|i| format!("h_{i}")).collect(),
            Filter::Full(_) => ["lo", "up"]
                .iter()
                .flat_map(|side| {
                    (1..=n).flat_map(move |j| {
                        (1..=n - j + 1).map(move |i| format!("h_{side}_{j}_{i}"))
                    })
                })
                .collect(),
            Filter::Mimo { hyperplanes, .. } => (1..=hyperplanes.len())
                .flat_map(|k| (1..=n).map(move |i| format!("h_{k}_{i}")))
                .collect(),
        }
    }

    /// Every barrier of every chain; `NaN` where a lower barrier is
    /// nonpositive and the chain is undefined.
    pub fn barrier_values(&self, x: &State<f64>) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        match self {
            Filter::Simplified(p) => padded(&eval_chain(p, x)?, &mut out),
            Filter::Full(p) => {
                let e = eval_full_chain(p, x)?;
                for chain in e.lower_chains().iter().chain(e.upper_chains()) {
                    padded(chain, &mut out);
                }
            }
            Filter::Mimo {
                hyperplanes,
                params,
            } => {
                for (spec, row) in hyperplanes.iter().zip(&params.rows) {
                    padded(&eval_mimo_chain(spec, row, x)?, &mut out);
                }
            }
        }
        Ok(out)
    }

    /// The state constraints themselves: `x_1 − x̱_1`; `x_j − x̱_j` and
    /// `x̄_j − x_j`; or `r_k·x_1 + s_k`.
    pub fn first_order_barriers(&self, x: &State<f64>) -> Vec<f64> {
        let v = x.as_slice();
        match self {
            Filter::Simplified(p) => vec![v[0] - p.barrier],
            Filter::Full(p) => {
                let b = &p.bounds;
                let lower = v.iter().zip(&b.lower).map(|(&x, &lo)| x - lo);
                let upper = v.iter().zip(&b.upper).map(|(&x, &hi)| hi - x);
                lower.chain(upper).collect()
            }
            Filter::Mimo { hyperplanes, .. } => {
                hyperplanes.iter().map(|h| h.first_barrier(x)).collect()
            }
        }
    }

    /// Input pushing toward the nearest state constraint as hard as allowed.
    pub fn adversarial_input(&self, x: &State<f64>, bounds: &InputBounds<f64>) -> Vec<f64> {
        let (lower, upper) = match *bounds {
            InputBounds::Box { lower, upper } => (lower, upper),
            InputBounds::Ball { radius } => (-radius, radius),
        };
        match self {
            Filter::Simplified(_) => vec![lower],
            Filter::Full(p) => {
                let n = p.order();
                let first = self.first_order_barriers(x);
                let nearest = (0..2 * n)
                    .map(|k| (k, first[k] / p.bounds.width(k % n)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(k, _)| k)
                    .unwrap_or(0);
                vec![if nearest < n { lower } else { upper }]
            }
            Filter::Mimo { hyperplanes, .. } => {
                let first = self.first_order_barriers(x);
                let k = (0..first.len())
                    .min_by(|&a, &b| first[a].total_cmp(&first[b]))
                    .unwrap_or(0);
                hyperplanes[k]
                    .direction
                    .iter()
                    .map(|&r| -upper * r)
                    .collect()
            }
        }
    }

    /// Every barrier that depends only on the first `orders` derivative
    /// blocks is defined and above its threshold. Later blocks of `x` are
    /// ignored.
    pub fn prefix_ok(&self, x: &State<f64>, orders: usize) -> bool {
        let meets = |e: &ChainEval64, gains: &[f64], margins: &[f64], depth: usize| {
            (0..depth.min(e.len())).all(|i| {
                e.barriers()
                    .get(i)
                    .is_some_and(|&h| h >= crate::chain::threshold(gains[i], margins[i]))
            })
        };
        match self {
            Filter::Simplified(p) => {
                eval_chain(p, x).is_ok_and(|e| meets(&e, &p.gamma, &p.epsilon, orders))
            }
            Filter::Full(p) => eval_full_chain(p, x).is_ok_and(|e| {
                let chains = e
                    .lower_chains()
                    .iter()
                    .zip(&p.lower)
                    .chain(e.upper_chains().iter().zip(&p.upper));
                chains.enumerate().all(|(k, (e, g))| {
                    meets(
                        e,
                        &g.gamma,
                        &g.epsilon,
                        orders.saturating_sub(k % p.order()),
                    )
                })
            }),
            Filter::Mimo {
                hyperplanes,
                params,
            } => hyperplanes.iter().zip(&params.rows).all(|(spec, row)| {
                eval_mimo_chain(spec, row, x)
                    .is_ok_and(|e| meets(&e, &row.gamma, &row.epsilon, orders))
            }),
        }
    }
}
