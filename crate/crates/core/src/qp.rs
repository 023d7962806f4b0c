//! Pointwise min-norm safety filter
//!
//! ```text
//! u* = argmin ‖u − u_nom‖²   s.t.  b_k·u + c_k ≥ 0,  u ∈ 𝒰
//! ```
//!
//! Scalar inputs with a box reduce to clamping into an interval. Vector
//! inputs with a ball are solved exactly by enumerating active sets of
//! halfspaces: for each linearly independent subset the affine projection of
//! `u_nom` and the point where the affine set meets the sphere along the
//! KKT direction are candidates, and the feasible candidate closest to
//! `u_nom` wins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HalfspaceConstraint, InputBounds};
use crate::scalar::{dot, norm, Scalar};

/// Largest constraint count accepted by [`solve_ball`].
pub const MAX_CONSTRAINTS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct FilterProblem<T> {
    pub nominal: Vec<T>,
    pub constraints: Vec<HalfspaceConstraint<T>>,
    pub bounds: InputBounds<T>,
}

impl<T: Scalar> FilterProblem<T> {
    pub fn new(
        nominal: Vec<T>,
        constraints: Vec<HalfspaceConstraint<T>>,
        bounds: InputBounds<T>,
    ) -> Self {
        Self {
            nominal,
            constraints,
            bounds,
        }
    }

    pub fn dimension(&self) -> usize {
        self.nominal.len()
    }

    fn check_dimensions(&self) -> Result<()> {
        let m = self.dimension();
        if m == 0 {
            return Err(Error::Dimension {
                what: "nominal input",
                expected: 1,
                found: 0,
            });
        }
        if let Some(bad) = self.constraints.iter().find(|c| c.dimension() != m) {
            return Err(Error::Dimension {
                what: "constraint",
                expected: m,
                found: bad.dimension(),
            });
        }
        Ok(())
    }

    /// `u` satisfies every halfspace and the input set within `tol`.
    pub fn is_feasible(&self, u: &[T], tol: T) -> bool {
        let in_bounds = match self.bounds {
            InputBounds::Box { lower, upper } => {
                u.iter().all(|&v| v >= lower - tol && v <= upper + tol)
            }
            InputBounds::Ball { radius } => norm(u) <= radius + tol,
        };
        in_bounds && self.constraints.iter().all(|c| c.slack(u) >= -tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterSolution<T> {
    /// Filtered input; the unmodified nominal when infeasible.
    pub u: Vec<T>,
    /// Indices of halfspaces tight at `u`.
    pub active_set: Vec<usize>,
    pub status: SolveStatus,
}

impl<T: Scalar> FilterSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

fn tight_set<T: Scalar>(constraints: &[HalfspaceConstraint<T>], u: &[T], tol: T) -> Vec<usize> {
    constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| c.slack(u).abs() <= tol)
        .map(|(k, _)| k)
        .collect()
}

/// Feasible interval `[L, U]` of a scalar problem; empty when `L > U`.
///
/// Constraints with `b = 0` make the interval empty when `c < 0`.
pub fn feasible_interval<T: Scalar>(
    constraints: &[HalfspaceConstraint<T>],
    lower: T,
    upper: T,
) -> (T, T) {
    let (mut lo, mut hi) = (lower, upper);
    for con in constraints {
        let b = con.b[0];
        if b > T::zero() {
            lo = lo.max(-con.c / b);
        } else if b < T::zero() {
            hi = hi.min(con.c / -b);
        } else if con.c < T::zero() {
            return (T::infinity(), T::neg_infinity());
        }
    }
    (lo, hi)
}

pub fn solve_scalar<T: Scalar>(p: &FilterProblem<T>) -> Result<FilterSolution<T>> {
    p.check_dimensions()?;
    let InputBounds::Box { lower, upper } = p.bounds else {
        return Err(Error::Scenario(
            "scalar filter needs box input bounds".into(),
        ));
    };
    if p.dimension() != 1 {
        return Err(Error::Dimension {
            what: "nominal input",
            expected: 1,
            found: p.dimension(),
        });
    }
    let (lo, hi) = feasible_interval(&p.constraints, lower, upper);
    if lo > hi {
        return Ok(FilterSolution {
            u: p.nominal.clone(),
            active_set: Vec::new(),
            status: SolveStatus::Infeasible,
        });
    }
    let u = vec![p.nominal[0].max(lo).min(hi)];
    let active_set = tight_set(&p.constraints, &u, T::feasibility_tol());
    Ok(FilterSolution {
        u,
        active_set,
        status: SolveStatus::Optimal,
    })
}

pub fn solve_ball<T: Scalar>(p: &FilterProblem<T>) -> Result<FilterSolution<T>> {
    p.check_dimensions()?;
    let InputBounds::Ball { radius } = p.bounds else {
        return Err(Error::Scenario(
            "ball filter needs ball input bounds".into(),
        ));
    };
    if p.constraints.len() > MAX_CONSTRAINTS {
        return Err(Error::Size {
            count: p.constraints.len(),
            cap: MAX_CONSTRAINTS,
        });
    }
    let tol = T::feasibility_tol();
    let m = p.dimension();
    let nominal = &p.nominal;

    if p.is_feasible(nominal, tol) {
        return Ok(FilterSolution {
            u: nominal.clone(),
            active_set: tight_set(&p.constraints, nominal, tol),
            status: SolveStatus::Optimal,
        });
    }

    let mut best: Option<(T, Vec<T>)> = None;
    let mut consider = |u: Vec<T>| {
        if !p.is_feasible(&u, tol) {
            return;
        }
        let d: Vec<T> = u.iter().zip(nominal).map(|(&a, &b)| a - b).collect();
        let obj = dot(&d, &d);
        if best.as_ref().is_none_or(|(o, _)| obj < *o) {
            best = Some((obj, u));
        }
    };

    let max_active = m.min(p.constraints.len());
    for size in 0..=max_active {
        for_each_combination(p.constraints.len(), size, &mut |subset| {
            let rows: Vec<&HalfspaceConstraint<T>> =
                subset.iter().map(|&k| &p.constraints[k]).collect();
            if let Some(face) = AffineFace::new(&rows, m) {
                consider(face.project(nominal));
                if let Some(u) = face.sphere_point(nominal, radius) {
                    consider(u);
                }
            }
        });
    }

    match best {
        Some((_, u)) => {
            let active_set = tight_set(&p.constraints, &u, tol);
            Ok(FilterSolution {
                u,
                active_set,
                status: SolveStatus::Optimal,
            })
        }
        None => Ok(FilterSolution {
            u: nominal.clone(),
            active_set: Vec::new(),
            status: SolveStatus::Infeasible,
        }),
    }
}

/// Dispatches on the input-set shape.
pub fn solve<T: Scalar>(p: &FilterProblem<T>) -> Result<FilterSolution<T>> {
    match p.bounds {
        InputBounds::Box { .. } => solve_scalar(p),
        InputBounds::Ball { .. } => solve_ball(p),
    }
}

/// Largest `s` such that some admissible `u` satisfies every halfspace with
/// normalized slack `≥ s` and keeps distance `≥ s` from the input-set
/// boundary. Negative iff the problem is infeasible.
pub fn feasibility_margin<T: Scalar>(p: &FilterProblem<T>) -> Result<T> {
    p.check_dimensions()?;
    match p.bounds {
        InputBounds::Box { lower, upper } if p.dimension() == 1 => {
            let (lo, hi) = feasible_interval(&p.constraints, lower, upper);
            Ok((hi - lo) * T::half())
        }
        InputBounds::Box { .. } => Err(Error::Dimension {
            what: "nominal input",
            expected: 1,
            found: p.dimension(),
        }),
        InputBounds::Ball { radius } => ball_margin(p, radius),
    }
}

/// Bisects on `s`, asking [`solve_ball`] whether the shrunken problem
/// (halfspaces shifted by `s‖b_k‖`, radius `ū − s`) is still feasible.
fn ball_margin<T: Scalar>(p: &FilterProblem<T>, radius: T) -> Result<T> {
    let m = p.dimension();
    let zero = vec![T::zero(); m];
    let normalized: Vec<HalfspaceConstraint<T>> = p
        .constraints
        .iter()
        .filter_map(|c| {
            let nb = norm(&c.b);
            (nb > T::zero())
                .then(|| HalfspaceConstraint::new(c.b.iter().map(|&v| v / nb).collect(), c.c / nb))
        })
        .collect();
    if p.constraints
        .iter()
        .any(|c| norm(&c.b) == T::zero() && c.c < T::zero())
    {
        let worst = p
            .constraints
            .iter()
            .filter(|c| norm(&c.b) == T::zero())
            .map(|c| c.c)
            .fold(T::infinity(), T::min);
        return Ok(worst);
    }

    // u = 0 certifies this lower bound.
    let mut lo = normalized.iter().map(|c| c.c).fold(radius, T::min);
    let mut hi = radius;
    let shrunk_feasible = |s: T| -> Result<bool> {
        let constraints = normalized
            .iter()
            .map(|c| HalfspaceConstraint::new(c.b.clone(), c.c - s))
            .collect();
        let r = radius - s;
        if r < T::zero() {
            return Ok(false);
        }
        let aux = FilterProblem::new(zero.clone(), constraints, InputBounds::Ball { radius: r });
        Ok(ball_problem_nonempty(&aux, r))
    };
    if lo >= hi {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::half();
        if mid <= lo || mid >= hi {
            break;
        }
        if shrunk_feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon().max(T::lit(1e-10)) * (T::one() + radius) {
            break;
        }
    }
    Ok(lo)
}

/// Whether halfspaces and ball intersect. The minimum-norm point of the
/// polyhedron is the anchor of one of its faces, so it is enough to find one
/// feasible anchor.
fn ball_problem_nonempty<T: Scalar>(p: &FilterProblem<T>, radius: T) -> bool {
    let tol = T::feasibility_tol();
    let m = p.dimension();
    if p.constraints.iter().all(|c| c.c >= -tol) {
        return true;
    }
    let feasible =
        |u: &[T]| norm(u) <= radius + tol && p.constraints.iter().all(|c| c.slack(u) >= -tol);
    let mut found = false;
    for size in 1..=m.min(p.constraints.len()) {
        for_each_combination(p.constraints.len(), size, &mut |subset| {
            if found {
                return;
            }
            let rows: Vec<&HalfspaceConstraint<T>> =
                subset.iter().map(|&k| &p.constraints[k]).collect();
            if let Some(face) = AffineFace::new(&rows, m) {
                found = feasible(&face.anchor);
            }
        });
        if found {
            return true;
        }
    }
    false
}

/// Stationarity and primal residual at a reported solution.
///
/// Multipliers for the tight halfspaces and input-set faces are fitted by
/// nonnegative least squares; the result is the larger of the stationarity
/// residual `‖u − u_nom − Σ μ_k ∇g_k‖` and the worst constraint violation.
pub fn kkt_residual<T: Scalar>(p: &FilterProblem<T>, u: &[T]) -> T {
    let tol = T::lit(1e-7);
    let m = u.len();
    let mut grads: Vec<Vec<T>> = Vec::new();
    let mut violation = T::zero();
    for c in &p.constraints {
        let s = c.slack(u);
        violation = violation.max(-s);
        if s.abs() <= tol {
            grads.push(c.b.clone());
        }
    }
    match p.bounds {
        InputBounds::Box { lower, upper } => {
            for (i, &v) in u.iter().enumerate() {
                violation = violation.max(lower - v).max(v - upper);
                let mut e = vec![T::zero(); m];
                if (v - lower).abs() <= tol {
                    e[i] = T::one();
                    grads.push(e);
                } else if (upper - v).abs() <= tol {
                    e[i] = -T::one();
                    grads.push(e);
                }
            }
        }
        InputBounds::Ball { radius } => {
            let r = norm(u);
            violation = violation.max(r - radius);
            if (radius - r).abs() <= tol && r > T::zero() {
                grads.push(u.iter().map(|&v| -v / r).collect());
            }
        }
    }
    let target: Vec<T> = u.iter().zip(&p.nominal).map(|(&a, &b)| a - b).collect();
    let stationarity = nonnegative_fit_residual(&grads, &target);
    stationarity.max(violation.max(T::zero()))
}

/// `min_{μ ≥ 0} ‖target − Σ μ_k cols_k‖` by enumerating supports.
fn nonnegative_fit_residual<T: Scalar>(cols: &[Vec<T>], target: &[T]) -> T {
    let mut best = norm(target);
    let n = cols.len().min(12);
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        let k = support.len();
        let mut gram = vec![T::zero(); k * k];
        let mut rhs = vec![T::zero(); k];
        for (a, &ia) in support.iter().enumerate() {
            rhs[a] = dot(&cols[ia], target);
            for (b, &ib) in support.iter().enumerate() {
                gram[a * k + b] = dot(&cols[ia], &cols[ib]);
            }
        }
        let Some(mu) = solve_dense(&mut gram, &mut rhs, k) else {
            continue;
        };
        if mu.iter().any(|&v| v < T::zero()) {
            continue;
        }
        let mut resid = target.to_vec();
        for (&coef, &ic) in mu.iter().zip(&support) {
            for (r, &c) in resid.iter_mut().zip(&cols[ic]) {
                *r = *r - coef * c;
            }
        }
        best = best.min(norm(&resid));
    }
    best
}

/// Affine set `{u : b_k·u + c_k = 0}` for a linearly independent subset.
struct AffineFace<T> {
    /// Orthonormal basis of the row space.
    basis: Vec<Vec<T>>,
    /// Minimum-norm point of the affine set.
    anchor: Vec<T>,
    dimension: usize,
}

impl<T: Scalar> AffineFace<T> {
    fn new(rows: &[&HalfspaceConstraint<T>], dimension: usize) -> Option<Self> {
        let k = rows.len();
        let mut basis: Vec<Vec<T>> = Vec::with_capacity(k);
        for row in rows {
            let scale = norm(&row.b);
            if scale == T::zero() {
                return None;
            }
            let mut v = row.b.clone();
            for q in &basis {
                let proj = dot(q, &v);
                for (vi, &qi) in v.iter_mut().zip(q) {
                    *vi = *vi - proj * qi;
                }
            }
            let len = norm(&v);
            if len <= T::lit(1e-10) * scale {
                return None;
            }
            basis.push(v.into_iter().map(|x| x / len).collect());
        }
        // anchor = −Bᵀ (B Bᵀ)⁻¹ c
        let mut gram = vec![T::zero(); k * k];
        let mut rhs = vec![T::zero(); k];
        for a in 0..k {
            rhs[a] = -rows[a].c;
            for b in 0..k {
                gram[a * k + b] = dot(&rows[a].b, &rows[b].b);
            }
        }
        let lambda = solve_dense(&mut gram, &mut rhs, k)?;
        let mut anchor = vec![T::zero(); dimension];
        for (row, &l) in rows.iter().zip(&lambda) {
            for (a, &b) in anchor.iter_mut().zip(&row.b) {
                *a = *a + l * b;
            }
        }
        Some(Self {
            basis,
            anchor,
            dimension,
        })
    }

    fn null_component(&self, v: &[T]) -> Vec<T> {
        let mut out = v.to_vec();
        for q in &self.basis {
            let proj = dot(q, v);
            for (o, &qi) in out.iter_mut().zip(q) {
                *o = *o - proj * qi;
            }
        }
        out
    }

    /// Orthogonal projection of `v` onto the affine set.
    fn project(&self, v: &[T]) -> Vec<T> {
        self.null_component(v)
            .into_iter()
            .zip(&self.anchor)
            .map(|(a, &b)| a + b)
            .collect()
    }

    /// Point of the affine set on the sphere of `radius` that is closest to
    /// `v`: the anchor moved along the null-space component of `v`.
    fn sphere_point(&self, v: &[T], radius: T) -> Option<Vec<T>> {
        if self.basis.len() >= self.dimension {
            return None;
        }
        let anchor_sq = dot(&self.anchor, &self.anchor);
        let reach_sq = radius * radius - anchor_sq;
        if reach_sq < T::zero() {
            return None;
        }
        let reach = reach_sq.sqrt();
        let mut dir = self.null_component(v);
        let mut len = norm(&dir);
        if len <= T::lit(1e-14) {
            // every direction in the null space is equally close; take the
            // first coordinate axis with a nonzero null component
            for i in 0..self.dimension {
                let mut e = vec![T::zero(); self.dimension];
                e[i] = T::one();
                dir = self.null_component(&e);
                len = norm(&dir);
                if len > T::lit(1e-8) {
                    break;
                }
            }
        }
        if len == T::zero() {
            return None;
        }
        Some(
            self.anchor
                .iter()
                .zip(&dir)
                .map(|(&a, &d)| a + reach * d / len)
                .collect(),
        )
    }
}

/// Gaussian elimination with partial pivoting on a row-major `k × k` system.
fn solve_dense<T: Scalar>(a: &mut [T], b: &mut [T], k: usize) -> Option<Vec<T>> {
    let scale = a.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| {
            a[i * k + col]
                .abs()
                .partial_cmp(&a[j * k + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot * k + col].abs() <= T::lit(1e-13) * scale.max(T::min_positive_value()) {
            return None;
        }
        if pivot != col {
            for c in 0..k {
                a.swap(pivot * k + c, col * k + c);
            }
            b.swap(pivot, col);
        }
        for row in col + 1..k {
            let f = a[row * k + col] / a[col * k + col];
            for c in col..k {
                a[row * k + c] = a[row * k + c] - f * a[col * k + c];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); k];
    for row in (0..k).rev() {
        let mut acc = b[row];
        for c in row + 1..k {
            acc = acc - a[row * k + c] * x[c];
        }
        x[row] = acc / a[row * k + row];
    }
    Some(x)
}

fn for_each_combination(n: usize, size: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(
        start: usize,
        n: usize,
        size: usize,
        buf: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if buf.len() == size {
            f(buf);
            return;
        }
        let remaining = size - buf.len();
        for k in start..=n - remaining {
            buf.push(k);
            rec(k + 1, n, size, buf, f);
            buf.pop();
        }
    }
    if size > n {
        return;
    }
    let mut buf = Vec::with_capacity(size);
    rec(0, n, size, &mut buf, f);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(nominal: f64, constraints: Vec<HalfspaceConstraint<f64>>) -> FilterProblem<f64> {
        FilterProblem::new(vec![nominal], constraints, InputBounds::symmetric(1.0))
    }

    fn ball(
        nominal: &[f64],
        constraints: Vec<HalfspaceConstraint<f64>>,
        radius: f64,
    ) -> FilterProblem<f64> {
        FilterProblem::new(nominal.to_vec(), constraints, InputBounds::Ball { radius })
    }

    #[test]
    fn scalar_clamps_to_upper_bound() {
        let s = solve_scalar(&scalar(5.0, vec![HalfspaceConstraint::lower(0.9)])).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.u, vec![1.0]);
    }

    #[test]
    fn scalar_keeps_feasible_nominal() {
        let p = scalar(
            0.0,
            vec![
                HalfspaceConstraint::lower(0.9),
                HalfspaceConstraint::upper(0.3),
            ],
        );
        let s = solve_scalar(&p).unwrap();
        assert_eq!(s.u, vec![0.0]);
        assert!(s.active_set.is_empty());
    }

    #[test]
    fn scalar_empty_interval_is_infeasible() {
        let p = scalar(
            0.0,
            vec![
                HalfspaceConstraint::lower(-0.5),
                HalfspaceConstraint::upper(0.2),
            ],
        );
        assert_eq!(solve_scalar(&p).unwrap().status, SolveStatus::Infeasible);
        assert!(feasibility_margin(&p).unwrap() < 0.0);
    }

    #[test]
    fn scalar_margin_is_half_width() {
        let p = scalar(0.0, vec![HalfspaceConstraint::lower(0.9)]);
        assert!((feasibility_margin(&p).unwrap() - 0.95).abs() < 1e-15);
    }

    #[test]
    fn ball_identity_and_radial_projection() {
        let s = solve_ball(&ball(&[0.3, -0.4], vec![], 1.0)).unwrap();
        assert_eq!(s.u, vec![0.3, -0.4]);
        let s = solve_ball(&ball(&[3.0, 4.0], vec![], 1.0)).unwrap();
        assert!((s.u[0] - 0.6).abs() < 1e-15 && (s.u[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn ball_with_one_halfspace() {
        // u_x ≥ 0.5
        let con = HalfspaceConstraint::new(vec![1.0, 0.0], -0.5);
        let p = ball(&[-1.0, 0.0], vec![con], 1.0);
        let s = solve_ball(&p).unwrap();
        assert!((s.u[0] - 0.5).abs() < 1e-12 && s.u[1].abs() < 1e-12);
        let d = (s.u[0] + 1.0).powi(2) + s.u[1].powi(2);
        assert!((d - 2.25).abs() < 1e-12);
        assert_eq!(s.active_set, vec![0]);
        assert!(kkt_residual(&p, &s.u) <= 1e-8);
    }

    #[test]
    fn ball_corner_between_halfspace_and_sphere() {
        // u_x ≥ 0.8 with nominal pulling far along +y
        let con = HalfspaceConstraint::new(vec![1.0, 0.0], -0.8);
        let p = ball(&[0.0, 5.0], vec![con], 1.0);
        let s = solve_ball(&p).unwrap();
        assert!((s.u[0] - 0.8).abs() < 1e-12);
        assert!((s.u[1] - 0.6).abs() < 1e-12);
        assert!(kkt_residual(&p, &s.u) <= 1e-8);
    }

    #[test]
    fn ball_infeasible_halfspace() {
        let con = HalfspaceConstraint::new(vec![0.0, 1.0], -2.0);
        let p = ball(&[0.0, 0.0], vec![con], 1.0);
        assert_eq!(solve_ball(&p).unwrap().status, SolveStatus::Infeasible);
        let margin = feasibility_margin(&p).unwrap();
        assert!((margin + 0.5).abs() < 1e-9, "{margin}");
    }

    #[test]
    fn ball_margin_without_constraints_is_radius() {
        let p = ball(&[0.0, 0.0], vec![], 1.0);
        assert_eq!(feasibility_margin(&p).unwrap(), 1.0);
    }

    #[test]
    fn ball_margin_of_slab() {
        // |u_x| ≤ 0.2 inside the unit disk: inscribed radius 0.2
        let p = ball(
            &[0.0, 0.0],
            vec![
                HalfspaceConstraint::new(vec![1.0, 0.0], 0.2),
                HalfspaceConstraint::new(vec![-1.0, 0.0], 0.2),
            ],
            1.0,
        );
        assert!((feasibility_margin(&p).unwrap() - 0.2).abs() < 1e-9);
    }

    #[test]
    fn too_many_constraints() {
        let cons = vec![HalfspaceConstraint::new(vec![1.0, 0.0], 1.0); MAX_CONSTRAINTS + 1];
        assert!(matches!(
            solve_ball(&ball(&[0.0, 0.0], cons, 1.0)),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn combinations_are_enumerated() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, &mut |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        let mut count = 0;
        for_each_combination(3, 0, &mut |_| count += 1);
        assert_eq!(count, 1);
    }

    #[test]
    fn kkt_residual_detects_suboptimal_point() {
        let p = scalar(5.0, vec![HalfspaceConstraint::lower(0.9)]);
        assert!(kkt_residual(&p, &[1.0]) <= 1e-12);
        assert!(kkt_residual(&p, &[0.5]) > 0.1);
    }
}
