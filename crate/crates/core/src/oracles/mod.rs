//! Feasible sets accessed through linear minimization oracles.

mod lloo;
mod polytopes;
mod product;
mod sym_l1;

pub use lloo::{LlooOracle, SimplexLloo};
pub use polytopes::{l1ball_lmo, simplex_lmo, BoxSet, L1Ball, UnitSimplex};
pub use product::{Block, ProductSet};
pub use sym_l1::{sym_l1_lmo, SymL1Ball};

use crate::error::{Error, Result};
use crate::gsc::Objective;
use crate::linalg::{along, dot};

/// Stable identifier of a polytope vertex.
pub type VertexId = u64;

/// Oracle output: a point of the set, tagged with a vertex id when the set
/// is a polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: Option<VertexId>,
    pub point: Vec<f64>,
}

/// Membership slack used by `contains` implementations.
pub const CONTAINS_TOL: f64 = 1e-9;

/// Gap values in `[-GAP_CLAMP, 0)` (relative to the magnitudes involved) are
/// treated as rounding and clamped to zero.
pub const GAP_CLAMP: f64 = 1e-12;

pub trait FeasibleSet: Send + Sync {
    fn dim(&self) -> usize;

    /// A minimizer of `⟨c, ·⟩` over the set; ties broken by lowest index.
    fn lmo(&self, c: &[f64]) -> Vertex;

    fn contains(&self, x: &[f64]) -> bool;

    fn diameter(&self) -> f64;

    /// True when every `lmo` output carries a vertex id.
    fn is_polytope(&self) -> bool {
        false
    }

    /// Writes `x` as a convex combination of tagged vertices.
    fn vertex_decomposition(&self, _x: &[f64]) -> Option<Vec<(Vertex, f64)>> {
        None
    }
}

/// Frank-Wolfe gap `⟨grad, x - s⟩`.
pub fn gap(grad: &[f64], x: &[f64], s: &[f64]) -> Result<f64> {
    let gx = dot(grad, x);
    let gs = dot(grad, s);
    let g = gx - gs;
    if g >= 0.0 {
        Ok(g)
    } else if g >= -GAP_CLAMP * (1.0 + gx.abs().max(gs.abs())) {
        Ok(0.0)
    } else {
        Err(Error::OracleViolation(g))
    }
}

/// Largest `t ∈ (0, 1]` keeping `x + t v` inside a convex domain, by 30
/// bisection steps on the membership test, shrunk by `1 - 1e-7`.
pub fn bisect_max_step(in_domain: impl Fn(&[f64]) -> bool, x: &[f64], v: &[f64]) -> f64 {
    if in_domain(&along(x, 1.0, v)) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if in_domain(&along(x, mid, v)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo * (1.0 - 1e-7)
}

/// `sup{t ∈ (0, 1] : x + t v ∈ dom f}` using the objective's step rule.
pub fn max_feasible_step<F: Objective + ?Sized>(f: &F, x: &[f64], v: &[f64]) -> Result<f64> {
    if !f.in_domain(x) {
        return Err(Error::NotInDomain);
    }
    Ok(f.max_step(x, v))
}

pub(crate) fn argmin_lowest(c: &[f64]) -> usize {
    let mut best = 0;
    for (i, &ci) in c.iter().enumerate() {
        if ci < c[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn argmax_abs_lowest(c: &[f64]) -> usize {
    let mut best = 0;
    for (i, &ci) in c.iter().enumerate() {
        if ci.abs() > c[best].abs() {
            best = i;
        }
    }
    best
}

/// `sign` with `sign(0) = +1`.
pub(crate) fn sign(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_examples() {
        let x = [0.2, 0.3, 0.5];
        assert_eq!(gap(&[1.0, 2.0, 3.0], &x, &x).unwrap(), 0.0);
        let set = UnitSimplex::new(3);
        let g = [3.0, 1.0, 2.0];
        let s = set.lmo(&g);
        assert_eq!(s.point, vec![0.0, 1.0, 0.0]);
        assert_eq!(gap(&g, &[1.0, 0.0, 0.0], &s.point).unwrap(), 2.0);
    }

    #[test]
    fn gap_clamps_rounding_but_rejects_violations() {
        let g = [1.0, 1.0];
        assert_eq!(gap(&g, &[0.5, 0.5], &[0.5, 0.5 + 1e-14]).unwrap(), 0.0);
        assert!(matches!(
            gap(&g, &[0.0, 0.0], &[0.5, 0.5]),
            Err(Error::OracleViolation(_))
        ));
    }

    #[test]
    fn bisection_step_on_halfline() {
        // domain {y : y < 0.5 + 0.5}, from 0.5 along -1 until y > 0
        let t = bisect_max_step(|y| y[0] > 0.0, &[0.5], &[-1.0]);
        assert!(t < 0.5 && t > 0.5 - 1e-6);
        assert_eq!(bisect_max_step(|_| true, &[0.5], &[-1.0]), 1.0);
    }
}
