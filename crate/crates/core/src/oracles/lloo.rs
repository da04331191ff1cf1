use super::{argmin_lowest, FeasibleSet, UnitSimplex};
use crate::error::{Error, Result};

/// Local linear oracle: returns `u` in the set with `‖x − u‖ ≤ ρ r` and
/// `⟨c, u⟩ ≤ ⟨c, y⟩` for every `y` of the set within distance `r` of `x`.
pub trait LlooOracle: Send + Sync {
    fn rho(&self) -> f64;
    fn query(&self, x: &[f64], r: f64, c: &[f64]) -> Result<Vec<f64>>;
}

/// Garber–Hazan local oracle on the unit simplex, `ρ = √n`.
///
/// Moves `Δ = min(√n r / 2, 1)` of mass from the coordinates with the
/// largest costs onto `argmin c`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexLloo {
    set: UnitSimplex,
    n: usize,
}

impl SimplexLloo {
    pub fn new(n: usize) -> Self {
        Self {
            set: UnitSimplex::new(n),
            n,
        }
    }
}

impl LlooOracle for SimplexLloo {
    fn rho(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    fn query(&self, x: &[f64], r: f64, c: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n || c.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: if x.len() != self.n { x.len() } else { c.len() },
            });
        }
        if !self.set.contains(x) {
            return Err(Error::InfeasibleStart("point is not on the unit simplex".into()));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
        }
        let mut u = x.to_vec();
        let best = argmin_lowest(c);
        let mut budget = ((self.n as f64).sqrt() * r / 2.0).min(1.0);
        let mut order: Vec<usize> = (0..self.n).filter(|&i| c[i] > c[best]).collect();
        order.sort_by(|&a, &b| c[b].total_cmp(&c[a]).then(a.cmp(&b)));
        let mut moved = 0.0;
        for i in order {
            if budget <= 0.0 {
                break;
            }
            let take = u[i].min(budget);
            u[i] -= take;
            budget -= take;
            moved += take;
        }
        u[best] += moved;
        Ok(u)
    }
}
