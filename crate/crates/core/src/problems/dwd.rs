//! Distance-weighted discrimination with a negative-power loss.

use serde::{Deserialize, Serialize};

use super::data::SparseDataset;
use super::{linear_max_step, ProblemInstance, StartRecipe};
use crate::error::{Error, Result};
use crate::gsc::{GscSpec, Objective};
use crate::linalg::dot;
use crate::oracles::{Block, ProductSet};

/// Loss exponent, slack cost, intercept bound and slack radius².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DwdParams {
    pub q: f64,
    /// Slack costs; `None` means all ones.
    pub c: Option<Vec<f64>>,
    pub u: f64,
    pub big_r: f64,
}

impl Default for DwdParams {
    fn default() -> Self {
        Self {
            q: 2.0,
            c: None,
            u: 5.0,
            big_r: 10.0,
        }
    }
}

/// `(1/p) Σ (a_iᵀ w + μ y_i + ξ_i)^{−q} + cᵀ ξ` over `x = (w, μ, ξ)`.
#[derive(Debug, Clone)]
pub struct Dwd {
    data: SparseDataset,
    q: f64,
    c: Vec<f64>,
    spec: GscSpec,
}

/// `ν = 2(q + 3)/(q + 2)`
pub fn dwd_nu(q: f64) -> f64 {
    2.0 * (q + 3.0) / (q + 2.0)
}

impl Dwd {
    pub fn new(data: SparseDataset, q: f64, c: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Empty("DWD dataset"));
        }
        if !(q >= 1.0) {
            return Err(Error::InvalidArgument(format!("q must be at least 1, got {q}")));
        }
        if c.len() != data.len() {
            return Err(Error::DimensionMismatch {
                expected: data.len(),
                found: c.len(),
            });
        }
        let p = data.len() as f64;
        let m_phi = (q + 2.0) / (q * (q + 1.0)).powf(1.0 / (q + 2.0));
        // ‖(a_i, y_i, e_i)‖ with |y_i| = 1
        let b_max = (0..data.len())
            .map(|i| (data.row_norm(i).powi(2) + 2.0).sqrt())
            .fold(0.0, f64::max);
        let m = m_phi * p.powf(1.0 / (q + 2.0)) * b_max.powf(q / (q + 2.0));
        let spec = GscSpec::new(m, dwd_nu(q))?;
        Ok(Self { data, q, c, spec })
    }

    fn split<'a>(&self, x: &'a [f64]) -> (&'a [f64], f64, &'a [f64]) {
        let d = self.data.dim;
        (&x[..d], x[d], &x[d + 1..])
    }

    /// Margins `a_iᵀ w + μ y_i + ξ_i`, linear in `x`.
    pub fn margins(&self, x: &[f64]) -> Vec<f64> {
        let (w, mu, xi) = self.split(x);
        (0..self.data.len())
            .map(|i| self.data.row_dot(i, w) + mu * self.data.labels[i] + xi[i])
            .collect()
    }

    /// Adds `alpha b_i` to `out`.
    fn add_b(&self, i: usize, alpha: f64, out: &mut [f64]) {
        let d = self.data.dim;
        self.data.add_row(i, alpha, &mut out[..d]);
        out[d] += alpha * self.data.labels[i];
        out[d + 1 + i] += alpha;
    }
}

impl Objective for Dwd {
    fn dim(&self) -> usize {
        self.data.dim + 1 + self.data.len()
    }

    fn spec(&self) -> GscSpec {
        self.spec
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        self.margins(x).iter().all(|&z| z > 0.0)
    }

    fn value(&self, x: &[f64]) -> f64 {
        let z = self.margins(x);
        if z.iter().any(|&v| !(v > 0.0)) {
            return f64::INFINITY;
        }
        let p = self.data.len() as f64;
        let (_, _, xi) = self.split(x);
        z.iter().map(|v| v.powf(-self.q)).sum::<f64>() / p + dot(&self.c, xi)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let p = self.data.len() as f64;
        let d = self.data.dim;
        let mut g = vec![0.0; self.dim()];
        g[d + 1..].copy_from_slice(&self.c);
        for (i, z) in self.margins(x).into_iter().enumerate() {
            self.add_b(i, -self.q * z.powf(-self.q - 1.0) / p, &mut g);
        }
        g
    }

    fn hess_vec(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let p = self.data.len() as f64;
        let dz = self.margins(v);
        let mut h = vec![0.0; self.dim()];
        for (i, z) in self.margins(x).into_iter().enumerate() {
            let w = self.q * (self.q + 1.0) * z.powf(-self.q - 2.0) / p;
            self.add_b(i, w * dz[i], &mut h);
        }
        h
    }

    fn max_step(&self, x: &[f64], v: &[f64]) -> f64 {
        linear_max_step(&self.margins(x), &self.margins(v))
    }
}

/// DWD over `‖w‖ ≤ 1`, `|μ| ≤ u`, `ξ ≥ 0, ‖ξ‖² ≤ R`.
pub fn dwd_problem(data: SparseDataset, params: &DwdParams) -> Result<ProblemInstance> {
    if !(params.u > 0.0 && params.big_r > 0.0) {
        return Err(Error::InvalidArgument("u and R must be positive".into()));
    }
    let p = data.len();
    let d = data.dim;
    let c = params.c.clone().unwrap_or_else(|| vec![1.0; p]);
    let obj = Dwd::new(data, params.q, c)?;
    let set = ProductSet::new(vec![
        Block::EuclidBall { dim: d, radius: 1.0 },
        Block::Interval { half_width: params.u },
        Block::NonnegBall {
            dim: p,
            radius: params.big_r.sqrt(),
        },
    ]);
    ProblemInstance::new(
        "dwd",
        Box::new(obj),
        Box::new(set),
        None,
        StartRecipe::DwdSlack {
            d,
            p,
            radius: params.big_r.sqrt(),
        },
    )
}
