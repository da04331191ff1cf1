//! ℓ1-constrained, ℓ2-regularized logistic regression.

use super::data::SparseDataset;
use super::{ProblemInstance, StartRecipe};
use crate::error::{Error, Result};
use crate::gsc::{GscSpec, Objective};
use crate::oracles::L1Ball;

/// `ln(1 + e^{−t})` without overflow.
pub(crate) fn softplus_neg(t: f64) -> f64 {
    if t > 0.0 {
        (-t).exp().ln_1p()
    } else {
        -t + t.exp().ln_1p()
    }
}

/// `1 / (1 + e^{t})`
fn sigmoid_neg(t: f64) -> f64 {
    if t > 0.0 {
        let e = (-t).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + t.exp())
    }
}

/// `(1/p) Σ ln(1 + exp(−y_i ⟨a_i, x⟩)) + (γ/2) ‖x‖²`.
#[derive(Debug, Clone)]
pub struct Logistic {
    data: SparseDataset,
    gamma: f64,
    spec: GscSpec,
}

impl Logistic {
    /// `nu_mode` 2 gives `M_f = max ‖a_i‖`, 3 gives `max ‖a_i‖ / √γ`.
    pub fn new(data: SparseDataset, gamma: f64, nu_mode: u8) -> Result<Self> {
        if data.is_empty() || data.dim == 0 {
            return Err(Error::Empty("logistic dataset"));
        }
        if !(gamma > 0.0) {
            return Err(Error::InvalidArgument(format!("gamma must be positive, got {gamma}")));
        }
        let max_norm = (0..data.len()).map(|i| data.row_norm(i)).fold(0.0, f64::max);
        let spec = match nu_mode {
            2 => GscSpec::new(max_norm, 2.0)?,
            3 => GscSpec::new(max_norm / gamma.sqrt(), 3.0)?,
            other => return Err(Error::InvalidArgument(format!("nu_mode must be 2 or 3, got {other}"))),
        };
        Ok(Self { data, gamma, spec })
    }

    pub fn data(&self) -> &SparseDataset {
        &self.data
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn margins(&self, x: &[f64]) -> Vec<f64> {
        (0..self.data.len())
            .map(|i| self.data.labels[i] * self.data.row_dot(i, x))
            .collect()
    }
}

impl Objective for Logistic {
    fn dim(&self) -> usize {
        self.data.dim
    }

    fn spec(&self) -> GscSpec {
        self.spec
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.iter().all(|v| v.is_finite())
    }

    fn value(&self, x: &[f64]) -> f64 {
        let p = self.data.len() as f64;
        let loss: f64 = self.margins(x).into_iter().map(softplus_neg).sum();
        loss / p + 0.5 * self.gamma * x.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let p = self.data.len() as f64;
        let mut g: Vec<f64> = x.iter().map(|v| self.gamma * v).collect();
        for (i, m) in self.margins(x).into_iter().enumerate() {
            self.data.add_row(i, -self.data.labels[i] * sigmoid_neg(m) / p, &mut g);
        }
        g
    }

    fn hess_vec(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let p = self.data.len() as f64;
        let mut h: Vec<f64> = v.iter().map(|t| self.gamma * t).collect();
        for (i, m) in self.margins(x).into_iter().enumerate() {
            let s = sigmoid_neg(m);
            self.data.add_row(i, s * (1.0 - s) * self.data.row_dot(i, v) / p, &mut h);
        }
        h
    }

    fn max_step(&self, _x: &[f64], _v: &[f64]) -> f64 {
        1.0
    }
}

/// Logistic regression over the ℓ1 ball of radius `radius`, started from a
/// random signed vertex.
pub fn logistic_problem(data: SparseDataset, gamma: f64, radius: f64, nu_mode: u8) -> Result<ProblemInstance> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let obj = Logistic::new(data, gamma, nu_mode)?;
    let n = obj.dim();
    ProblemInstance::new(
        format!("logistic-nu{nu_mode}"),
        Box::new(obj),
        Box::new(L1Ball::new(n, radius)),
        None,
        StartRecipe::L1Vertex { n, radius },
    )
}
