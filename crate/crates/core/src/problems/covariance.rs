//! Sparse inverse covariance estimation over the symmetric ℓ1 ball.

use nalgebra::{Cholesky, DMatrix, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{ProblemInstance, StartRecipe, STEP_SHRINK};
use crate::error::{Error, Result};
use crate::gsc::{GscSpec, Objective};
use crate::oracles::SymL1Ball;

/// Relative asymmetry tolerated in inputs and iterates.
pub const SYMMETRY_TOL: f64 = 1e-10;

fn asymmetry(x: &[f64], p: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..p {
        for j in i + 1..p {
            worst = worst.max((x[i * p + j] - x[j * p + i]).abs());
        }
    }
    worst
}

fn is_symmetric(x: &[f64], p: usize) -> bool {
    let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    asymmetry(x, p) <= SYMMETRY_TOL * scale
}

fn flatten(m: &DMatrix<f64>) -> Vec<f64> {
    // row-major; callers only pass symmetric matrices or want the transpose
    m.transpose().as_slice().to_vec()
}

/// `−log det X + tr(Σ̂ X)` over symmetric `p × p` matrices, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    sigma_hat: Vec<f64>,
    p: usize,
}

impl Covariance {
    pub fn new(sigma_hat: Vec<f64>, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Empty("covariance matrix"));
        }
        if sigma_hat.len() != p * p {
            return Err(Error::DimensionMismatch {
                expected: p * p,
                found: sigma_hat.len(),
            });
        }
        if !is_symmetric(&sigma_hat, p) {
            return Err(Error::Asymmetric(asymmetry(&sigma_hat, p)));
        }
        Ok(Self { sigma_hat, p })
    }

    pub fn side(&self) -> usize {
        self.p
    }

    fn factor(&self, x: &[f64]) -> Option<Cholesky<f64, Dyn>> {
        if !is_symmetric(x, self.p) || x.iter().any(|v| !v.is_finite()) {
            return None;
        }
        DMatrix::from_row_slice(self.p, self.p, x).cholesky()
    }
}

impl Objective for Covariance {
    fn dim(&self) -> usize {
        self.p * self.p
    }

    fn spec(&self) -> GscSpec {
        GscSpec::new(2.0, 3.0).expect("valid constant")
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        self.factor(x).is_some()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let Some(ch) = self.factor(x) else {
            return f64::INFINITY;
        };
        let log_det = 2.0 * ch.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        -log_det + crate::linalg::dot(&self.sigma_hat, x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let ch = self.factor(x).expect("gradient evaluated outside the domain");
        let inv = ch.inverse();
        let inv = flatten(&inv);
        self.sigma_hat.iter().zip(&inv).map(|(s, i)| s - i).collect()
    }

    /// `X⁻¹ V X⁻¹` from two solves with the Cholesky factor.
    fn hess_vec(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let ch = self.factor(x).expect("hess_vec evaluated outside the domain");
        let vm = DMatrix::from_row_slice(self.p, self.p, v);
        let a = ch.solve(&vm);
        let b = ch.solve(&a.transpose());
        // b = X⁻¹ Vᵀ X⁻¹, the row-major flattening of its transpose is X⁻¹ V X⁻¹
        flatten(&b.transpose())
    }

    /// `X + tV ≻ 0` exactly when `1 + t λ_min(L⁻¹ V L⁻ᵀ) > 0`.
    fn max_step(&self, x: &[f64], v: &[f64]) -> f64 {
        let Some(ch) = self.factor(x) else {
            return 0.0;
        };
        if !is_symmetric(v, self.p) {
            return 0.0;
        }
        let l = ch.l();
        let vm = DMatrix::from_row_slice(self.p, self.p, v);
        let Some(w) = l.solve_lower_triangular(&vm) else {
            return 0.0;
        };
        let Some(w) = l.solve_lower_triangular(&w.transpose()) else {
            return 0.0;
        };
        let sym = (&w + w.transpose()) * 0.5;
        let lmin = sym.symmetric_eigenvalues().min();
        let limit = if lmin < 0.0 { -1.0 / lmin } else { f64::INFINITY };
        if limit > 1.0 && self.in_domain(&crate::linalg::along(x, 1.0, v)) {
            return 1.0;
        }
        // rounding near a singular endpoint can defeat the factorization
        let mut shrink = STEP_SHRINK;
        while shrink < 1.0 {
            let t = limit.min(1.0) * (1.0 - shrink);
            if self.in_domain(&crate::linalg::along(x, t, v)) {
                return t;
            }
            shrink *= 4.0;
        }
        0.0
    }
}

/// `R = ⌈√p⌉`
pub fn covariance_radius(p: usize) -> f64 {
    (p as f64).sqrt().ceil()
}

/// Covariance problem over the symmetric ℓ1 ball of radius `⌈√p⌉`.
pub fn covariance_problem(sigma_hat: Vec<f64>, p: usize) -> Result<ProblemInstance> {
    let obj = Covariance::new(sigma_hat, p)?;
    let radius = covariance_radius(p);
    ProblemInstance::new(
        "covariance",
        Box::new(obj),
        Box::new(SymL1Ball::new(p, radius)),
        None,
        StartRecipe::CovarianceDiagonal { p, radius },
    )
}

/// `Σ σ_i v_i v_iᵀ` with a random orthonormal basis and `σ_i ~ U(0.5, 1)`.
pub fn covariance_generator(p: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<f64>::from_fn(p, p, |_, _| rng.sample(StandardNormal));
    let q = g.qr().q();
    let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(p, |_, _| rng.random_range(0.5..1.0)));
    let m = &q * sigma * q.transpose();
    let m = (&m + m.transpose()) * 0.5;
    flatten(&m)
}
