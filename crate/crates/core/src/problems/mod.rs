//! Benchmark objectives, their feasible sets and seeded starting points.

pub mod covariance;
pub mod data;
pub mod dwd;
pub mod logistic;
pub mod portfolio;
pub mod toys;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gsc::Objective;
use crate::oracles::{FeasibleSet, LlooOracle};
use crate::solvers::Method;

pub use covariance::{covariance_generator, covariance_problem, Covariance};
pub use data::{libsvm_parse, libsvm_serialize, synthetic_classification, SparseDataset};
pub use dwd::{dwd_problem, Dwd, DwdParams};
pub use logistic::{logistic_problem, Logistic};
pub use portfolio::{portfolio_generator, portfolio_problem, Portfolio};

/// Safety shrink applied to exact domain-boundary step lengths.
pub const STEP_SHRINK: f64 = 1e-7;

/// Reference optimal value and where it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub value: f64,
    pub provenance: String,
}

/// How starting points are drawn for a problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StartRecipe {
    /// `e_i` with `i` uniform.
    SimplexVertex { n: usize },
    /// `±R e_i` with `i` and the sign uniform.
    L1Vertex { n: usize, radius: f64 },
    /// `(0, 0, ξ)` with `ξ_i` uniform on `(0, 1]`, rescaled into the ball of
    /// radius `radius` when needed.
    DwdSlack { d: usize, p: usize, radius: f64 },
    /// Diagonal matrix whose diagonal is uniform on the simplex of mass `radius`.
    CovarianceDiagonal { p: usize, radius: f64 },
    Fixed(Vec<f64>),
}

impl StartRecipe {
    pub fn sample(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match *self {
            StartRecipe::SimplexVertex { n } => crate::linalg::unit(n, rng.random_range(0..n), 1.0),
            StartRecipe::L1Vertex { n, radius } => {
                let i = rng.random_range(0..n);
                let s = if rng.random::<bool>() { radius } else { -radius };
                crate::linalg::unit(n, i, s)
            }
            StartRecipe::DwdSlack { d, p, radius } => {
                let mut x = vec![0.0; d + 1 + p];
                for xi in &mut x[d + 1..] {
                    *xi = 1.0 - rng.random::<f64>();
                }
                let norm = crate::linalg::norm2(&x[d + 1..]);
                let cap = 0.99 * radius;
                if norm > cap {
                    x[d + 1..].iter_mut().for_each(|v| *v *= cap / norm);
                }
                x
            }
            StartRecipe::CovarianceDiagonal { p, radius } => {
                let w: Vec<f64> = (0..p).map(|_| rng.sample::<f64, _>(Exp1) + 1e-12).collect();
                let total: f64 = w.iter().sum();
                let mut x = vec![0.0; p * p];
                for (i, wi) in w.iter().enumerate() {
                    x[i * p + i] = radius * wi / total;
                }
                x
            }
            StartRecipe::Fixed(ref x) => x.clone(),
        }
    }
}

/// An objective paired with its feasible set.
pub struct ProblemInstance {
    pub name: String,
    pub objective: Box<dyn Objective>,
    pub set: Box<dyn FeasibleSet>,
    pub lloo: Option<Box<dyn LlooOracle>>,
    pub start: StartRecipe,
    pub reference: Option<Reference>,
}

impl std::fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("name", &self.name)
            .field("dim", &self.objective.dim())
            .field("spec", &self.objective.spec())
            .field("lloo", &self.lloo.is_some())
            .field("reference", &self.reference)
            .finish()
    }
}

impl ProblemInstance {
    pub fn new(
        name: impl Into<String>,
        objective: Box<dyn Objective>,
        set: Box<dyn FeasibleSet>,
        lloo: Option<Box<dyn LlooOracle>>,
        start: StartRecipe,
    ) -> Result<Self> {
        if objective.dim() != set.dim() {
            return Err(Error::DimensionMismatch {
                expected: objective.dim(),
                found: set.dim(),
            });
        }
        Ok(Self {
            name: name.into(),
            objective,
            set,
            lloo,
            start,
            reference: None,
        })
    }

    pub fn with_reference(mut self, value: f64, provenance: impl Into<String>) -> Self {
        self.reference = Some(Reference {
            value,
            provenance: provenance.into(),
        });
        self
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    /// Seeded start; redraws (up to 100 times) when a draw leaves the domain.
    pub fn start(&self, seed: u64) -> Result<Vec<f64>> {
        for attempt in 0..100u64 {
            let x = self.start.sample(seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            if self.objective.in_domain(&x) {
                return Ok(x);
            }
        }
        Err(Error::InfeasibleStart(format!("no start of `{}` lies in the domain", self.name)))
    }

    /// Whether `method` can run on this instance.
    pub fn supports(&self, method: Method) -> bool {
        match method {
            Method::Fwlloo => self.lloo.is_some(),
            Method::Asfwgsc => self.set.is_polytope(),
            _ => true,
        }
    }

    /// Runs `method` from `x0`.
    pub fn solve(&self, method: Method, x0: &[f64], config: &crate::solvers::SolverConfig) -> Result<crate::solvers::RunTrace> {
        crate::solvers::run(method, &*self.objective, &*self.set, self.lloo.as_deref(), x0, config)
    }
}

/// Largest `t ∈ (0, 1]` keeping every `z_i + t dz_i` positive, given that
/// every `z_i` is positive.
pub(crate) fn linear_max_step(z: &[f64], dz: &[f64]) -> f64 {
    if z.iter().any(|&v| !(v > 0.0)) {
        return 0.0;
    }
    let limit = z
        .iter()
        .zip(dz)
        .filter(|(_, &d)| d < 0.0)
        .map(|(&v, &d)| -v / d)
        .fold(f64::INFINITY, f64::min);
    if limit > 1.0 {
        1.0
    } else {
        limit * (1.0 - STEP_SHRINK)
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use crate::gsc::descent_bounds;
    use crate::linalg::{along, dot, norm2, sub};

    /// Interior points `(1 − t) x0 + t s` for random starts `x0`, random
    /// oracle vertices `s` and `t ∈ [0, 0.5]`.
    pub fn interior_points(inst: &ProblemInstance, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = inst.dim();
        let mut out = Vec::new();
        while out.len() < count {
            let x0 = inst.start(rng.random()).unwrap();
            let c: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let s = inst.set.lmo(&c).point;
            let mut t = 0.5 * rng.random::<f64>();
            while !inst.objective.in_domain(&along(&x0, t, &sub(&s, &x0))) {
                t *= 0.5;
            }
            // keep away from the domain boundary
            let x = along(&x0, 0.5 * t, &sub(&s, &x0));
            out.push(x);
        }
        out
    }

    /// Central differences of the value and the gradient along feasible
    /// directions against `gradient` and `hess_vec`.
    pub fn check_derivatives(inst: &ProblemInstance, count: usize, seed: u64) {
        let f = &*inst.objective;
        let pts = interior_points(inst, count + 1, seed);
        for w in pts.windows(2) {
            let x = &w[0];
            let v = sub(&w[1], x);
            let neg: Vec<f64> = v.iter().map(|t| -t).collect();
            let h = 1e-4 * f.max_step(x, &v).min(f.max_step(x, &neg));
            let fd = (f.value(&along(x, h, &v)) - f.value(&along(x, -h, &v))) / (2.0 * h);
            let an = dot(&f.gradient(x), &v);
            assert!(
                (fd - an).abs() <= 1e-5 * (1.0 + an.abs() + f.value(x).abs()),
                "{}: directional derivative {an} vs {fd}",
                inst.name
            );
            let gp = f.gradient(&along(x, h, &v));
            let gm = f.gradient(&along(x, -h, &v));
            let hv = f.hess_vec(x, &v);
            let err: f64 = gp.iter().zip(&gm).zip(&hv).map(|((a, b), c)| ((a - b) / (2.0 * h) - c).powi(2)).sum::<f64>().sqrt();
            assert!(
                err <= 1e-5 * (1.0 + norm2(&hv) + norm2(&f.gradient(x))),
                "{}: hess_vec error {err}",
                inst.name
            );
        }
    }

    /// `lower ≤ f(y) ≤ upper` for pairs of interior points.
    pub fn check_sandwich(inst: &ProblemInstance, count: usize, seed: u64) {
        let f = &*inst.objective;
        let pts = interior_points(inst, count + 1, seed);
        for w in pts.windows(2) {
            for t in [1.0, 0.1, 0.01] {
                let y = along(&w[0], t, &sub(&w[1], &w[0]));
                let b = descent_bounds(f, &w[0], &y).unwrap();
                let fy = f.value(&y);
                let tol = 1e-9 * (1.0 + fy.abs());
                assert!(b.lower <= fy + tol, "{}: lower {} > f {}", inst.name, b.lower, fy);
                if let Some(u) = b.upper {
                    assert!(fy <= u + tol, "{}: f {} > upper {}", inst.name, fy, u);
                }
            }
        }
    }
}
