//! Online portfolio selection: maximize the log-return over the simplex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use super::{linear_max_step, ProblemInstance, StartRecipe};
use crate::error::{Error, Result};
use crate::gsc::{GscSpec, Objective};
use crate::linalg::dot;
use crate::oracles::{SimplexLloo, UnitSimplex};

/// `−Σ_t ln(r_tᵀ x)` for a `p × n` return matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Portfolio {
    returns: Vec<f64>,
    p: usize,
    n: usize,
}

impl Portfolio {
    pub fn new(returns: Vec<f64>, p: usize, n: usize) -> Result<Self> {
        if p == 0 || n == 0 {
            return Err(Error::Empty("return matrix"));
        }
        if returns.len() != p * n {
            return Err(Error::DimensionMismatch {
                expected: p * n,
                found: returns.len(),
            });
        }
        Ok(Self { returns, p, n })
    }

    pub fn periods(&self) -> usize {
        self.p
    }

    fn row(&self, t: usize) -> &[f64] {
        &self.returns[t * self.n..(t + 1) * self.n]
    }

    /// `R x`
    pub fn wealth(&self, x: &[f64]) -> Vec<f64> {
        (0..self.p).map(|t| dot(self.row(t), x)).collect()
    }
}

impl Objective for Portfolio {
    fn dim(&self) -> usize {
        self.n
    }

    fn spec(&self) -> GscSpec {
        GscSpec::new(2.0, 3.0).expect("valid constant")
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        self.wealth(x).iter().all(|&z| z > 0.0)
    }

    fn value(&self, x: &[f64]) -> f64 {
        let z = self.wealth(x);
        if z.iter().any(|&v| !(v > 0.0)) {
            return f64::INFINITY;
        }
        -z.iter().map(|v| v.ln()).sum::<f64>()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        for (t, z) in self.wealth(x).into_iter().enumerate() {
            crate::linalg::axpy(-1.0 / z, self.row(t), &mut g);
        }
        g
    }

    fn hess_vec(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let mut h = vec![0.0; self.n];
        for (t, z) in self.wealth(x).into_iter().enumerate() {
            let r = self.row(t);
            crate::linalg::axpy(dot(r, v) / (z * z), r, &mut h);
        }
        h
    }

    fn max_step(&self, x: &[f64], v: &[f64]) -> f64 {
        linear_max_step(&self.wealth(x), &self.wealth(v))
    }
}

/// Portfolio problem over the unit simplex with its local linear oracle.
pub fn portfolio_problem(returns: Vec<f64>, p: usize, n: usize) -> Result<ProblemInstance> {
    let obj = Portfolio::new(returns, p, n)?;
    ProblemInstance::new(
        "portfolio",
        Box::new(obj),
        Box::new(UnitSimplex::new(n)),
        Some(Box::new(SimplexLloo::new(n))),
        StartRecipe::SimplexVertex { n },
    )
}

/// `p × n` matrix of `1 + N(0, 0.1²)` returns, row-major.
pub fn portfolio_generator(p: usize, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.1).expect("valid deviation");
    (0..p * n).map(|_| 1.0 + rng.sample(noise)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::testing::{check_derivatives, check_sandwich};
    use crate::solvers::{Method, SolverConfig};
    use proptest::prelude::*;

    #[test]
    fn uniform_returns() {
        let f = Portfolio::new(vec![1.0; 12], 4, 3).unwrap();
        for x in [[1.0, 0.0, 0.0], [0.2, 0.3, 0.5]] {
            assert_eq!(f.value(&x), 0.0);
            assert_eq!(f.gradient(&x), vec![-4.0; 3]);
        }
    }

    #[test]
    fn single_asset() {
        let r = vec![1.1, 0.9, 1.3];
        let f = Portfolio::new(r.clone(), 3, 1).unwrap();
        let expect: f64 = -r.iter().map(|v: &f64| v.ln()).sum::<f64>();
        assert!((f.value(&[1.0]) - expect).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_matches_a_scalar_solve() {
        let r = vec![1.2, 0.8, 0.7, 1.4];
        let inst = portfolio_problem(r.clone(), 2, 2).unwrap();
        // φ(a) = f(a, 1 − a): bisection on φ' over (0, 1)
        let dphi = |a: f64| {
            let g = inst.objective.gradient(&[a, 1.0 - a]);
            g[0] - g[1]
        };
        let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if dphi(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let a_star = 0.5 * (lo + hi);
        let cfg = SolverConfig {
            epsilon: 1e-13,
            max_iter: 10_000,
            ..Default::default()
        };
        for m in [Method::Fwgsc, Method::Asfwgsc, Method::FwLineSearch] {
            let tr = inst.solve(m, &[1.0, 0.0], &cfg).unwrap();
            assert!((tr.x[0] - a_star).abs() < 1e-8, "{m}: {} vs {a_star}", tr.x[0]);
        }
    }

    #[test]
    fn generator_statistics() {
        let (p, n) = (1000, 100);
        let r = portfolio_generator(p, n, 17);
        assert_eq!(r, portfolio_generator(p, n, 17));
        let m = r.iter().sum::<f64>() / (p * n) as f64;
        assert!((m - 1.0).abs() < 3.0 * 0.1 / ((p * n) as f64).sqrt());
        let var = r.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (p * n - 1) as f64;
        assert!((var / 0.01 - 1.0).abs() < 0.1);
    }

    #[test]
    fn max_step_matches_the_domain() {
        let f = Portfolio::new(vec![1.0, -1.0, 2.0, 1.0], 2, 2).unwrap();
        let x = [1.0, 0.0];
        let v = [-1.0, 1.0];
        let t = f.max_step(&x, &v);
        // first period wealth 1 − 2t hits zero at 1/2
        assert!(t < 0.5 && t > 0.5 - 1e-6);
        assert!(f.in_domain(&crate::linalg::along(&x, t, &v)));
        assert!(!f.in_domain(&crate::linalg::along(&x, 0.5, &v)));
    }

    #[test]
    fn derivatives_and_sandwich() {
        let inst = portfolio_problem(portfolio_generator(50, 6, 3), 50, 6).unwrap();
        check_derivatives(&inst, 20, 1);
        check_sandwich(&inst, 20, 2);
    }

    proptest! {
        #[test]
        fn hessian_is_psd(seed in 0u64..1000, v in proptest::collection::vec(-1.0f64..1.0, 5)) {
            let inst = portfolio_problem(portfolio_generator(20, 5, seed), 20, 5).unwrap();
            let x = crate::problems::testing::interior_points(&inst, 1, seed).pop().unwrap();
            prop_assert!(dot(&inst.objective.hess_vec(&x, &v), &v) >= -1e-12);
        }
    }
}
