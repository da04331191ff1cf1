//! FWLLOO: Frank-Wolfe with a local linear oracle and a shrinking radius.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{check_start, probe, should_stop, Method, Recorder, RunTrace, SolverConfig, StepKind};
use crate::error::{Error, Result};
use crate::gsc::{LocalGeometry, Objective, Order};
use crate::linalg::{along, sub};
use crate::oracles::{FeasibleSet, LlooOracle};
use crate::stepsize::{t_star, PsiParams};

/// Floor for the automatic strong-convexity estimate.
pub const SIGMA_FLOOR: f64 = 1e-10;

/// Radius bookkeeping: `r_k² = r_0² c_k`, `c_{k+1} = c_k exp(−α_k / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlooState {
    pub c: f64,
    pub r: f64,
    pub r0: f64,
}

impl LlooState {
    pub fn new(gap0: f64, sigma: f64) -> Self {
        let r0 = (2.0 * gap0 / sigma).sqrt();
        Self { c: 1.0, r: r0, r0 }
    }

    pub fn advance(&mut self, alpha: f64) {
        self.c *= (-0.5 * alpha).exp();
        self.r = self.r0 * self.c.sqrt();
    }
}

/// Smallest eigenvalue of the Hessian at `x`, floored at [`SIGMA_FLOOR`].
pub fn auto_sigma<F: Objective + ?Sized>(obj: &F, x: &[f64]) -> f64 {
    let n = obj.dim();
    let mut h = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let col = obj.hess_vec(x, &crate::linalg::unit(n, j, 1.0));
        for i in 0..n {
            h[(i, j)] = col[i];
        }
    }
    let sym = (&h + h.transpose()) * 0.5;
    let min = sym.symmetric_eigenvalues().min();
    if min.is_finite() {
        min.max(SIGMA_FLOOR)
    } else {
        SIGMA_FLOOR
    }
}

/// FWLLOO. Each record carries the certificate `gap(x⁰) c_k`, an upper bound
/// on `f(x^k) − f*` whenever `σ_f` is a valid strong-convexity modulus.
pub fn fwlloo<F: Objective + ?Sized, S: FeasibleSet + ?Sized>(
    obj: &F,
    set: &S,
    lloo: &dyn LlooOracle,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<RunTrace> {
    check_start(obj, set, x0, config)?;
    let spec = obj.spec();
    let sigma = config.sigma_f.unwrap_or_else(|| auto_sigma(obj, x0));
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma_f must be positive, got {sigma}")));
    }
    let mut rec = Recorder::new(Method::Fwlloo, config);
    let mut x = x0.to_vec();
    let mut state: Option<LlooState> = None;
    let mut gap0 = 0.0;
    for k in 0.. {
        let p = probe(obj, set, &x)?;
        let st = *state.get_or_insert_with(|| {
            gap0 = p.gap;
            LlooState::new(p.gap, sigma)
        });
        let r = rec.open(k, p.f, p.gap, &x);
        r.certificate = Some(gap0 * st.c);
        r.estimate = Some(st.r);
        if let Some(status) = should_stop(k, p.gap, config) {
            return Ok(rec.finish(status, x));
        }
        let u = lloo.query(&x, st.r, &p.grad)?;
        let v = sub(&u, &x);
        let geom = LocalGeometry::along(obj, &x, &v, p.gap);
        let delta = spec.m_f() * geom.delta;
        let xi = 2.0 * geom.e * geom.e / (gap0 * st.c);
        // both vanish only for u = x or a flat direction: take the full step
        let mut alpha = if delta == 0.0 && xi == 0.0 {
            1.0
        } else {
            t_star(&PsiParams::with_order(delta, xi, spec.order())?)?.min(1.0)
        };
        if spec.order() != Order::Two && alpha * delta >= 1.0 {
            alpha = (1.0 - f64::EPSILON) / delta;
        }
        let y = along(&x, alpha, &v);
        if !obj.in_domain(&y) {
            return Err(Error::NotInDomain);
        }
        r.alpha = alpha;
        r.step_kind = Some(StepKind::Forward);
        r.dikin = Some(alpha * delta);
        state.as_mut().expect("initialised above").advance(alpha);
        x = y;
    }
    unreachable!()
}
