//! The two classical baselines: open-loop `2/(k+2)` steps and exact line search.

use super::{check_start, probe, should_stop, Recorder, RunTrace, SolverConfig, Status, StepKind, STALL_LIMIT};
use super::Method;
use crate::error::Result;
use crate::gsc::Objective;
use crate::linalg::{along, axpy, dot};
use crate::oracles::FeasibleSet;

/// Frank-Wolfe with `α_k = 2/(k+2)`; a step that would leave the domain is
/// replaced by a zero step.
pub fn fw_standard<F: Objective + ?Sized, S: FeasibleSet + ?Sized>(
    obj: &F,
    set: &S,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<RunTrace> {
    check_start(obj, set, x0, config)?;
    let mut rec = Recorder::new(Method::FwStandard, config);
    let mut x = x0.to_vec();
    let mut zeros = 0;
    for k in 0.. {
        let p = probe(obj, set, &x)?;
        let r = rec.open(k, p.f, p.gap, &x);
        if let Some(status) = should_stop(k, p.gap, config) {
            return Ok(rec.finish(status, x));
        }
        let alpha = 2.0 / (k as f64 + 2.0);
        let y = along(&x, alpha, &p.v);
        if obj.in_domain(&y) && obj.value(&y).is_finite() {
            r.alpha = alpha;
            r.step_kind = Some(StepKind::Forward);
            x = y;
            zeros = 0;
        } else {
            r.step_kind = Some(StepKind::Zero);
            zeros += 1;
            if zeros >= STALL_LIMIT {
                let f = obj.value(&x);
                let gap = p.gap;
                rec.open(k + 1, f, gap, &x);
                return Ok(rec.finish(Status::Stalled, x));
            }
        }
    }
    unreachable!()
}

/// Minimizes `t ↦ f(x + t v)` over `[0, t_max]` by bisection on the
/// directional derivative. Returns the step and whether it hit `t_max`.
pub(crate) fn line_search<F: Objective + ?Sized>(
    obj: &F,
    x: &[f64],
    v: &[f64],
    t_max: f64,
    tol: f64,
) -> f64 {
    let slope = |t: f64| {
        let y = along(x, t, v);
        if obj.in_domain(&y) {
            dot(&obj.gradient(&y), v)
        } else {
            f64::INFINITY
        }
    };
    if t_max <= 0.0 {
        return 0.0;
    }
    if slope(t_max) <= 0.0 {
        return t_max;
    }
    let (mut lo, mut hi) = (0.0, t_max);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Frank-Wolfe with exact line search over the domain-feasible segment.
pub fn fw_line_search<F: Objective + ?Sized, S: FeasibleSet + ?Sized>(
    obj: &F,
    set: &S,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<RunTrace> {
    check_start(obj, set, x0, config)?;
    let mut rec = Recorder::new(Method::FwLineSearch, config);
    let mut x = x0.to_vec();
    let mut zeros = 0;
    for k in 0.. {
        let p = probe(obj, set, &x)?;
        let r = rec.open(k, p.f, p.gap, &x);
        if let Some(status) = should_stop(k, p.gap, config) {
            return Ok(rec.finish(status, x));
        }
        let t_max = crate::oracles::max_feasible_step(obj, &x, &p.v)?;
        let alpha = line_search(obj, &x, &p.v, t_max, config.line_search_tol);
        let y = along(&x, alpha, &p.v);
        // guard against the bisection landing on a slightly worse point
        if alpha > 0.0 && obj.value(&y) <= p.f {
            r.alpha = alpha;
            r.step_kind = Some(StepKind::Forward);
            axpy(alpha, &p.v, &mut x);
            zeros = 0;
        } else {
            r.step_kind = Some(StepKind::Zero);
            zeros += 1;
            if zeros >= STALL_LIMIT {
                rec.open(k + 1, p.f, p.gap, &x);
                return Ok(rec.finish(Status::Stalled, x));
            }
        }
    }
    unreachable!()
}
