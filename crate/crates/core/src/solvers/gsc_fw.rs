//! FWGSC and its two backtracking variants.

use super::{check_start, probe, probe_lipschitz, should_stop, FwProbe, Method, Recorder, RunTrace, SolverConfig, StepKind, MAX_BACKTRACKS};
use crate::error::{Error, Result};
use crate::gsc::{LocalGeometry, Objective};
use crate::linalg::{along, dot};
use crate::oracles::FeasibleSet;
use crate::stepsize::analytic_step;

/// Accepted step of one of the step rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub alpha: f64,
    /// Accepted `L̃` or `M̃` (absent for the analytic rule).
    pub estimate: Option<f64>,
    pub backtracks: usize,
    pub predicted: Option<f64>,
    /// `α M δ` when the step came from the analytic rule.
    pub dikin: Option<f64>,
}

/// Rounding allowance in sufficient-decrease tests.
fn slack(fx: f64) -> f64 {
    8.0 * f64::EPSILON * (1.0 + fx.abs())
}

/// Backtracking over a Lipschitz estimate with the quadratic model
/// `f(x) − α gap + α² L̃ β² / 2`. Trials start at `γ_d l_prev`.
pub fn step_l<F: Objective + ?Sized>(
    obj: &F,
    x: &[f64],
    fx: f64,
    v: &[f64],
    gap: f64,
    l_prev: f64,
    config: &SolverConfig,
) -> Result<StepOutcome> {
    let beta2 = dot(v, v);
    let mut l = config.gamma_d * l_prev;
    for backtracks in 0..=MAX_BACKTRACKS {
        let alpha = (gap / (l * beta2)).min(1.0);
        let y = along(x, alpha, v);
        if obj.in_domain(&y) {
            let q = fx - alpha * gap + 0.5 * alpha * alpha * l * beta2;
            if obj.value(&y) <= q + slack(fx) {
                return Ok(StepOutcome {
                    alpha,
                    estimate: Some(l),
                    backtracks,
                    predicted: Some(fx - q),
                    dikin: None,
                });
            }
        }
        l *= config.gamma_u;
    }
    Err(Error::BacktrackingFailed(MAX_BACKTRACKS))
}

/// Backtracking over the GSC constant: trial `M̃` starts at `γ_d mu_prev`,
/// the step is the analytic rule under `M̃` and acceptance uses
/// `f(x) − α gap + α² e² ω_ν(α M̃ δ)`.
pub fn step_m<F: Objective + ?Sized>(
    obj: &F,
    x: &[f64],
    fx: f64,
    v: &[f64],
    gap: f64,
    mu_prev: f64,
    config: &SolverConfig,
) -> Result<StepOutcome> {
    let spec = obj.spec();
    let geom = LocalGeometry::along(obj, x, v, gap);
    let mut m = config.gamma_d * mu_prev;
    for backtracks in 0..=MAX_BACKTRACKS {
        let trial = spec.with_m(m)?;
        let Some(dec) = analytic_step(&trial, &geom, 1.0)? else {
            return Err(Error::InvalidArgument("step_m needs a positive gap".into()));
        };
        let alpha = dec.alpha;
        let y = along(x, alpha, v);
        if obj.in_domain(&y) {
            let q = fx - alpha * gap
                + alpha * alpha * geom.e * geom.e * spec.order().omega(alpha * m * geom.delta)?;
            if obj.value(&y) <= q + slack(fx) {
                return Ok(StepOutcome {
                    alpha,
                    estimate: Some(m),
                    backtracks,
                    predicted: Some(dec.predicted_decrease),
                    dikin: Some(alpha * m * geom.delta),
                });
            }
        }
        m *= config.gamma_u;
    }
    Err(Error::BacktrackingFailed(MAX_BACKTRACKS))
}

fn gsc_loop<F, S, R>(method: Method, obj: &F, set: &S, x0: &[f64], config: &SolverConfig, mut rule: R) -> Result<RunTrace>
where
    F: Objective + ?Sized,
    S: FeasibleSet + ?Sized,
    R: FnMut(&[f64], &FwProbe) -> Result<StepOutcome>,
{
    check_start(obj, set, x0, config)?;
    let mut rec = Recorder::new(method, config);
    let mut x = x0.to_vec();
    for k in 0.. {
        let p = probe(obj, set, &x)?;
        let r = rec.open(k, p.f, p.gap, &x);
        if let Some(status) = should_stop(k, p.gap, config) {
            return Ok(rec.finish(status, x));
        }
        let out = rule(&x, &p)?;
        let y = along(&x, out.alpha, &p.v);
        if !obj.in_domain(&y) {
            return Err(Error::NotInDomain);
        }
        r.alpha = out.alpha;
        r.step_kind = Some(StepKind::Forward);
        r.backtracks = out.backtracks;
        r.estimate = out.estimate;
        r.predicted = out.predicted;
        r.dikin = out.dikin;
        x = y;
    }
    unreachable!()
}

/// FWGSC: the analytic step of the objective's own `(M_f, ν)`, capped at 1.
pub fn fwgsc<F: Objective + ?Sized, S: FeasibleSet + ?Sized>(
    obj: &F,
    set: &S,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<RunTrace> {
    let spec = obj.spec();
    gsc_loop(Method::Fwgsc, obj, set, x0, config, |x, p| {
        let geom = LocalGeometry::along(obj, x, &p.v, p.gap);
        let dec = analytic_step(&spec, &geom, 1.0)?.expect("gap is positive past the stopping test");
        Ok(StepOutcome {
            alpha: dec.alpha,
            estimate: None,
            backtracks: 0,
            predicted: Some(dec.predicted_decrease),
            dikin: Some(dec.alpha * spec.m_f() * geom.delta),
        })
    })
}

/// LBTFWGSC: FWGSC with [`step_l`] in place of the analytic step.
pub fn lbtfwgsc<F: Objective + ?Sized, S: FeasibleSet + ?Sized>(
    obj: &F,
    set: &S,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<RunTrace> {
    let mut l_prev = config.l_init;
    gsc_loop(Method::Lbtfwgsc, obj, set, x0, config, |x, p| {
        let l = *l_prev.get_or_insert_with(|| probe_lipschitz(obj, x, &p.v));
        let out = step_l(obj, x, p.f, &p.v, p.gap, l, config)?;
        l_prev = out.estimate;
        Ok(out)
    })
}

/// MBTFWGSC: FWGSC with [`step_m`] in place of the analytic step.
pub fn mbtfwgsc<F: Objective + ?Sized, S: FeasibleSet + ?Sized>(
    obj: &F,
    set: &S,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<RunTrace> {
    let mut mu = config.mu_init;
    gsc_loop(Method::Mbtfwgsc, obj, set, x0, config, |x, p| {
        let out = step_m(obj, x, p.f, &p.v, p.gap, mu, config)?;
        mu = out.estimate.expect("step_m reports its estimate");
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{BoxSet, UnitSimplex};
    use crate::solvers::testing::{monotone, LogBarrier, Quadratic};
    use crate::solvers::Status;

    fn values(tr: &RunTrace) -> Vec<f64> {
        tr.values().collect()
    }

    #[test]
    fn example_one_fwgsc_is_monotone() {
        let obj = LogBarrier(2);
        let set = UnitSimplex::new(2);
        let cfg = SolverConfig {
            epsilon: 1e-12,
            max_iter: 500,
            record_iterates: true,
            ..Default::default()
        };
        for run in [fwgsc, lbtfwgsc, mbtfwgsc] {
            let tr = run(&obj, &set, &[0.25, 0.75], &cfg).unwrap();
            assert!(monotone(&values(&tr)).unwrap());
            assert!(tr.iterates.iter().all(|x| obj.in_domain(x)));
            assert!((tr.x[0] - 0.5).abs() < 1e-5, "{:?}", tr.x);
        }
    }

    #[test]
    fn realized_decrease_matches_prediction() {
        let obj = LogBarrier(3);
        let set = UnitSimplex::new(3);
        let cfg = SolverConfig {
            epsilon: 1e-10,
            max_iter: 300,
            ..Default::default()
        };
        let tr = fwgsc(&obj, &set, &[0.8, 0.15, 0.05], &cfg).unwrap();
        for w in tr.records.windows(2) {
            let pred = w[0].predicted.unwrap();
            assert!(w[0].f - w[1].f >= pred - 1e-9 * (1.0 + w[0].f.abs()));
            assert!(w[0].dikin.unwrap() < 1.0);
        }
    }

    #[test]
    fn step_l_is_exact_on_quadratics() {
        let l_true = 3.0;
        // curvature along v is 0.625 L, below the first trial γ_d L
        let obj = Quadratic {
            curv: vec![l_true, 0.25 * l_true],
            center: vec![0.0; 2],
        };
        let x = [0.9, 0.1];
        let g = obj.gradient(&x);
        let v = [-0.9, 0.9];
        let gap = -dot(&g, &v);
        let cfg = SolverConfig::default();
        let out = step_l(&obj, &x, obj.value(&x), &v, gap, l_true, &cfg).unwrap();
        assert_eq!(out.backtracks, 0);
        assert!(out.estimate.unwrap() <= l_true);
        // a tiny initial guess is pushed up but stays within γ_u L
        let out = step_l(&obj, &x, obj.value(&x), &v, gap, l_true / 1000.0, &cfg).unwrap();
        assert!(out.estimate.unwrap() <= cfg.gamma_u * l_true);
    }

    #[test]
    fn step_m_accepts_the_true_constant() {
        let obj = LogBarrier(2);
        let x = [0.3, 0.7];
        let g = obj.gradient(&x);
        let v = [0.7, -0.7];
        let gap = -dot(&g, &v);
        let cfg = SolverConfig {
            gamma_d: 0.999_999,
            ..Default::default()
        };
        // μ_prev ≥ M_f, first trial is a valid upper model
        let out = step_m(&obj, &x, obj.value(&x), &v, gap, 2.0 / cfg.gamma_d, &cfg).unwrap();
        assert_eq!(out.backtracks, 0);
    }

    #[test]
    fn backtracking_estimates_stay_bounded_on_burg_entropy() {
        let obj = LogBarrier(1);
        let set = BoxSet::interval(0.1, 1.0);
        let cfg = SolverConfig {
            epsilon: 1e-12,
            max_iter: 200,
            l_init: Some(1.0),
            ..Default::default()
        };
        // f = −ln x on [0.1, 1] has L = 1/0.1² = 100
        let tr = lbtfwgsc(&obj, &set, &[0.1], &cfg).unwrap();
        assert!(tr.records.iter().filter_map(|r| r.estimate).all(|l| l <= 2.0 * 100.0));
        let tr = mbtfwgsc(&obj, &set, &[0.1], &cfg).unwrap();
        assert!(tr.records.iter().filter_map(|r| r.estimate).all(|m| m <= 2.0 * 2.0));
        assert_eq!(tr.status, Status::GapConverged);
    }
}
