//! Frank-Wolfe iterations and their shared bookkeeping.
//!
//! Every solver takes an objective, a feasible set, a starting point in
//! `set ∩ dom f` and a [`SolverConfig`], and returns a [`RunTrace`] whose
//! record `k` describes iterate `x^k` and the step taken from it.

mod away;
mod basic;
mod gsc_fw;
mod lloo;

pub use away::{asfwgsc, away_vertex, ActiveSet};
pub use basic::{fw_line_search, fw_standard};
pub use gsc_fw::{fwgsc, lbtfwgsc, mbtfwgsc, step_l, step_m, StepOutcome};
pub use lloo::{auto_sigma, fwlloo, LlooState};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gsc::Objective;
use crate::linalg::{dot, sub};
use crate::oracles::{FeasibleSet, LlooOracle};

/// Limit on consecutive zeroed steps before a run is declared stalled.
pub const STALL_LIMIT: usize = 50;

/// Limit on model-constant doublings inside one backtracking call.
pub const MAX_BACKTRACKS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Stop once the FW gap is at most this value.
    pub epsilon: f64,
    /// Maximal number of steps.
    pub max_iter: usize,
    pub gamma_u: f64,
    pub gamma_d: f64,
    /// `L₋₁`; estimated from a curvature probe when absent.
    pub l_init: Option<f64>,
    pub mu_init: f64,
    /// Strong-convexity estimate for FWLLOO; estimated at `x⁰` when absent.
    pub sigma_f: Option<f64>,
    pub line_search_tol: f64,
    pub seed: u64,
    /// Keep every iterate in the trace (memory heavy, meant for tests).
    pub record_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            max_iter: 1000,
            gamma_u: 2.0,
            gamma_d: 0.9,
            l_init: None,
            mu_init: 1.0,
            sigma_f: None,
            line_search_tol: 1e-10,
            seed: 0,
            record_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.gamma_u > 1.0 && self.gamma_d > 0.0 && self.gamma_d < 1.0) {
            return bad(format!(
                "need gamma_u > 1 > gamma_d > 0, got gamma_u = {}, gamma_d = {}",
                self.gamma_u, self.gamma_d
            ));
        }
        if let Some(l) = self.l_init {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("l_init must be positive, got {l}"));
            }
        }
        if !(self.mu_init > 0.0 && self.mu_init.is_finite()) {
            return bad(format!("mu_init must be positive, got {}", self.mu_init));
        }
        if let Some(s) = self.sigma_f {
            if !(s > 0.0) {
                return bad(format!("sigma_f must be positive, got {s}"));
            }
        }
        if !(self.line_search_tol > 0.0) {
            return bad(format!("line_search_tol must be positive, got {}", self.line_search_tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FwStandard,
    FwLineSearch,
    Fwgsc,
    Lbtfwgsc,
    Mbtfwgsc,
    Fwlloo,
    Asfwgsc,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::FwStandard,
        Method::FwLineSearch,
        Method::Fwgsc,
        Method::Lbtfwgsc,
        Method::Mbtfwgsc,
        Method::Fwlloo,
        Method::Asfwgsc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::FwStandard => "fw-standard",
            Method::FwLineSearch => "fw-line-search",
            Method::Fwgsc => "fwgsc",
            Method::Lbtfwgsc => "lbtfwgsc",
            Method::Mbtfwgsc => "mbtfwgsc",
            Method::Fwlloo => "fwlloo",
            Method::Asfwgsc => "asfwgsc",
        }
    }

    /// Methods whose traces must be monotone.
    pub fn is_monotone(self) -> bool {
        matches!(
            self,
            Method::Fwgsc | Method::Lbtfwgsc | Method::Mbtfwgsc | Method::Asfwgsc
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Forward,
    Away,
    Drop,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    GapConverged,
    IterationCap,
    Stalled,
}

/// One iteration. Step fields are absent on the final record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub k: usize,
    pub f: f64,
    /// Frank-Wolfe gap at `x^k`.
    pub gap: f64,
    /// Away-step gap `G` (ASFWGSC only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_as: Option<f64>,
    pub alpha: f64,
    pub step_kind: Option<StepKind>,
    pub backtracks: usize,
    /// `L_k` or `μ_k` for the backtracking variants.
    pub estimate: Option<f64>,
    pub elapsed: f64,
    /// Decrease certified by the step rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted: Option<f64>,
    /// `gap(x⁰)·c_k` (FWLLOO only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<f64>,
    /// `α M δ` for analytic steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dikin: Option<f64>,
    /// `‖Σ μ_u u − x‖` (ASFWGSC only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recon_err: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_size: Option<usize>,
    /// Away direction requested with a single active vertex.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub forced_forward: bool,
}

impl IterRecord {
    fn new(k: usize, f: f64, gap: f64, elapsed: f64) -> Self {
        Self {
            k,
            f,
            gap,
            g_as: None,
            alpha: 0.0,
            step_kind: None,
            backtracks: 0,
            estimate: None,
            elapsed,
            predicted: None,
            certificate: None,
            dikin: None,
            recon_err: None,
            active_size: None,
            forced_forward: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub method: Method,
    pub records: Vec<IterRecord>,
    pub status: Status,
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iterates: Vec<Vec<f64>>,
}

impl RunTrace {
    /// Number of steps taken.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn final_value(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.f)
    }

    pub fn best_value(&self) -> f64 {
        self.records.iter().map(|r| r.f).fold(f64::INFINITY, f64::min)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.f)
    }
}

/// Wall clock that degrades to zero where no monotonic clock exists.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Clock {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Clock {
    pub(crate) fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    pub(crate) fn elapsed(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.start.elapsed().as_secs_f64()
        }
        #[cfg(target_arch = "wasm32")]
        {
            0.0
        }
    }
}

/// Everything a solver computes at the top of an iteration.
pub(crate) struct FwProbe {
    pub f: f64,
    pub grad: Vec<f64>,
    pub v: Vec<f64>,
    pub gap: f64,
}

pub(crate) fn probe<F: Objective + ?Sized, S: FeasibleSet + ?Sized>(
    obj: &F,
    set: &S,
    x: &[f64],
) -> Result<FwProbe> {
    let grad = obj.gradient(x);
    let s = set.lmo(&grad);
    let gap = crate::oracles::gap(&grad, x, &s.point)?;
    let v = sub(&s.point, x);
    Ok(FwProbe {
        f: obj.value(x),
        grad,
        v,
        gap,
    })
}

pub(crate) fn check_start<F: Objective + ?Sized, S: FeasibleSet + ?Sized>(
    obj: &F,
    set: &S,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<()> {
    config.validate()?;
    if obj.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            found: set.dim(),
        });
    }
    if x0.len() != obj.dim() {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            found: x0.len(),
        });
    }
    if !set.contains(x0) {
        return Err(Error::InfeasibleStart("start is outside the feasible set".into()));
    }
    if !obj.in_domain(x0) {
        return Err(Error::InfeasibleStart("start is outside the objective domain".into()));
    }
    Ok(())
}

/// Shared loop state: records, optional iterates and the clock.
pub(crate) struct Recorder {
    pub method: Method,
    pub records: Vec<IterRecord>,
    pub iterates: Vec<Vec<f64>>,
    keep: bool,
    clock: Clock,
}

impl Recorder {
    pub(crate) fn new(method: Method, config: &SolverConfig) -> Self {
        Self {
            method,
            records: Vec::new(),
            iterates: Vec::new(),
            keep: config.record_iterates,
            clock: Clock::start(),
        }
    }

    /// Opens the record for iterate `k`.
    pub(crate) fn open(&mut self, k: usize, f: f64, gap: f64, x: &[f64]) -> &mut IterRecord {
        let elapsed = self.clock.elapsed();
        self.records.push(IterRecord::new(k, f, gap, elapsed));
        if self.keep {
            self.iterates.push(x.to_vec());
        }
        self.records.last_mut().expect("just pushed")
    }

    pub(crate) fn finish(self, status: Status, x: Vec<f64>) -> RunTrace {
        RunTrace {
            method: self.method,
            records: self.records,
            status,
            x,
            iterates: self.iterates,
        }
    }
}

/// Stopping rule evaluated on the freshly opened record `k`.
pub(crate) fn should_stop(k: usize, gap: f64, config: &SolverConfig) -> Option<Status> {
    if gap <= config.epsilon {
        Some(Status::GapConverged)
    } else if k >= config.max_iter {
        Some(Status::IterationCap)
    } else {
        None
    }
}

/// `L₋₁` from one finite-difference curvature probe along `v`.
pub fn probe_lipschitz<F: Objective + ?Sized>(obj: &F, x: &[f64], v: &[f64]) -> f64 {
    let beta2 = dot(v, v);
    if beta2 == 0.0 {
        return 1.0;
    }
    let h = 1e-4 * obj.max_step(x, v);
    if h > 0.0 {
        let y = crate::linalg::along(x, h, v);
        let dg = sub(&obj.gradient(&y), &obj.gradient(x));
        let l = dot(&dg, v) / (h * beta2);
        if l.is_finite() && l > 0.0 {
            return l;
        }
    }
    let e2 = obj.local_norm_sq(x, v);
    if e2 > 0.0 && e2.is_finite() {
        e2 / beta2
    } else {
        1.0
    }
}

/// Dispatches to the solver for `method`. `lloo` is required by FWLLOO only.
pub fn run<F: Objective + ?Sized, S: FeasibleSet + ?Sized>(
    method: Method,
    obj: &F,
    set: &S,
    lloo: Option<&dyn LlooOracle>,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<RunTrace> {
    match method {
        Method::FwStandard => fw_standard(obj, set, x0, config),
        Method::FwLineSearch => fw_line_search(obj, set, x0, config),
        Method::Fwgsc => fwgsc(obj, set, x0, config),
        Method::Lbtfwgsc => lbtfwgsc(obj, set, x0, config),
        Method::Mbtfwgsc => mbtfwgsc(obj, set, x0, config),
        Method::Fwlloo => match lloo {
            Some(l) => fwlloo(obj, set, l, x0, config),
            None => Err(Error::Unsupported(
                "fwlloo needs a local linear oracle for this set".into(),
            )),
        },
        Method::Asfwgsc => asfwgsc(obj, set, x0, config),
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use crate::error::Result;
    use crate::gsc::{GscSpec, Objective};

    /// `½ Σ c_i (x_i − a_i)²`, class `F_{0,3}`.
    pub struct Quadratic {
        pub curv: Vec<f64>,
        pub center: Vec<f64>,
    }

    impl Objective for Quadratic {
        fn dim(&self) -> usize {
            self.curv.len()
        }
        fn spec(&self) -> GscSpec {
            GscSpec::new(0.0, 3.0).unwrap()
        }
        fn in_domain(&self, x: &[f64]) -> bool {
            x.iter().all(|v| v.is_finite())
        }
        fn value(&self, x: &[f64]) -> f64 {
            x.iter()
                .zip(&self.curv)
                .zip(&self.center)
                .map(|((x, c), a)| 0.5 * c * (x - a) * (x - a))
                .sum()
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            x.iter()
                .zip(&self.curv)
                .zip(&self.center)
                .map(|((x, c), a)| c * (x - a))
                .collect()
        }
        fn hess_vec(&self, _x: &[f64], v: &[f64]) -> Vec<f64> {
            v.iter().zip(&self.curv).map(|(v, c)| c * v).collect()
        }
    }

    /// `−Σ ln x_i`, class `F_{2,3}`.
    pub struct LogBarrier(pub usize);

    impl Objective for LogBarrier {
        fn dim(&self) -> usize {
            self.0
        }
        fn spec(&self) -> GscSpec {
            GscSpec::new(2.0, 3.0).unwrap()
        }
        fn in_domain(&self, x: &[f64]) -> bool {
            x.iter().all(|&v| v > 0.0)
        }
        fn value(&self, x: &[f64]) -> f64 {
            if self.in_domain(x) {
                -x.iter().map(|v| v.ln()).sum::<f64>()
            } else {
                f64::INFINITY
            }
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            x.iter().map(|v| -1.0 / v).collect()
        }
        fn hess_vec(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
            x.iter().zip(v).map(|(x, v)| v / (x * x)).collect()
        }
    }

    pub fn monotone(values: &[f64]) -> Result<bool> {
        Ok(values
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let c = SolverConfig {
            gamma_u: 1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = SolverConfig {
            sigma_f: Some(0.0),
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
        assert!("fw".parse::<Method>().is_err());
    }
}
