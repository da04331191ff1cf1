//! Relative errors and the success, iteration and time profiles.
//!
//! For a problem `i`, method `j` and start `l`, `N_ijl(ε)` is the first
//! iteration whose relative error is at most `ε` and `T_ijl(ε)` the wall time
//! spent to reach it. The success ratio counts the `(i, l)` pairs solved by
//! `j`; the iteration and time ratios average `N_ijl / min_s N_isl` over the
//! starts solved by `j`, then over problems.

use std::collections::{BTreeMap, BTreeSet};

use gscfw::solvers::Method;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Floor of the relative-error denominator.
pub const DENOM_FLOOR: f64 = 1e-12;
/// Floor applied to hitting times before forming time ratios.
pub const TIME_FLOOR: f64 = 1e-9;

/// `(f − f*) / max(|f*|, 1e-12)`, with tiny negative values clamped to zero.
pub fn relative_error(f: f64, f_star: f64) -> f64 {
    let r = (f - f_star) / f_star.abs().max(DENOM_FLOOR);
    if (-DENOM_FLOOR..0.0).contains(&r) {
        0.0
    } else {
        r
    }
}

/// The values and cumulative times of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSeries {
    pub problem: String,
    pub method: Method,
    pub start: u64,
    pub values: Vec<f64>,
    pub times: Vec<f64>,
}

impl RunSeries {
    /// First iteration reaching relative error `eps`, and its time.
    pub fn first_hit(&self, f_star: f64, eps: f64) -> Option<(usize, f64)> {
        self.values
            .iter()
            .position(|&f| relative_error(f, f_star) <= eps)
            .map(|k| (k, self.times.get(k).copied().unwrap_or(0.0)))
    }
}

/// `f*_i`: the best value over all methods and starts of each problem.
pub fn f_stars(runs: &[RunSeries]) -> BTreeMap<String, f64> {
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    for r in runs {
        let best = r.values.iter().copied().fold(f64::INFINITY, f64::min);
        let e = out.entry(r.problem.clone()).or_insert(f64::INFINITY);
        *e = e.min(best);
    }
    out
}

/// One point of a method's profile curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub method: Method,
    pub epsilon: f64,
    pub rho: f64,
    pub rho_iter: Option<f64>,
    pub rho_time: Option<f64>,
}

/// `(problem, start) → method → (N, T)`.
type HitTable<'a> = BTreeMap<(&'a str, u64), BTreeMap<Method, (usize, f64)>>;

/// Hitting data of all runs at one `ε`.
struct Hits<'a> {
    solved: HitTable<'a>,
}

impl<'a> Hits<'a> {
    fn new(runs: &'a [RunSeries], eps: f64) -> Result<Self> {
        if runs.is_empty() {
            return Err(BenchError::Profile("empty record set".into()));
        }
        let stars = f_stars(runs);
        let mut solved = HitTable::new();
        for r in runs {
            if let Some(hit) = r.first_hit(stars[&r.problem], eps) {
                solved.entry((r.problem.as_str(), r.start)).or_default().insert(r.method, hit);
            }
        }
        Ok(Self { solved })
    }

    fn any(&self) -> bool {
        !self.solved.is_empty()
    }

    /// Average over problems of the mean ratio over starts solved by `method`.
    fn ratio(&self, method: Method, pick: impl Fn((usize, f64)) -> f64) -> Option<f64> {
        let mut per_problem: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for ((problem, _), by_method) in &self.solved {
            if let Some(&own) = by_method.get(&method) {
                let best = by_method.values().map(|&h| pick(h)).fold(f64::INFINITY, f64::min);
                per_problem.entry(problem).or_default().push(pick(own) / best);
            }
        }
        if per_problem.is_empty() {
            return None;
        }
        let means = per_problem.values().map(|v| v.iter().sum::<f64>() / v.len() as f64);
        Some(means.sum::<f64>() / per_problem.len() as f64)
    }
}

/// Fraction of the `(problem, start)` pairs run by `method` whose relative
/// error reaches `eps`.
pub fn success_ratio(runs: &[RunSeries], method: Method, eps: f64) -> Result<f64> {
    let hits = Hits::new(runs, eps)?;
    let pairs: BTreeSet<(&str, u64)> = runs
        .iter()
        .filter(|r| r.method == method)
        .map(|r| (r.problem.as_str(), r.start))
        .collect();
    if pairs.is_empty() {
        return Err(BenchError::Profile(format!("no runs of {method}")));
    }
    let ok = pairs
        .iter()
        .filter(|p| hits.solved.get(*p).is_some_and(|m| m.contains_key(&method)))
        .count();
    Ok(ok as f64 / pairs.len() as f64)
}

/// Average iteration ratio; `None` when `method` solves nothing at `eps`.
pub fn iteration_ratio(runs: &[RunSeries], method: Method, eps: f64) -> Result<Option<f64>> {
    let hits = Hits::new(runs, eps)?;
    if !hits.any() {
        return Err(BenchError::Profile(format!("no run reaches relative error {eps}")));
    }
    Ok(hits.ratio(method, |(n, _)| n.max(1) as f64))
}

/// Average time ratio; `None` when `method` solves nothing at `eps`.
pub fn time_ratio(runs: &[RunSeries], method: Method, eps: f64) -> Result<Option<f64>> {
    let hits = Hits::new(runs, eps)?;
    if !hits.any() {
        return Err(BenchError::Profile(format!("no run reaches relative error {eps}")));
    }
    Ok(hits.ratio(method, |(_, t)| t.max(TIME_FLOOR)))
}

/// Profile points for every method present in `runs` and every `ε`.
/// Levels no run reaches yield `rho = 0` and absent ratios.
pub fn profile_table(runs: &[RunSeries], epsilons: &[f64]) -> Result<Vec<ProfilePoint>> {
    let methods: BTreeSet<Method> = runs.iter().map(|r| r.method).collect();
    let mut eps: Vec<f64> = epsilons.to_vec();
    eps.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for method in methods {
        for &e in &eps {
            let hits = Hits::new(runs, e)?;
            out.push(ProfilePoint {
                method,
                epsilon: e,
                rho: success_ratio(runs, method, e)?,
                rho_iter: hits.ratio(method, |(n, _)| n.max(1) as f64),
                rho_time: hits.ratio(method, |(_, t)| t.max(TIME_FLOOR)),
            });
        }
    }
    Ok(out)
}

/// Writes profile points as CSV with columns
/// `method,epsilon,rho,rho_iter,rho_time`.
pub fn write_profile_csv<W: std::io::Write>(points: &[ProfilePoint], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}
