//! Grid execution.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use gscfw::problems::ProblemInstance;
use gscfw::solvers::{Method, RunTrace, SolverConfig};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ProblemSpec};
use crate::error::{BenchError, Result};
use crate::profile::{profile_table, write_profile_csv, ProfilePoint};
use crate::records::{write_summary_csv, RunRecord, SummaryRow};

/// Name of the per-run summary table in the output directory.
pub const SUMMARY_FILE: &str = "runs.csv";
/// Name of the profile table in the output directory.
pub const PROFILE_FILE: &str = "profile.csv";

/// One cell of the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub problem: String,
    pub problem_index: usize,
    pub method: Method,
    pub start: u64,
}

/// Builds every problem of `cfg` in order.
pub fn build_problems(cfg: &ExperimentConfig) -> Result<Vec<ProblemInstance>> {
    cfg.problems.iter().map(ProblemSpec::build).collect()
}

/// The grid in execution order. Methods a problem cannot run are skipped.
pub fn plan(cfg: &ExperimentConfig, problems: &[ProblemInstance]) -> Vec<Job> {
    let mut jobs = Vec::new();
    for (i, inst) in problems.iter().enumerate() {
        for &method in &cfg.methods {
            if !inst.supports(method) {
                continue;
            }
            for &start in &cfg.starts {
                jobs.push(Job {
                    problem: inst.name.clone(),
                    problem_index: i,
                    method,
                    start,
                });
            }
        }
    }
    jobs
}

/// Methods of `cfg` skipped on each problem.
pub fn skipped(cfg: &ExperimentConfig, problems: &[ProblemInstance]) -> Vec<(String, Method)> {
    problems
        .iter()
        .flat_map(|inst| {
            cfg.methods
                .iter()
                .filter(|m| !inst.supports(**m))
                .map(|&m| (inst.name.clone(), m))
        })
        .collect()
}

fn solve(inst: &ProblemInstance, method: Method, start: u64, cfg: &SolverConfig) -> Result<RunTrace> {
    let x0 = inst.start(start).map_err(|e| BenchError::Config(e.to_string()))?;
    Ok(inst.solve(method, &x0, cfg)?)
}

/// Runs one method from one start; `f_star` is the best value of the trace.
pub fn run_single(spec: &ProblemSpec, method: Method, start: u64, cfg: &SolverConfig) -> Result<RunRecord> {
    cfg.validate().map_err(|e| BenchError::Config(e.to_string()))?;
    let inst = spec.build()?;
    if !inst.supports(method) {
        return Err(BenchError::Config(format!("{method} cannot run on {}", inst.name)));
    }
    let trace = solve(&inst, method, start, cfg)?;
    Ok(RunRecord {
        problem: inst.name.clone(),
        start,
        max_iter: cfg.max_iter,
        epsilon: cfg.epsilon,
        f_star: trace.best_value(),
        trace,
    })
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub profile: Vec<ProfilePoint>,
    pub record_paths: Vec<PathBuf>,
}

/// Runs the grid on `workers` threads, then writes one record file per run,
/// `runs.csv` and `profile.csv` into `cfg.out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let problems = build_problems(cfg)?;
    let jobs = plan(cfg, &problems);
    if jobs.is_empty() {
        return Err(BenchError::Config("no method of the grid supports any problem".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| BenchError::Config(e.to_string()))?;

    let traces: Vec<RunTrace> = pool.install(|| {
        jobs.par_iter()
            .map(|j| solve(&problems[j.problem_index], j.method, j.start, &cfg.solver))
            .collect::<Result<_>>()
    })?;

    let mut f_star: BTreeMap<&str, f64> = BTreeMap::new();
    for (j, t) in jobs.iter().zip(&traces) {
        let e = f_star.entry(j.problem.as_str()).or_insert(f64::INFINITY);
        *e = e.min(t.best_value());
    }
    let records: Vec<RunRecord> = jobs
        .iter()
        .zip(traces)
        .map(|(j, trace)| RunRecord {
            problem: j.problem.clone(),
            start: j.start,
            max_iter: cfg.solver.max_iter,
            epsilon: cfg.solver.epsilon,
            f_star: f_star[j.problem.as_str()],
            trace,
        })
        .collect();

    let out = cfg.out_dir.as_path();
    std::fs::create_dir_all(out).map_err(|e| BenchError::io(out, e))?;
    let record_paths: Vec<PathBuf> =
        pool.install(|| records.par_iter().map(|r| r.write_to_dir(out)).collect::<Result<_>>())?;

    let rows: Vec<SummaryRow> = records.iter().map(SummaryRow::from).collect();
    write_csv(&out.join(SUMMARY_FILE), |w| write_summary_csv(&rows, w))?;
    let series: Vec<_> = records.iter().map(RunRecord::series).collect();
    let profile = profile_table(&series, &cfg.profile_epsilons)?;
    write_csv(&out.join(PROFILE_FILE), |w| write_profile_csv(&profile, w))?;

    Ok(ExperimentOutput {
        records,
        profile,
        record_paths,
    })
}

pub(crate) fn write_csv(path: &Path, write: impl FnOnce(BufWriter<File>) -> csv::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| BenchError::io(path, e))?;
    write(BufWriter::new(file)).map_err(|e| BenchError::io(path, std::io::Error::other(e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(out: &Path) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::from_toml(
            r#"
methods = ["fwgsc", "asfwgsc", "fw-line-search"]
starts = [0, 1]
[solver]
max_iter = 60
[[problems]]
kind = "portfolio"
p = 30
n = 6
[[problems]]
kind = "dwd"
p = 12
d = 3
"#,
        )
        .unwrap();
        cfg.out_dir = out.to_path_buf();
        cfg
    }

    #[test]
    fn plan_skips_unsupported_methods() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = grid(dir.path());
        let problems = build_problems(&cfg).unwrap();
        let jobs = plan(&cfg, &problems);
        assert_eq!(jobs.len(), 3 * 2 + 2 * 2);
        assert_eq!(skipped(&cfg, &problems), vec![("dwd-p12-d3-s0".to_string(), Method::Asfwgsc)]);
    }

    #[test]
    fn writes_records_and_tables() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = grid(dir.path());
        let out = run_experiment(&cfg, 2).unwrap();
        assert_eq!(out.records.len(), 10);
        assert_eq!(out.record_paths.len(), 10);
        assert!(dir.path().join(SUMMARY_FILE).exists());
        assert!(dir.path().join(PROFILE_FILE).exists());
        for r in &out.records {
            // f* lies below every recorded value of its problem
            assert!(r.trace.values().all(|f| r.f_star <= f + 1e-12));
        }
    }

    #[test]
    fn bad_inputs_are_config_errors() {
        let cfg = SolverConfig::default();
        let spec = ProblemSpec::BurgInterval { lo: 0.0, hi: 1.0 };
        assert!(matches!(run_single(&spec, Method::Fwgsc, 0, &cfg), Err(BenchError::Config(_))));
        let ok = run_single(&ProblemSpec::ExampleOne, Method::Fwlloo, 0, &cfg).unwrap();
        assert_eq!(ok.problem, "example-one");
        let no_lloo = ProblemSpec::BurgInterval { lo: 0.1, hi: 1.0 };
        assert!(matches!(run_single(&no_lloo, Method::Fwlloo, 0, &cfg), Err(BenchError::Config(_))));
    }
}
