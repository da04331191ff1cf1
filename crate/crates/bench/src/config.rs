//! Experiment configuration (TOML) and problem presets.

use std::path::{Path, PathBuf};

use gscfw::problems::{
    covariance_generator, covariance_problem, dwd_problem, libsvm_parse, logistic_problem, portfolio_generator,
    portfolio_problem, synthetic_classification, toys, DwdParams, ProblemInstance,
};
use gscfw::solvers::{Method, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Environment variable holding the worker count of the grid runner.
pub const WORKERS_ENV: &str = "GSCFW_WORKERS";

/// One benchmark problem of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    Portfolio {
        p: usize,
        n: usize,
        #[serde(default)]
        seed: u64,
    },
    Logistic {
        /// Samples and features of the synthetic data set.
        #[serde(default = "default_logistic_p")]
        p: usize,
        #[serde(default = "default_logistic_n")]
        n: usize,
        #[serde(default = "default_density")]
        density: f64,
        #[serde(default)]
        seed: u64,
        /// LIBSVM file used instead of synthetic data.
        #[serde(default)]
        libsvm: Option<PathBuf>,
        /// Defaults to `1/p`.
        #[serde(default)]
        gamma: Option<f64>,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "default_nu_mode")]
        nu_mode: u8,
    },
    Dwd {
        p: usize,
        d: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_q")]
        q: f64,
        #[serde(default = "default_u")]
        u: f64,
        #[serde(default = "default_radius")]
        big_r: f64,
    },
    Covariance {
        p: usize,
        #[serde(default)]
        seed: u64,
    },
    ExampleOne,
    BurgInterval {
        lo: f64,
        hi: f64,
    },
}

fn default_logistic_p() -> usize {
    500
}
fn default_logistic_n() -> usize {
    50
}
fn default_density() -> f64 {
    0.2
}
fn default_radius() -> f64 {
    10.0
}
fn default_nu_mode() -> u8 {
    3
}
fn default_q() -> f64 {
    2.0
}
fn default_u() -> f64 {
    5.0
}

impl ProblemSpec {
    /// Stable identifier used in record file names.
    pub fn id(&self) -> String {
        match self {
            ProblemSpec::Portfolio { p, n, seed } => format!("portfolio-p{p}-n{n}-s{seed}"),
            ProblemSpec::Logistic {
                p,
                n,
                seed,
                libsvm,
                nu_mode,
                ..
            } => match libsvm {
                Some(path) => format!(
                    "logistic-{}-nu{nu_mode}",
                    path.file_stem().map_or("data".into(), |s| s.to_string_lossy())
                ),
                None => format!("logistic-p{p}-n{n}-s{seed}-nu{nu_mode}"),
            },
            ProblemSpec::Dwd { p, d, seed, .. } => format!("dwd-p{p}-d{d}-s{seed}"),
            ProblemSpec::Covariance { p, seed } => format!("covariance-p{p}-s{seed}"),
            ProblemSpec::ExampleOne => "example-one".into(),
            ProblemSpec::BurgInterval { lo, hi } => format!("burg-{lo}-{hi}"),
        }
    }

    pub fn build(&self) -> Result<ProblemInstance> {
        let inst = match *self {
            ProblemSpec::Portfolio { p, n, seed } => portfolio_problem(portfolio_generator(p, n, seed), p, n),
            ProblemSpec::Logistic {
                p,
                n,
                density,
                seed,
                ref libsvm,
                gamma,
                radius,
                nu_mode,
            } => {
                let data = match libsvm {
                    Some(path) => {
                        let text = std::fs::read_to_string(path)
                            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
                        libsvm_parse(&text, true)
                            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?
                    }
                    None => synthetic_classification(p, n, density, seed),
                };
                let gamma = gamma.unwrap_or(1.0 / data.len().max(1) as f64);
                logistic_problem(data, gamma, radius, nu_mode)
            }
            ProblemSpec::Dwd { p, d, seed, q, u, big_r } => dwd_problem(
                synthetic_classification(p, d, 1.0, seed),
                &DwdParams { q, c: None, u, big_r },
            ),
            ProblemSpec::Covariance { p, seed } => covariance_problem(covariance_generator(p, seed), p),
            ProblemSpec::ExampleOne => Ok(toys::example_one()),
            ProblemSpec::BurgInterval { lo, hi } => toys::burg_interval(lo, hi),
        }
        .map_err(|e| BenchError::Config(format!("problem {}: {e}", self.id())))?;
        Ok(ProblemInstance { name: self.id(), ..inst })
    }

    /// Desk-scale preset used by `gscfw trace --problem <name>`.
    pub fn preset(name: &str, nu_mode: u8, seed: u64) -> Result<Self> {
        Ok(match name {
            "portfolio" => ProblemSpec::Portfolio { p: 200, n: 100, seed },
            "logistic" => ProblemSpec::Logistic {
                p: 500,
                n: 50,
                density: default_density(),
                seed,
                libsvm: None,
                gamma: None,
                radius: default_radius(),
                nu_mode,
            },
            "dwd" => ProblemSpec::Dwd {
                p: 200,
                d: 30,
                seed,
                q: 2.0,
                u: 5.0,
                big_r: 10.0,
            },
            "covariance" => ProblemSpec::Covariance { p: 30, seed },
            "example-one" => ProblemSpec::ExampleOne,
            "burg" => ProblemSpec::BurgInterval { lo: 0.1, hi: 1.0 },
            other => {
                return Err(BenchError::Config(format!(
                    "unknown problem `{other}` (expected portfolio, logistic, dwd, covariance, example-one or burg)"
                )))
            }
        })
    }
}

/// A `(problem × method × start)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub solver: SolverConfig,
    pub methods: Vec<Method>,
    /// Seeds of the random starting points.
    pub starts: Vec<u64>,
    pub problems: Vec<ProblemSpec>,
    /// Relative-error levels of the summary profile.
    #[serde(default = "default_profile_grid")]
    pub profile_epsilons: Vec<f64>,
    /// Output directory; relative paths resolve against the config file.
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
}

pub fn default_profile_grid() -> Vec<f64> {
    (1..=8).map(|k| 10f64.powi(-k)).collect()
}

fn default_out() -> PathBuf {
    PathBuf::from("records")
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if cfg.out_dir.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.out_dir = dir.join(&cfg.out_dir);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate().map_err(|e| BenchError::Config(e.to_string()))?;
        if self.methods.is_empty() || self.starts.is_empty() || self.problems.is_empty() {
            return Err(BenchError::Config("methods, starts and problems must be non-empty".into()));
        }
        if self.profile_epsilons.iter().any(|e| !(*e > 0.0)) {
            return Err(BenchError::Config("profile epsilons must be positive".into()));
        }
        let mut ids: Vec<String> = self.problems.iter().map(ProblemSpec::id).collect();
        ids.sort();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(BenchError::Config("problem ids must be distinct".into()));
        }
        Ok(())
    }
}

/// Worker count from [`WORKERS_ENV`], defaulting to the available parallelism.
pub fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(BenchError::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
methods = ["fwgsc", "asfwgsc", "fw-line-search"]
starts = [0, 1]
profile_epsilons = [1e-2, 1e-4]

[solver]
epsilon = 1e-8
max_iter = 200

[[problems]]
kind = "portfolio"
p = 20
n = 5
seed = 3

[[problems]]
kind = "covariance"
p = 4
"#;

    #[test]
    fn parses_a_grid() {
        let cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(cfg.methods.len(), 3);
        assert_eq!(cfg.solver.max_iter, 200);
        assert_eq!(cfg.solver.gamma_u, 2.0);
        assert_eq!(cfg.problems[1], ProblemSpec::Covariance { p: 4, seed: 0 });
        assert_eq!(cfg.problems[0].id(), "portfolio-p20-n5-s3");
        let inst = cfg.problems[0].build().unwrap();
        assert_eq!(inst.name, "portfolio-p20-n5-s3");
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(
            ExperimentConfig::from_toml("methods = []\nstarts=[0]\nproblems=[]"),
            Err(BenchError::Config(_))
        ));
        let bad_field = SAMPLE.replace("max_iter = 200", "max_iters = 200");
        assert!(ExperimentConfig::from_toml(&bad_field).is_err());
        let bad_method = SAMPLE.replace("\"fwgsc\"", "\"fw-magic\"");
        assert!(ExperimentConfig::from_toml(&bad_method).is_err());
        let bad_eps = SAMPLE.replace("epsilon = 1e-8", "epsilon = -1.0");
        assert!(ExperimentConfig::from_toml(&bad_eps).is_err());
        let dup = format!("{SAMPLE}\n[[problems]]\nkind = \"covariance\"\np = 4\n");
        assert!(ExperimentConfig::from_toml(&dup).is_err());
    }

    #[test]
    fn presets() {
        for name in ["portfolio", "logistic", "dwd", "covariance", "example-one", "burg"] {
            let spec = ProblemSpec::preset(name, 2, 1).unwrap();
            spec.build().unwrap();
        }
        assert!(ProblemSpec::preset("nope", 2, 0).is_err());
    }
}
