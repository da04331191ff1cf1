#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gscfw::solvers::{Method, SolverConfig};
use gscfw_bench::config::{default_profile_grid, worker_count, ExperimentConfig, ProblemSpec};
use gscfw_bench::error::{BenchError, Result};
use gscfw_bench::profile::{profile_table, write_profile_csv};
use gscfw_bench::records::load_dir;
use gscfw_bench::runner::{build_problems, plan, run_experiment, run_single, skipped};

#[derive(Parser)]
#[command(name = "gscfw", version, about = "Frank-Wolfe benchmarks for generalized self-concordant objectives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a (problem × method × start) grid from a TOML config.
    Run {
        config: PathBuf,
        /// List the grid without running it.
        #[arg(long)]
        dry_run: bool,
        /// Override the output directory of the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute success, iteration and time profiles from a records directory.
    Profile {
        records: PathBuf,
        /// Relative-error levels, comma separated.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        /// CSV output; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one method on one preset problem and emit its record.
    Trace {
        /// portfolio, logistic, dwd, covariance, example-one or burg.
        #[arg(long)]
        problem: String,
        #[arg(long)]
        method: Method,
        /// Logistic smoothness model: 2 or 3.
        #[arg(long, default_value_t = 3)]
        nu_mode: u8,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
        /// Seed of the data and of the starting point.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, dry_run, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(out) = out {
                cfg.out_dir = out;
            }
            if dry_run {
                let problems = build_problems(&cfg)?;
                for (problem, method) in skipped(&cfg, &problems) {
                    println!("skip {problem} {method}");
                }
                let jobs = plan(&cfg, &problems);
                for j in &jobs {
                    println!("{} {} {}", j.problem, j.method, j.start);
                }
                eprintln!("{} runs", jobs.len());
                return Ok(());
            }
            let result = run_experiment(&cfg, worker_count()?)?;
            eprintln!("{} runs written to {}", result.records.len(), cfg.out_dir.display());
            Ok(())
        }
        Command::Profile { records, eps, out } => {
            let eps = if eps.is_empty() { default_profile_grid() } else { eps };
            if eps.iter().any(|e| !(*e > 0.0)) {
                return Err(BenchError::Config("epsilon levels must be positive".into()));
            }
            let runs: Vec<_> = load_dir(&records)?.iter().map(|r| r.series()).collect();
            let table = profile_table(&runs, &eps)?;
            let csv_err = |path: PathBuf| move |e: csv::Error| BenchError::io(path, std::io::Error::other(e));
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(|e| BenchError::io(&path, e))?;
                    write_profile_csv(&table, file).map_err(csv_err(path))
                }
                None => write_profile_csv(&table, std::io::stdout().lock()).map_err(csv_err("<stdout>".into())),
            }
        }
        Command::Trace {
            problem,
            method,
            nu_mode,
            epsilon,
            max_iter,
            seed,
            out,
        } => {
            let spec = ProblemSpec::preset(&problem, nu_mode, seed)?;
            let cfg = SolverConfig {
                epsilon,
                max_iter,
                seed,
                ..Default::default()
            };
            let record = run_single(&spec, method, seed, &cfg)?;
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(|e| BenchError::io(&path, e))?;
                    record.write(std::io::BufWriter::new(file))
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    record.write(&mut stdout)?;
                    stdout.flush().map_err(|e| BenchError::io("<stdout>", e))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed stdout (e.g. piped into `head`) is not an error
        Err(BenchError::Io { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
