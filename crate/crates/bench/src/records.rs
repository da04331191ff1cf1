//! Run record files.
//!
//! A record file is line-delimited JSON. The first line describes the run:
//!
//! ```text
//! {"type":"run","problem":"portfolio-p200-n100-s0","method":"fwgsc","start":0,
//!  "status":"gap-converged","f_star":-0.0123,"iterations":412,"max_iter":50000,"epsilon":1e-6}
//! ```
//!
//! and every following line is one iteration:
//!
//! ```text
//! {"type":"iter","k":0,"f":0.31,"gap":1.2,"alpha":0.4,"step_kind":"forward",
//!  "backtracks":0,"estimate":null,"elapsed":1.3e-5,"rel_err":26.2,...}
//! ```
//!
//! Iteration lines carry every [`IterRecord`] field plus `rel_err`. Only
//! `elapsed` depends on the machine.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use gscfw::solvers::{IterRecord, Method, RunTrace, Status};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::profile::{relative_error, RunSeries};

/// Extension of record files.
pub const RECORD_EXT: &str = "jsonl";

/// One finished run with the reference value of its problem.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub start: u64,
    pub max_iter: usize,
    pub epsilon: f64,
    pub trace: RunTrace,
    pub f_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunHeader {
    pub problem: String,
    pub method: Method,
    pub start: u64,
    pub status: Status,
    pub f_star: f64,
    pub iterations: usize,
    pub max_iter: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterLine {
    #[serde(flatten)]
    pub record: IterRecord,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
enum Line {
    Run(RunHeader),
    Iter(IterLine),
}

impl RunRecord {
    pub fn method(&self) -> Method {
        self.trace.method
    }

    pub fn header(&self) -> RunHeader {
        RunHeader {
            problem: self.problem.clone(),
            method: self.trace.method,
            start: self.start,
            status: self.trace.status,
            f_star: self.f_star,
            iterations: self.trace.iterations(),
            max_iter: self.max_iter,
            epsilon: self.epsilon,
        }
    }

    /// `problem__method__s<start>.jsonl`.
    pub fn file_name(&self) -> String {
        record_file_name(&self.problem, self.trace.method, self.start)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        let to_io = |e: serde_json::Error| BenchError::io("<record>", e.into());
        serde_json::to_writer(&mut out, &Line::Run(self.header())).map_err(to_io)?;
        writeln!(out).map_err(|e| BenchError::io("<record>", e))?;
        for r in &self.trace.records {
            let line = Line::Iter(IterLine {
                record: r.clone(),
                rel_err: relative_error(r.f, self.f_star),
            });
            serde_json::to_writer(&mut out, &line).map_err(to_io)?;
            writeln!(out).map_err(|e| BenchError::io("<record>", e))?;
        }
        out.flush().map_err(|e| BenchError::io("<record>", e))
    }

    pub fn write_to_dir(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(self.file_name());
        let file = File::create(&path).map_err(|e| BenchError::io(&path, e))?;
        self.write(BufWriter::new(file)).map_err(|e| match e {
            BenchError::Io { source, .. } => BenchError::io(&path, source),
            other => other,
        })?;
        Ok(path)
    }

    pub fn series(&self) -> RunSeries {
        RunSeries {
            problem: self.problem.clone(),
            method: self.trace.method,
            start: self.start,
            values: self.trace.values().collect(),
            times: self.trace.records.iter().map(|r| r.elapsed).collect(),
        }
    }
}

pub fn record_file_name(problem: &str, method: Method, start: u64) -> String {
    format!("{problem}__{method}__s{start}.{RECORD_EXT}")
}

/// A record file read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedRun {
    pub header: RunHeader,
    pub records: Vec<IterLine>,
}

impl LoadedRun {
    pub fn read<R: BufRead>(input: R, path: &Path) -> Result<Self> {
        let bad = |line: usize, msg: String| BenchError::Record {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut header = None;
        let mut records = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| BenchError::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<Line>(&line).map_err(|e| bad(i + 1, e.to_string()))? {
                Line::Run(h) if header.is_none() && records.is_empty() => header = Some(h),
                Line::Run(_) => return Err(bad(i + 1, "run header must be the first line".into())),
                Line::Iter(_) if header.is_none() => return Err(bad(i + 1, "missing run header".into())),
                Line::Iter(r) => records.push(r),
            }
        }
        let header = header.ok_or_else(|| bad(0, "empty record file".into()))?;
        if records.len() != header.iterations + 1 {
            return Err(bad(
                0,
                format!("header announces {} iterations, found {}", header.iterations, records.len().saturating_sub(1)),
            ));
        }
        Ok(Self { header, records })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| BenchError::io(path, e))?;
        Self::read(BufReader::new(file), path)
    }

    pub fn series(&self) -> RunSeries {
        RunSeries {
            problem: self.header.problem.clone(),
            method: self.header.method,
            start: self.header.start,
            values: self.records.iter().map(|r| r.record.f).collect(),
            times: self.records.iter().map(|r| r.record.elapsed).collect(),
        }
    }
}

/// Every record file in `dir`, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<LoadedRun>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| BenchError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == RECORD_EXT))
        .collect();
    paths.sort();
    paths.iter().map(|p| LoadedRun::load(p)).collect()
}

/// One row of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub problem: String,
    pub method: Method,
    pub start: u64,
    pub status: Status,
    pub iterations: usize,
    pub final_f: f64,
    pub best_f: f64,
    pub f_star: f64,
    pub final_rel_err: f64,
    pub final_gap: f64,
    pub elapsed: f64,
}

impl From<&RunRecord> for SummaryRow {
    fn from(r: &RunRecord) -> Self {
        let last = r.trace.records.last();
        Self {
            problem: r.problem.clone(),
            method: r.trace.method,
            start: r.start,
            status: r.trace.status,
            iterations: r.trace.iterations(),
            final_f: r.trace.final_value(),
            best_f: r.trace.best_value(),
            f_star: r.f_star,
            final_rel_err: relative_error(r.trace.final_value(), r.f_star),
            final_gap: last.map_or(f64::NAN, |l| l.gap),
            elapsed: last.map_or(0.0, |l| l.elapsed),
        }
    }
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
