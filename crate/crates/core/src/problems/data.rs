//! Sparse labelled datasets: LIBSVM text format and a synthetic generator.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows of `(index, value)` pairs with strictly increasing 0-based indices
/// and labels in `{−1, +1}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseDataset {
    pub rows: Vec<Vec<(usize, f64)>>,
    pub labels: Vec<f64>,
    pub dim: usize,
}

impl SparseDataset {
    pub fn new(rows: Vec<Vec<(usize, f64)>>, labels: Vec<f64>, dim: usize) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                found: labels.len(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(Error::InvalidArgument(format!("row {i}: indices must increase")));
            }
            if row.last().is_some_and(|&(j, _)| j >= dim) {
                return Err(Error::InvalidArgument(format!("row {i}: index outside dimension {dim}")));
            }
        }
        if let Some(y) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidArgument(format!("label {y} is not ±1")));
        }
        Ok(Self { rows, labels, dim })
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    /// Divides every nonzero row by its euclidean norm.
    pub fn normalize_rows(&mut self) {
        for row in &mut self.rows {
            let n = row.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
            if n > 0.0 {
                row.iter_mut().for_each(|(_, v)| *v /= n);
            }
        }
    }

    /// `⟨a_i, x⟩`
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        self.rows[i].iter().map(|&(j, v)| v * x[j]).sum()
    }

    /// `out += alpha a_i`
    pub fn add_row(&self, i: usize, alpha: f64, out: &mut [f64]) {
        for &(j, v) in &self.rows[i] {
            out[j] += alpha * v;
        }
    }
}

/// Parses LIBSVM text: `label idx:value ...` per line with 1-based ascending
/// indices. Blank lines are skipped.
pub fn libsvm_parse(text: &str, normalize: bool) -> Result<SparseDataset> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut dim = 0;
    for (ln, line) in text.lines().enumerate() {
        let line = line.replace('\u{2212}', "-");
        let mut tokens = line.split_whitespace();
        let Some(label) = tokens.next() else { continue };
        let err = |msg: String| Error::Parse { line: ln + 1, msg };
        let y: f64 = label.parse().map_err(|_| err(format!("bad label `{label}`")))?;
        if y != 1.0 && y != -1.0 {
            return Err(err(format!("label `{label}` is not ±1")));
        }
        let mut row: Vec<(usize, f64)> = Vec::new();
        for tok in tokens {
            let (i, v) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("malformed pair `{tok}`")))?;
            let i: usize = i.parse().map_err(|_| err(format!("bad index in `{tok}`")))?;
            let v: f64 = v.parse().map_err(|_| err(format!("bad value in `{tok}`")))?;
            if i == 0 {
                return Err(err("indices are 1-based".into()));
            }
            if row.last().is_some_and(|&(prev, _)| prev >= i - 1) {
                return Err(err(format!("index {i} is not ascending")));
            }
            dim = dim.max(i);
            row.push((i - 1, v));
        }
        rows.push(row);
        labels.push(y);
    }
    let mut data = SparseDataset { rows, labels, dim };
    if normalize {
        data.normalize_rows();
    }
    Ok(data)
}

/// Inverse of [`libsvm_parse`] (without normalization).
pub fn libsvm_serialize(data: &SparseDataset) -> String {
    let mut out = String::new();
    for (row, y) in data.rows.iter().zip(&data.labels) {
        out.push_str(if *y > 0.0 { "+1" } else { "-1" });
        for (i, v) in row {
            let _ = write!(out, " {}:{}", i + 1, v);
        }
        out.push('\n');
    }
    out
}

/// Synthetic classification data: each feature is present with probability
/// `density` (at least one per row), values are gaussian, rows are
/// normalized, and labels follow a random hyperplane with 10% label noise.
pub fn synthetic_classification(p: usize, n: usize, density: f64, seed: u64) -> SparseDataset {
    assert!(n > 0 && density > 0.0 && density <= 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mut rows = Vec::with_capacity(p);
    let mut labels = Vec::with_capacity(p);
    for _ in 0..p {
        let mut row: Vec<(usize, f64)> = Vec::new();
        for j in 0..n {
            if rng.random::<f64>() < density {
                row.push((j, rng.sample(StandardNormal)));
            }
        }
        if row.is_empty() {
            let j = rng.random_range(0..n);
            row.push((j, rng.sample(StandardNormal)));
        }
        let score: f64 = row.iter().map(|&(j, v)| v * w[j]).sum();
        let flip = rng.random::<f64>() < 0.1;
        let y = if (score >= 0.0) != flip { 1.0 } else { -1.0 };
        rows.push(row);
        labels.push(y);
    }
    let mut data = SparseDataset { rows, labels, dim: n };
    data.normalize_rows();
    data
}
