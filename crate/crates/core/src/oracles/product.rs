use super::{sign, FeasibleSet, Vertex, CONTAINS_TOL};
use crate::error::{Error, Result};
use crate::linalg::norm2;

/// One factor of a [`ProductSet`].
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    /// `{w : ‖w‖₂ ≤ radius}`
    EuclidBall { dim: usize, radius: f64 },
    /// `[-half_width, half_width]`
    Interval { half_width: f64 },
    /// `{ξ ≥ 0 : ‖ξ‖₂ ≤ radius}`
    NonnegBall { dim: usize, radius: f64 },
}

impl Block {
    pub fn dim(&self) -> usize {
        match *self {
            Block::EuclidBall { dim, .. } | Block::NonnegBall { dim, .. } => dim,
            Block::Interval { .. } => 1,
        }
    }

    pub fn lmo(&self, c: &[f64]) -> Vec<f64> {
        match *self {
            Block::EuclidBall { dim, radius } => {
                let n = norm2(c);
                if n == 0.0 {
                    let mut e = vec![0.0; dim];
                    e[0] = radius;
                    e
                } else {
                    c.iter().map(|v| -radius * v / n).collect()
                }
            }
            Block::Interval { half_width } => vec![-half_width * sign(c[0])],
            Block::NonnegBall { radius, .. } => {
                let m: Vec<f64> = c.iter().map(|v| (-v).max(0.0)).collect();
                let n = norm2(&m);
                if n == 0.0 {
                    m
                } else {
                    m.iter().map(|v| radius * v / n).collect()
                }
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            Block::EuclidBall { radius, .. } => norm2(x) <= radius * (1.0 + CONTAINS_TOL),
            Block::Interval { half_width } => x[0].abs() <= half_width * (1.0 + CONTAINS_TOL),
            Block::NonnegBall { radius, .. } => {
                x.iter().all(|&v| v >= -CONTAINS_TOL) && norm2(x) <= radius * (1.0 + CONTAINS_TOL)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            Block::EuclidBall { radius, .. } => 2.0 * radius,
            Block::Interval { half_width } => 2.0 * half_width,
            Block::NonnegBall { dim, radius } if dim > 1 => std::f64::consts::SQRT_2 * radius,
            Block::NonnegBall { radius, .. } => radius,
        }
    }
}

/// Cartesian product of blocks, laid out consecutively.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSet {
    blocks: Vec<Block>,
    dim: usize,
}

impl ProductSet {
    pub fn new(blocks: Vec<Block>) -> Self {
        assert!(!blocks.is_empty());
        let dim = blocks.iter().map(Block::dim).sum();
        Self { blocks, dim }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Concatenated per-block oracle outputs.
    pub fn product_lmo(&self, c: &[f64]) -> Result<Vec<f64>> {
        if c.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: c.len(),
            });
        }
        let mut out = Vec::with_capacity(self.dim);
        let mut at = 0;
        for b in &self.blocks {
            out.extend(b.lmo(&c[at..at + b.dim()]));
            at += b.dim();
        }
        Ok(out)
    }
}

impl FeasibleSet for ProductSet {
    fn dim(&self) -> usize {
        self.dim
    }

    fn lmo(&self, c: &[f64]) -> Vertex {
        Vertex {
            id: None,
            point: self.product_lmo(c).expect("direction has the set's dimension"),
        }
    }

    fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        let mut at = 0;
        self.blocks.iter().all(|b| {
            let ok = b.contains(&x[at..at + b.dim()]);
            at += b.dim();
            ok
        })
    }

    fn diameter(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.diameter().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}
