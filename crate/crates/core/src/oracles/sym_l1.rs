use super::{sign, FeasibleSet, Vertex, CONTAINS_TOL};
use crate::error::{Error, Result};
use crate::linalg::norm1;

/// Oracle over symmetric `p × p` matrices (row-major, flattened) with
/// entrywise ℓ1 norm at most `radius`.
pub fn sym_l1_lmo(g: &[f64], p: usize, radius: f64) -> Result<Vertex> {
    if g.len() != p * p {
        return Err(Error::DimensionMismatch {
            expected: p * p,
            found: g.len(),
        });
    }
    let mut worst = 0.0f64;
    let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let (mut bi, mut bj) = (0, 0);
    for i in 0..p {
        for j in i..p {
            let d = (g[i * p + j] - g[j * p + i]).abs();
            worst = worst.max(d);
            if g[i * p + j].abs() > g[bi * p + bj].abs() {
                (bi, bj) = (i, j);
            }
        }
    }
    if worst > 1e-10 * scale {
        return Err(Error::Asymmetric(worst));
    }
    let s = -sign(g[bi * p + bj]);
    Ok(vertex(p, radius, bi, bj, s))
}

fn vertex(p: usize, radius: f64, i: usize, j: usize, s: f64) -> Vertex {
    let mut m = vec![0.0; p * p];
    if i == j {
        m[i * p + i] = s * radius;
    } else {
        m[i * p + j] = 0.5 * s * radius;
        m[j * p + i] = 0.5 * s * radius;
    }
    Vertex {
        id: Some(2 * (i * p + j) as u64 + u64::from(s < 0.0)),
        point: m,
    }
}

/// The symmetric ℓ1 ball as a [`FeasibleSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymL1Ball {
    p: usize,
    radius: f64,
}

impl SymL1Ball {
    pub fn new(p: usize, radius: f64) -> Self {
        assert!(p > 0 && radius > 0.0);
        Self { p, radius }
    }

    pub fn side(&self) -> usize {
        self.p
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl FeasibleSet for SymL1Ball {
    fn dim(&self) -> usize {
        self.p * self.p
    }

    /// Symmetrizes `c` first, so the output minimizes over the set for any `c`.
    fn lmo(&self, c: &[f64]) -> Vertex {
        let p = self.p;
        let mut g = c.to_vec();
        for i in 0..p {
            for j in i + 1..p {
                let m = 0.5 * (c[i * p + j] + c[j * p + i]);
                g[i * p + j] = m;
                g[j * p + i] = m;
            }
        }
        sym_l1_lmo(&g, p, self.radius).expect("symmetrized input")
    }

    fn contains(&self, x: &[f64]) -> bool {
        let p = self.p;
        x.len() == p * p
            && norm1(x) <= self.radius * (1.0 + CONTAINS_TOL)
            && (0..p).all(|i| {
                (i + 1..p).all(|j| (x[i * p + j] - x[j * p + i]).abs() <= CONTAINS_TOL * self.radius)
            })
    }

    fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    fn is_polytope(&self) -> bool {
        true
    }

    fn vertex_decomposition(&self, x: &[f64]) -> Option<Vec<(Vertex, f64)>> {
        if !self.contains(x) {
            return None;
        }
        let (p, r) = (self.p, self.radius);
        let mut out = Vec::new();
        for i in 0..p {
            for j in i..p {
                let v = x[i * p + j];
                if v == 0.0 {
                    continue;
                }
                let w = if i == j { v.abs() / r } else { 2.0 * v.abs() / r };
                out.push((vertex(p, r, i, j, sign(v)), w));
            }
        }
        let slack = 1.0 - out.iter().map(|(_, w)| w).sum::<f64>();
        if slack > 0.0 {
            for s in [1.0, -1.0] {
                let v = vertex(p, r, 0, 0, s);
                match out.iter_mut().find(|(u, _)| u.id == v.id) {
                    Some((_, w)) => *w += 0.5 * slack,
                    None => out.push((v, 0.5 * slack)),
                }
            }
        }
        Some(out)
    }
}
