use super::{argmax_abs_lowest, argmin_lowest, sign, FeasibleSet, Vertex, CONTAINS_TOL};
use crate::linalg::{norm1, unit};

/// `e_i` with `i = argmin c_i`, lowest index on ties.
pub fn simplex_lmo(c: &[f64]) -> Vertex {
    let i = argmin_lowest(c);
    Vertex {
        id: Some(i as u64),
        point: unit(c.len(), i, 1.0),
    }
}

/// `-R sign(c_i) e_i` with `i = argmax |c_i|`, lowest index on ties and
/// `sign(0) = +1`.
pub fn l1ball_lmo(c: &[f64], radius: f64) -> Vertex {
    let i = argmax_abs_lowest(c);
    let s = -sign(c[i]);
    Vertex {
        id: Some(l1_id(i, s)),
        point: unit(c.len(), i, s * radius),
    }
}

fn l1_id(i: usize, s: f64) -> u64 {
    2 * i as u64 + u64::from(s < 0.0)
}

/// The unit simplex `{x ≥ 0, Σ x_i = 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitSimplex {
    n: usize,
}

impl UnitSimplex {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "simplex dimension must be positive");
        Self { n }
    }
}

impl FeasibleSet for UnitSimplex {
    fn dim(&self) -> usize {
        self.n
    }

    fn lmo(&self, c: &[f64]) -> Vertex {
        simplex_lmo(c)
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n
            && x.iter().all(|&v| v >= -CONTAINS_TOL)
            && (x.iter().sum::<f64>() - 1.0).abs() <= CONTAINS_TOL * self.n as f64
    }

    fn diameter(&self) -> f64 {
        if self.n > 1 {
            std::f64::consts::SQRT_2
        } else {
            0.0
        }
    }

    fn is_polytope(&self) -> bool {
        true
    }

    fn vertex_decomposition(&self, x: &[f64]) -> Option<Vec<(Vertex, f64)>> {
        if !self.contains(x) {
            return None;
        }
        Some(
            x.iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .map(|(i, &w)| {
                    (
                        Vertex {
                            id: Some(i as u64),
                            point: unit(self.n, i, 1.0),
                        },
                        w,
                    )
                })
                .collect(),
        )
    }
}

/// `{x : ‖x‖₁ ≤ R}`.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Ball {
    n: usize,
    radius: f64,
}

impl L1Ball {
    pub fn new(n: usize, radius: f64) -> Self {
        assert!(n > 0 && radius > 0.0, "ℓ1 ball needs n > 0 and R > 0");
        Self { n, radius }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn vertex(&self, i: usize, s: f64) -> Vertex {
        Vertex {
            id: Some(l1_id(i, s)),
            point: unit(self.n, i, s * self.radius),
        }
    }
}

impl FeasibleSet for L1Ball {
    fn dim(&self) -> usize {
        self.n
    }

    fn lmo(&self, c: &[f64]) -> Vertex {
        l1ball_lmo(c, self.radius)
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n && norm1(x) <= self.radius * (1.0 + CONTAINS_TOL)
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
        let mut out: Vec<(Vertex, f64)> = x
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (self.vertex(i, sign(v)), v.abs() / self.radius))
            .collect();
        let slack = 1.0 - out.iter().map(|(_, w)| w).sum::<f64>();
        if slack > 0.0 {
            // ±R e_1 in equal parts contribute nothing to the point.
            for s in [1.0, -1.0] {
                let id = l1_id(0, s);
                match out.iter_mut().find(|(v, _)| v.id == Some(id)) {
                    Some((_, w)) => *w += 0.5 * slack,
                    None => out.push((self.vertex(0, s), 0.5 * slack)),
                }
            }
        }
        Some(out)
    }
}

/// Axis-aligned box `[lo, hi]`; vertex ids are bit masks of the coordinates
/// sitting at their upper bound (so `dim ≤ 64`).
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxSet {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(!lo.is_empty() && lo.len() <= 64, "box dimension must be in 1..=64");
        assert!(lo.iter().zip(&hi).all(|(a, b)| a < b), "box needs lo < hi");
        Self { lo, hi }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Self::new(vec![lo], vec![hi])
    }

    fn corner(&self, mask: u64) -> Vec<f64> {
        (0..self.lo.len())
            .map(|i| if mask >> i & 1 == 1 { self.hi[i] } else { self.lo[i] })
            .collect()
    }
}

impl FeasibleSet for BoxSet {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn lmo(&self, c: &[f64]) -> Vertex {
        let mask = c
            .iter()
            .enumerate()
            .filter(|(_, &ci)| ci < 0.0)
            .fold(0u64, |m, (i, _)| m | 1 << i);
        Vertex {
            id: Some(mask),
            point: self.corner(mask),
        }
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.lo.len()
            && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&v, (&a, &b))| {
                let slack = CONTAINS_TOL * (1.0 + a.abs().max(b.abs()));
                v >= a - slack && v <= b + slack
            })
    }

    fn diameter(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }

    fn is_polytope(&self) -> bool {
        true
    }

    fn vertex_decomposition(&self, x: &[f64]) -> Option<Vec<(Vertex, f64)>> {
        if !self.contains(x) {
            return None;
        }
        let n = self.lo.len();
        let lambda: Vec<f64> = (0..n)
            .map(|i| ((x[i] - self.lo[i]) / (self.hi[i] - self.lo[i])).clamp(0.0, 1.0))
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| lambda[b].total_cmp(&lambda[a]).then(a.cmp(&b)));
        // staircase: corner k raises the k coordinates with the largest λ
        let mut out = Vec::new();
        let mut mask = 0u64;
        let mut prev = 1.0;
        for k in 0..=n {
            let next = if k < n { lambda[order[k]] } else { 0.0 };
            let w = prev - next;
            if w > 0.0 {
                out.push((
                    Vertex {
                        id: Some(mask),
                        point: self.corner(mask),
                    },
                    w,
                ));
            }
            if k < n {
                mask |= 1 << order[k];
                prev = next;
            }
        }
        Some(out)
    }
}
