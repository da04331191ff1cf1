//! Small closed-form instances used in examples and tests.

use super::portfolio::Portfolio;
use super::{linear_max_step, ProblemInstance, StartRecipe};
use crate::error::{Error, Result};
use crate::gsc::{GscSpec, Objective};
use crate::linalg::dot;
use crate::oracles::{BoxSet, SimplexLloo, UnitSimplex};

/// `Σ_i curv_i (x_i − center_i)² / 2`, in `F_{M, 3}` for every `M > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableQuadratic {
    pub curv: Vec<f64>,
    pub center: Vec<f64>,
}

impl Objective for SeparableQuadratic {
    fn dim(&self) -> usize {
        self.curv.len()
    }

    fn spec(&self) -> GscSpec {
        GscSpec::new(f64::MIN_POSITIVE, 3.0).expect("valid constant")
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.iter().all(|v| v.is_finite())
    }

    fn value(&self, x: &[f64]) -> f64 {
        (0..x.len())
            .map(|i| 0.5 * self.curv[i] * (x[i] - self.center[i]).powi(2))
            .sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len()).map(|i| self.curv[i] * (x[i] - self.center[i])).collect()
    }

    fn hess_vec(&self, _x: &[f64], v: &[f64]) -> Vec<f64> {
        self.curv.iter().zip(v).map(|(c, t)| c * t).collect()
    }

    fn max_step(&self, _x: &[f64], _v: &[f64]) -> f64 {
        1.0
    }
}

/// Burg entropy with a linear tilt, `Σ_i (−ln x_i + tilt_i x_i)`, in `F_{2, 3}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BurgEntropy {
    pub tilt: Vec<f64>,
}

impl Objective for BurgEntropy {
    fn dim(&self) -> usize {
        self.tilt.len()
    }

    fn spec(&self) -> GscSpec {
        GscSpec::new(2.0, 3.0).expect("valid constant")
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        x.iter().all(|&v| v > 0.0)
    }

    fn value(&self, x: &[f64]) -> f64 {
        if !self.in_domain(x) {
            return f64::INFINITY;
        }
        x.iter().map(|v| -v.ln()).sum::<f64>() + dot(&self.tilt, x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.tilt).map(|(v, t)| t - 1.0 / v).collect()
    }

    fn hess_vec(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        x.iter().zip(v).map(|(a, b)| b / (a * a)).collect()
    }

    fn max_step(&self, x: &[f64], v: &[f64]) -> f64 {
        linear_max_step(x, v)
    }
}

/// `−ln x − ln y` on the 2-simplex; optimum `(½, ½)` with value `2 ln 2`.
pub fn example_one() -> ProblemInstance {
    let obj = Portfolio::new(vec![1.0, 0.0, 0.0, 1.0], 2, 2).expect("2 × 2 identity");
    ProblemInstance::new(
        "example-one",
        Box::new(obj),
        Box::new(UnitSimplex::new(2)),
        Some(Box::new(SimplexLloo::new(2))),
        StartRecipe::Fixed(vec![0.25, 0.75]),
    )
    .expect("matching dimensions")
    .with_reference(2.0 * 2f64.ln(), "closed form")
}

/// `−ln x` on `[lo, hi]`, started at `lo`; optimum at `hi`.
pub fn burg_interval(lo: f64, hi: f64) -> Result<ProblemInstance> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidArgument(format!("need 0 < lo < hi, got [{lo}, {hi}]")));
    }
    Ok(ProblemInstance::new(
        "burg-interval",
        Box::new(BurgEntropy { tilt: vec![0.0] }),
        Box::new(BoxSet::interval(lo, hi)),
        None,
        StartRecipe::Fixed(vec![lo]),
    )?
    .with_reference(-hi.ln(), "closed form"))
}

/// Separable quadratic on the unit simplex whose minimizer lies in the
/// relative interior of the face spanned by the first `face` vertices.
pub fn simplex_face_quadratic(n: usize, face: usize) -> Result<ProblemInstance> {
    if !(1..=n).contains(&face) {
        return Err(Error::InvalidArgument(format!("face size {face} outside 1..={n}")));
    }
    let curv: Vec<f64> = (0..n).map(|i| 1.0 + (i % 3) as f64 * 0.5).collect();
    // minimizer x* = 1/face on the face; gradient there is −λ on the face
    // and strictly larger off it
    let lambda = 0.5;
    let center: Vec<f64> = (0..n)
        .map(|i| {
            if i < face {
                1.0 / face as f64 + lambda / curv[i]
            } else {
                -0.2
            }
        })
        .collect();
    let obj = SeparableQuadratic { curv, center };
    let mut star = vec![0.0; n];
    star[..face].iter_mut().for_each(|v| *v = 1.0 / face as f64);
    let f_star = obj.value(&star);
    Ok(ProblemInstance::new(
        format!("face-quadratic-{n}-{face}"),
        Box::new(obj),
        Box::new(UnitSimplex::new(n)),
        Some(Box::new(SimplexLloo::new(n))),
        StartRecipe::SimplexVertex { n },
    )?
    .with_reference(f_star, "closed form"))
}
