//! Generalized self-concordant (GSC) objectives: the class constants
//! `(M_f, ν)`, the kernels `ω_ν`, `d_ν`, `δ_ν`, local function-value bounds
//! and the calculus rules that produce `M_f` for composite objectives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, sub};

/// Distance to an endpoint below which `ν` is snapped onto that endpoint.
pub const NU_BRANCH_TOL: f64 = 1e-9;

/// Below this magnitude of `|t|` (scaled by the interior exponent) `ω_ν` is
/// summed from its Taylor series instead of the closed form.
const SERIES_RADIUS: f64 = 0.5;

/// Which closed form of the GSC kernels applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Order {
    Two,
    Interior(f64),
    Three,
}

impl Order {
    pub fn classify(nu: f64) -> Result<Self> {
        if !(2.0 - NU_BRANCH_TOL..=3.0 + NU_BRANCH_TOL).contains(&nu) {
            return Err(Error::NuOutOfRange(nu));
        }
        Ok(if (nu - 2.0).abs() < NU_BRANCH_TOL {
            Order::Two
        } else if (nu - 3.0).abs() < NU_BRANCH_TOL {
            Order::Three
        } else {
            Order::Interior(nu)
        })
    }

    pub fn nu(self) -> f64 {
        match self {
            Order::Two => 2.0,
            Order::Interior(nu) => nu,
            Order::Three => 3.0,
        }
    }

    /// `ω_ν(t)`; defined for all real `t` when `ν = 2` and for `t < 1` otherwise.
    pub fn omega(self, t: f64) -> Result<f64> {
        if t.is_nan() || (self != Order::Two && t >= 1.0) {
            return Err(Error::OmegaDomain { nu: self.nu(), t });
        }
        Ok(match self {
            Order::Two => {
                if t.abs() < SERIES_RADIUS {
                    // sum_j t^j / (j+2)!
                    series(0.5, t, |j| 1.0 / (j as f64 + 3.0))
                } else {
                    (t.exp_m1() - t) / (t * t)
                }
            }
            Order::Three => {
                if t.abs() < SERIES_RADIUS {
                    // sum_j t^j / (j+2)
                    let mut sum = 0.0;
                    let mut pow = 1.0;
                    for j in 0..400 {
                        let term = pow / (j as f64 + 2.0);
                        sum += term;
                        if term.abs() <= 1e-18 * sum.abs() {
                            break;
                        }
                        pow *= t;
                    }
                    sum
                } else {
                    (-t - (-t).ln_1p()) / (t * t)
                }
            }
            Order::Interior(nu) => {
                let p = 2.0 * (3.0 - nu) / (2.0 - nu);
                if t.abs() * p.abs().max(1.0) < SERIES_RADIUS {
                    // Coefficients of ((1-t)^p - 1 + p t) / t^2 scaled so that the
                    // constant term is 1/2.
                    series(0.5, t, |j| -(p - j as f64 - 2.0) / (j as f64 + 3.0))
                } else {
                    let a = (nu - 2.0) / (4.0 - nu);
                    let k = (nu - 2.0) / (2.0 * (3.0 - nu));
                    let pow_m1 = (p * (-t).ln_1p()).exp_m1();
                    a / t * (k / t * pow_m1 - 1.0)
                }
            }
        })
    }
}

/// Sums `c_0 + c_1 t + c_2 t^2 + ...` where `c_{j+1} = c_j * ratio(j)`.
fn series(c0: f64, t: f64, ratio: impl Fn(usize) -> f64) -> f64 {
    let mut sum = c0;
    let mut term = c0;
    for j in 0..400 {
        term *= ratio(j) * t;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// The class `F_{M_f, ν}` an objective belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GscSpec {
    m_f: f64,
    order: Order,
}

impl GscSpec {
    pub fn new(m_f: f64, nu: f64) -> Result<Self> {
        if !(m_f.is_finite() && m_f >= 0.0) {
            return Err(Error::InvalidConstant(m_f));
        }
        Ok(Self {
            m_f,
            order: Order::classify(nu)?,
        })
    }

    pub fn m_f(&self) -> f64 {
        self.m_f
    }

    pub fn nu(&self) -> f64 {
        self.order.nu()
    }

    pub fn order(&self) -> Order {
        self.order
    }

    /// Same order, different constant (used by backtracking over `M_f`).
    pub fn with_m(&self, m_f: f64) -> Result<Self> {
        Self::new(m_f, self.nu())
    }
}

/// `ω_ν(t)` with input validation.
pub fn omega(nu: f64, t: f64) -> Result<f64> {
    Order::classify(nu)?.omega(t)
}

/// `δ_ν` from the euclidean length `beta` and local norm `e` of a direction.
pub fn delta_nu(spec: &GscSpec, beta: f64, e: f64) -> f64 {
    match spec.order() {
        Order::Two => beta,
        _ if beta == 0.0 || e == 0.0 => 0.0,
        Order::Three => 0.5 * e,
        Order::Interior(nu) => 0.5 * (nu - 2.0) * beta.powf(3.0 - nu) * e.powf(nu - 2.0),
    }
}

/// `d_ν(x, y)` given `‖y-x‖₂` and `‖y-x‖_x`.
pub fn d_nu(spec: &GscSpec, step_euclid: f64, step_local: f64) -> f64 {
    spec.m_f() * delta_nu(spec, step_euclid, step_local)
}

/// A differentiable GSC objective accessed through values, gradients and
/// Hessian-vector products.
///
/// Implementations must be usable concurrently from several solver runs.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn spec(&self) -> GscSpec;

    fn in_domain(&self, x: &[f64]) -> bool;

    /// `+∞` outside the domain.
    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64>;

    fn hess_vec(&self, x: &[f64], v: &[f64]) -> Vec<f64>;

    /// `‖v‖_x²`, clamped at zero against rounding.
    fn local_norm_sq(&self, x: &[f64], v: &[f64]) -> f64 {
        dot(&self.hess_vec(x, v), v).max(0.0)
    }

    /// Largest `t ∈ (0, 1]` with `x + t v` in the domain (up to a small safety
    /// shrink). Objectives with a cheap exact rule override this.
    fn max_step(&self, x: &[f64], v: &[f64]) -> f64 {
        crate::oracles::bisect_max_step(|y| self.in_domain(y), x, v)
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn spec(&self) -> GscSpec {
        (**self).spec()
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        (**self).in_domain(x)
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (**self).gradient(x)
    }
    fn hess_vec(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        (**self).hess_vec(x, v)
    }
    fn local_norm_sq(&self, x: &[f64], v: &[f64]) -> f64 {
        (**self).local_norm_sq(x, v)
    }
    fn max_step(&self, x: &[f64], v: &[f64]) -> f64 {
        (**self).max_step(x, v)
    }
}

/// Per-iterate quantities that drive the analytic step sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalGeometry {
    pub beta: f64,
    pub e: f64,
    pub delta: f64,
    pub gap: f64,
}

impl LocalGeometry {
    pub fn new(spec: &GscSpec, beta: f64, e: f64, gap: f64) -> Self {
        Self {
            beta,
            e,
            delta: delta_nu(spec, beta, e),
            gap,
        }
    }

    /// Geometry of direction `v` at `x` with (possibly modified) gap `gap`.
    pub fn along<F: Objective + ?Sized>(f: &F, x: &[f64], v: &[f64], gap: f64) -> Self {
        let e = f.local_norm_sq(x, v).sqrt();
        Self::new(&f.spec(), norm2(v), e, gap)
    }
}

/// Lower and (when it exists) upper model of `f(y)` built at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentBounds {
    pub lower: f64,
    pub upper: Option<f64>,
    pub d: f64,
}

pub fn descent_bounds<F: Objective + ?Sized>(f: &F, x: &[f64], y: &[f64]) -> Result<DescentBounds> {
    if !f.in_domain(x) || !f.in_domain(y) {
        return Err(Error::NotInDomain);
    }
    let spec = f.spec();
    let h = sub(y, x);
    let e2 = f.local_norm_sq(x, &h);
    let d = d_nu(&spec, norm2(&h), e2.sqrt());
    let linear = f.value(x) + dot(&f.gradient(x), &h);
    let order = spec.order();
    let lower = linear + order.omega(-d)? * e2;
    let upper = match order {
        Order::Two => Some(linear + order.omega(d)? * e2),
        _ if d < 1.0 => Some(linear + order.omega(d)? * e2),
        _ => None,
    };
    Ok(DescentBounds { lower, upper, d })
}

/// `M_f` of `Σ w_i f_i` with `f_i ∈ F_{M_i, ν}`.
pub fn gsc_sum_constant(terms: &[(f64, f64)], nu: f64) -> Result<f64> {
    Order::classify(nu)?;
    if terms.is_empty() {
        return Err(Error::Empty("sum of GSC terms"));
    }
    let mut best: f64 = 0.0;
    for &(w, m) in terms {
        if !(w > 0.0) || !(m >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weights must be positive and constants nonnegative (w = {w}, M = {m})"
            )));
        }
        best = best.max(w.powf(1.0 - nu / 2.0) * m);
    }
    Ok(best)
}

/// `M_f` of `x ↦ f(A x + b)` for `ν ∈ [2, 3]` given `‖A‖`.
///
/// `min_singular_sq` belongs to the `ν > 3` rule and is rejected.
pub fn gsc_affine_constant(m: f64, nu: f64, operator_norm: f64, min_singular_sq: Option<f64>) -> Result<f64> {
    Order::classify(nu)?;
    if min_singular_sq.is_some() {
        return Err(Error::Unsupported(
            "the singular-value rule only applies for ν > 3".into(),
        ));
    }
    if !(operator_norm >= 0.0) {
        return Err(Error::InvalidArgument(format!("operator norm {operator_norm}")));
    }
    Ok(m * operator_norm.powf(3.0 - nu))
}

/// `M_f` of the finite-sum model `Σ φ_i(⟨a_i, x⟩) + ½⟨Qx, x⟩`, given
/// `(M_{φ_i}, ‖a_i‖₂)` and `λ_min(Q)`.
pub fn gsc_finite_sum_constant(phis: &[(f64, f64)], nu: f64, lambda_min_q: f64) -> Result<f64> {
    if !(nu > 0.0 && nu <= 3.0) {
        return Err(Error::NuOutOfRange(nu));
    }
    if phis.is_empty() {
        return Err(Error::Empty("finite-sum terms"));
    }
    let scale = if (nu - 3.0).abs() < NU_BRANCH_TOL {
        1.0
    } else {
        if !(lambda_min_q > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "λ_min(Q) = {lambda_min_q} must be positive when ν < 3"
            )));
        }
        lambda_min_q.powf((nu - 3.0) / 2.0)
    };
    let max = phis
        .iter()
        .map(|&(m, a)| m * a.powf(3.0 - nu))
        .fold(0.0_f64, f64::max);
    Ok(scale * max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn omega_examples() {
        assert_relative_eq!(omega(2.0, 1.0).unwrap(), std::f64::consts::E - 2.0, epsilon = 1e-15);
        assert_relative_eq!(omega(3.0, 1e-12).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(omega(2.5, 0.5).unwrap(), 4.0 / 3.0, max_relative = 1e-14);
        assert_eq!(omega(2.0, 0.0).unwrap(), 0.5);
        assert_eq!(omega(2.7, 0.0).unwrap(), 0.5);
    }

    #[test]
    fn omega_domain_errors() {
        assert!(matches!(omega(3.0, 1.0), Err(Error::OmegaDomain { .. })));
        assert!(matches!(omega(2.5, 1.5), Err(Error::OmegaDomain { .. })));
        assert!(matches!(omega(1.5, 0.1), Err(Error::NuOutOfRange(_))));
        assert!(matches!(omega(3.5, 0.1), Err(Error::NuOutOfRange(_))));
        assert!(omega(2.0, 5.0).is_ok());
    }

    #[test]
    fn branch_snapping() {
        assert_eq!(Order::classify(2.0 + 1e-10).unwrap(), Order::Two);
        assert_eq!(Order::classify(3.0 - 1e-10).unwrap(), Order::Three);
        assert!(matches!(Order::classify(2.5).unwrap(), Order::Interior(_)));
    }

    #[test]
    fn series_and_closed_form_agree_at_the_switch() {
        for nu in [2.0, 2.3, 2.5, 2.9, 3.0] {
            let order = Order::classify(nu).unwrap();
            let p = match order {
                Order::Interior(nu) => (2.0 * (3.0 - nu) / (2.0 - nu)).abs().max(1.0),
                _ => 1.0,
            };
            let edge = SERIES_RADIUS / p;
            for t in [edge * (1.0 - 1e-9), -edge * (1.0 - 1e-9)] {
                let inside = order.omega(t).unwrap();
                let outside = order.omega(t * (1.0 + 2e-9)).unwrap();
                assert_relative_eq!(inside, outside, max_relative = 5e-9);
            }
        }
    }

    #[test]
    fn matches_forty_digit_reference() {
        // reference values from 40-digit arithmetic on the raw closed forms
        let cases = [
            (2.0, 0.49, 0.592_737_275_949_100_2),
            (2.5, 0.24, 0.727_146_814_404_432_1),
            (2.9, -0.45, 0.377_223_248_747_694_8),
            (3.0, 0.49, 0.763_617_464_655_416_9),
            (2.1, 0.03, 0.618_095_199_385_738),
        ];
        for (nu, t, want) in cases {
            assert_relative_eq!(omega(nu, t).unwrap(), want, max_relative = 1e-13);
        }
    }

    #[test]
    fn slope_at_zero() {
        // ω_2'(0) = 1/6, ω_3'(0) = 1/3, interior 1/(3(ν-2)).
        let h = 1e-7;
        for (nu, slope) in [(2.0, 1.0 / 6.0), (3.0, 1.0 / 3.0), (2.5, 1.0 / 1.5)] {
            let d = (omega(nu, h).unwrap() - omega(nu, -h).unwrap()) / (2.0 * h);
            assert_relative_eq!(d, slope, max_relative = 1e-6);
        }
    }

    #[test]
    fn distance_examples() {
        let s = GscSpec::new(2.0, 3.0).unwrap();
        assert_eq!(d_nu(&s, 123.0, 1.0), 1.0);
        let s = GscSpec::new(1.0, 2.0).unwrap();
        assert_eq!(d_nu(&s, 0.3, 7.0), 0.3);
        let s = GscSpec::new(1.0, 2.5).unwrap();
        assert_relative_eq!(d_nu(&s, 4.0, 1.0), 0.5, max_relative = 1e-15);
        assert_eq!(d_nu(&s, 0.0, 1.0), 0.0);
        assert_eq!(d_nu(&s, 1.0, 0.0), 0.0);
    }

    #[test]
    fn delta_examples() {
        let two = GscSpec::new(1.0, 2.0).unwrap();
        let three = GscSpec::new(1.0, 3.0).unwrap();
        let mid = GscSpec::new(1.0, 2.5).unwrap();
        assert_eq!(delta_nu(&two, 3.0, 5.0), 3.0);
        assert_eq!(delta_nu(&three, 3.0, 5.0), 2.5);
        assert_relative_eq!(delta_nu(&mid, 4.0, 1.0), 0.5, max_relative = 1e-15);
        // d_ν(x, x + t v) = t M δ_ν(x)
        let m = GscSpec::new(1.7, 2.4).unwrap();
        let (beta, e, t) = (0.8, 2.3, 0.37);
        assert_relative_eq!(
            d_nu(&m, t * beta, t * e),
            t * 1.7 * delta_nu(&m, beta, e),
            max_relative = 1e-14
        );
    }

    #[test]
    fn spec_validation() {
        assert!(GscSpec::new(-1.0, 2.5).is_err());
        assert!(GscSpec::new(1.0, 1.9).is_err());
        assert!(GscSpec::new(f64::NAN, 2.5).is_err());
        assert!(GscSpec::new(0.0, 2.0).is_ok());
    }

    #[test]
    fn sum_rule() {
        assert_eq!(gsc_sum_constant(&[(1.0, 5.0)], 2.3).unwrap(), 5.0);
        assert_eq!(gsc_sum_constant(&[(1.0, 2.0), (1.0, 3.0)], 3.0).unwrap(), 3.0);
        assert_relative_eq!(gsc_sum_constant(&[(4.0, 1.0)], 3.0).unwrap(), 0.5);
        assert!(matches!(gsc_sum_constant(&[], 2.5), Err(Error::Empty(_))));
        assert!(gsc_sum_constant(&[(0.0, 1.0)], 2.5).is_err());
    }

    #[test]
    fn affine_rule() {
        assert_eq!(gsc_affine_constant(3.0, 3.0, 17.0, None).unwrap(), 3.0);
        assert_eq!(gsc_affine_constant(1.0, 2.0, 2.0, None).unwrap(), 2.0);
        assert_relative_eq!(gsc_affine_constant(1.0, 2.5, 4.0, None).unwrap(), 2.0);
        assert!(gsc_affine_constant(1.0, 3.5, 4.0, None).is_err());
        assert!(gsc_affine_constant(1.0, 2.5, 4.0, Some(1.0)).is_err());
    }

    #[test]
    fn finite_sum_rule() {
        assert_eq!(
            gsc_finite_sum_constant(&[(2.0, 9.0), (5.0, 0.1)], 3.0, 0.0).unwrap(),
            5.0
        );
        let gamma: f64 = 0.01;
        assert_relative_eq!(
            gsc_finite_sum_constant(&[(1.0, 1.0)], 2.0, gamma).unwrap(),
            gamma.powf(-0.5)
        );
        assert_relative_eq!(gsc_finite_sum_constant(&[(1.0, 2.0)], 2.0, 4.0).unwrap(), 1.0);
        assert!(gsc_finite_sum_constant(&[(1.0, 2.0)], 2.0, 0.0).is_err());
    }
}
