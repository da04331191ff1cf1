//! The scalar step-size kernel shared by every GSC Frank-Wolfe variant.
//!
//! All analytic step rules reduce to maximizing
//! `ψ_ν(t) = t - ξ ω_ν(tδ) t²` over `t ≥ 0`, with `δ = M_f δ_ν(x)` and
//! `ξ = e(x)² / gap(x)`. This module provides `ψ_ν`, its unique maximizer,
//! the maximal value in closed form, a lower bound on that value and the
//! solver-facing clipped step.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gsc::{GscSpec, LocalGeometry, Order};

/// Below this argument the `log1p`-type differences are summed as series.
const SERIES_SWITCH: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiParams {
    pub delta: f64,
    pub xi: f64,
    pub order: Order,
}

impl PsiParams {
    pub fn new(delta: f64, xi: f64, nu: f64) -> Result<Self> {
        let order = Order::classify(nu)?;
        Self::with_order(delta, xi, order)
    }

    pub fn with_order(delta: f64, xi: f64, order: Order) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite() && xi >= 0.0 && xi.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "ψ parameters must be finite and nonnegative (δ = {delta}, ξ = {xi})"
            )));
        }
        Ok(Self { delta, xi, order })
    }

    pub fn nu(&self) -> f64 {
        self.order.nu()
    }
}

/// `ψ_ν(t) = t - ξ ω_ν(tδ) t²`.
pub fn psi(params: &PsiParams, t: f64) -> Result<f64> {
    let PsiParams { delta, xi, order } = *params;
    if xi == 0.0 {
        if order != Order::Two && t * delta >= 1.0 {
            return Err(Error::OmegaDomain { nu: order.nu(), t: t * delta });
        }
        return Ok(t);
    }
    if delta == 0.0 {
        return Ok(t - 0.5 * xi * t * t);
    }
    Ok(t - xi * order.omega(t * delta)? * t * t)
}

/// `dψ_ν/dt`, from the derivative of `s ↦ s² ω_ν(s)`.
pub fn psi_derivative(params: &PsiParams, t: f64) -> Result<f64> {
    let PsiParams { delta, xi, order } = *params;
    if delta == 0.0 {
        return Ok(1.0 - xi * t);
    }
    let s = t * delta;
    let g_prime = match order {
        Order::Two => s.exp_m1(),
        Order::Three => {
            if s >= 1.0 {
                return Err(Error::OmegaDomain { nu: 3.0, t: s });
            }
            s / (1.0 - s)
        }
        Order::Interior(nu) => {
            if s >= 1.0 {
                return Err(Error::OmegaDomain { nu, t: s });
            }
            let a = (nu - 2.0) / (4.0 - nu);
            let p = 2.0 * (3.0 - nu) / (2.0 - nu);
            a * ((p - 1.0) * (-s).ln_1p()).exp_m1()
        }
    };
    Ok(1.0 - xi / delta * g_prime)
}

/// Unique maximizer of `ψ_ν` over `t ≥ 0`.
///
/// Returns `+∞` when `ν = 2` and `ξ = 0` (ψ is then unbounded).
pub fn t_star(params: &PsiParams) -> Result<f64> {
    let PsiParams { delta, xi, order } = *params;
    if delta == 0.0 && xi == 0.0 {
        return Err(Error::UndefinedStepParams { delta, xi });
    }
    if delta == 0.0 {
        return Ok(1.0 / xi);
    }
    if xi == 0.0 {
        return Ok(match order {
            Order::Two => f64::INFINITY,
            _ => 1.0 / delta,
        });
    }
    Ok(match order {
        Order::Two => (delta / xi).ln_1p() / delta,
        Order::Three => 1.0 / (delta + xi),
        Order::Interior(nu) => {
            let u = delta / xi * (4.0 - nu) / (nu - 2.0);
            let q = (nu - 2.0) / (4.0 - nu);
            -(-q * u.ln_1p()).exp_m1() / delta
        }
    })
}

/// `(log(1+s) - s) / s`, accurate for small `s`.
fn log1p_defect(s: f64) -> f64 {
    if s < SERIES_SWITCH {
        // sum_{m≥2} (-1)^{m+1} s^{m-1} / m
        let mut sum = 0.0;
        let mut pow = 1.0;
        for m in 2..200 {
            pow *= s;
            let term = if m % 2 == 0 { -pow } else { pow } / m as f64;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (s.ln_1p() - s) / s
    }
}

/// Closed-form `ψ_ν(t*)`.
pub fn psi_at_tstar(params: &PsiParams) -> Result<f64> {
    let PsiParams { delta, xi, order } = *params;
    if xi == 0.0 {
        return Err(Error::UndefinedStepParams { delta, xi });
    }
    if delta == 0.0 {
        return Ok(0.5 / xi);
    }
    let s = delta / xi;
    Ok(match order {
        Order::Two => (s.ln_1p() + log1p_defect(s)) / delta,
        Order::Three => -log1p_defect(s) / delta,
        Order::Interior(nu) => {
            let a = (4.0 - nu) / (2.0 * (3.0 - nu));
            let b = (2.0 - nu) / (4.0 - nu);
            let w = -s / b;
            let gamma = if w < SERIES_SWITCH {
                // -sum_{m≥2} a C(1+b, m) w^{m-1}
                let c = 1.0 + b;
                let mut term = a * c * (c - 1.0) / 2.0 * w;
                let mut sum = term;
                for m in 2..200 {
                    term *= (c - m as f64) / (m as f64 + 1.0) * w;
                    sum += term;
                    if term.abs() <= 1e-18 * sum.abs() {
                        break;
                    }
                }
                -sum
            } else {
                let l = w.ln_1p();
                -a * ((1.0 + w) * (b * l).exp_m1() - b * w) / w
            };
            gamma / delta
        }
    })
}

/// `γ̃_ν`, the constant of the interior-order lower bound. Continuous on
/// `[2, 3]` with `γ̃_2 = 0` and `γ̃_3 = 1 - ln 2`.
pub fn gamma_tilde(nu: f64) -> Result<f64> {
    Ok(match Order::classify(nu)? {
        Order::Two => 0.0,
        Order::Three => 1.0 - LN_2,
        Order::Interior(nu) => {
            let a = (4.0 - nu) / (2.0 * (3.0 - nu));
            1.0 - a * (LN_2 / a).exp_m1()
        }
    })
}

/// Lower bound on `ψ_ν(t*)` in terms of `min{1/δ, 1/ξ}`-type quantities.
pub fn psi_lower_bound(params: &PsiParams) -> Result<f64> {
    let PsiParams { delta, xi, order } = *params;
    if !(delta > 0.0 && xi > 0.0) {
        return Err(Error::UndefinedStepParams { delta, xi });
    }
    Ok(match order {
        Order::Two => (2.0 * LN_2 - 1.0) / delta * (delta / xi).min(1.0),
        Order::Three => (1.0 - LN_2) / delta * (delta / xi).min(1.0),
        Order::Interior(nu) => {
            let b = (2.0 - nu) / (4.0 - nu);
            gamma_tilde(nu)? / delta * (-delta / (xi * b)).min(1.0)
        }
    })
}

/// The clipped analytic step together with the decrease it certifies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDecision {
    /// Unconstrained maximizer of the upper model (`+∞` on a zero-curvature direction).
    pub t_star: f64,
    pub alpha: f64,
    /// `gap · ψ(alpha)`.
    pub predicted_decrease: f64,
    pub cap: f64,
    pub zero_curvature: bool,
}

impl StepDecision {
    pub fn clipped(&self) -> bool {
        self.alpha < self.t_star
    }
}

/// Analytic step along a direction with geometry `geom` for an objective in
/// class `spec`, clipped to `cap`. Returns `None` when `geom.gap == 0`.
///
/// A direction with `e = 0` carries no curvature: the model reduces to
/// `ψ(t) = t` and the full `cap` is taken.
pub fn analytic_step(spec: &GscSpec, geom: &LocalGeometry, cap: f64) -> Result<Option<StepDecision>> {
    if !(cap > 0.0) {
        return Err(Error::InvalidArgument(format!("step cap must be positive, got {cap}")));
    }
    if !(geom.gap > 0.0) {
        return Ok(None);
    }
    if geom.e == 0.0 {
        return Ok(Some(StepDecision {
            t_star: f64::INFINITY,
            alpha: cap,
            predicted_decrease: geom.gap * cap,
            cap,
            zero_curvature: true,
        }));
    }
    let params = PsiParams::with_order(spec.m_f() * geom.delta, geom.e * geom.e / geom.gap, spec.order())?;
    let t = t_star(&params)?;
    let mut alpha = t.min(cap);
    if params.order != Order::Two && alpha * params.delta >= 1.0 {
        alpha = (1.0 - f64::EPSILON) / params.delta;
    }
    Ok(Some(StepDecision {
        t_star: t,
        alpha,
        predicted_decrease: geom.gap * psi(&params, alpha)?,
        cap,
        zero_curvature: false,
    }))
}

/// The constants `(c₁, c₂)` of the per-iteration progress bound
/// `Δ ≥ min{c₁ gap, c₂ gap²}`.
pub fn progress_constants(m: f64, nu: f64, diam: f64, l_grad: f64) -> Result<(f64, f64)> {
    if !(m >= 0.0 && diam > 0.0 && l_grad > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "progress constants need M ≥ 0, diam > 0, L > 0 (got {m}, {diam}, {l_grad})"
        )));
    }
    let ln2 = LN_2;
    Ok(match Order::classify(nu)? {
        Order::Two => (
            f64::min(0.5, (2.0 * ln2 - 1.0) / (m * diam)),
            (2.0 * ln2 - 1.0) / (l_grad * diam * diam),
        ),
        Order::Three => (
            f64::min(0.5, 2.0 * (1.0 - ln2) / (m * l_grad.sqrt() * diam)),
            2.0 * (1.0 - ln2) / (l_grad * diam * diam),
        ),
        Order::Interior(nu) => {
            let g = gamma_tilde(nu)?;
            let b = (2.0 - nu) / (4.0 - nu);
            (
                f64::min(0.5, g / (diam * (nu / 2.0 - 1.0) * m * l_grad.powf((nu - 2.0) / 2.0))),
                -1.0 / b * g / (diam * diam * l_grad),
            )
        }
    })
}
