//! Mittag-Leffler function `E_α(z) = Σ z^k / Γ(αk + 1)` on `z <= 0`, `0 < α < 2`.
//!
//! Used as a reference for spatially constant solutions. Small `|z|` uses
//! the series in double-double; larger `|z|` uses the spectral
//! representation
//!
//! ```text
//! E_α(-t^α) = ∫₀^∞ e^{-rt} K_α(r) dr  [+ (2/α) e^{t cos(π/α)} cos(t sin(π/α)) if α > 1],
//! K_α(r) = r^{α-1} sin(απ) / (π (r^{2α} + 2 r^α cos(απ) + 1)).
//! ```

use std::f64::consts::PI;

use super::dd::Dd;
use super::gamma::recip_gamma;
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadratureConfig};

const TOL: f64 = 1e-12;

pub fn mittag_leffler(alpha: f64, z: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) || !(z <= 0.0) || !z.is_finite() {
        return Err(Error::domain(format!(
            "mittag_leffler requires 0 < alpha < 2 and finite z <= 0 (alpha={alpha:?}, z={z:?})"
        )));
    }
    if alpha == 1.0 {
        return Ok(z.exp());
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    match series(alpha, z) {
        Ok(v) => Ok(v),
        Err(_) => spectral(alpha, -z),
    }
}

fn series(alpha: f64, z: f64) -> Result<f64> {
    let mut sum = Dd::ZERO;
    let mut power = Dd::ONE;
    let mut max_term = 0.0f64;
    for k in 0..3000 {
        if k > 0 {
            power = power.mul_f64(z);
        }
        let term = power * Dd::new(recip_gamma(alpha * k as f64 + 1.0));
        let t = term.hi.abs();
        if !t.is_finite() || !power.hi.is_finite() {
            break;
        }
        sum = sum + term;
        max_term = max_term.max(t);
        if k > 2 && t < 1e-3 * f64::EPSILON * sum.hi.abs() && t < max_term * 1e-20 {
            let v = sum.to_f64();
            if 8.0 * f64::EPSILON * max_term <= TOL * v.abs() {
                return Ok(v);
            }
            break;
        }
    }
    Err(Error::NonConvergence {
        what: "mittag_leffler",
        arg: z,
        detail: "series cancellation".into(),
    })
}

fn spectral(alpha: f64, x: f64) -> Result<f64> {
    let t = x.powf(1.0 / alpha);
    let sa = (alpha * PI).sin();
    let ca = (alpha * PI).cos();
    // r = u^{1/α} on [0,1]; r = w^{-1/α} on [1,∞).
    let cfg = QuadratureConfig {
        rel_tol: 1e-13,
        abs_tol: 1e-16,
        max_panels: 2000,
        tail_safety: 1.0,
    };
    let pts = [0.0, 1e-6, 1e-4, 1e-2, 0.1, 0.5, 1.0];
    let near = integrate(
        |u: f64| Ok((-t * u.powf(1.0 / alpha)).exp() * sa / (u * u + 2.0 * u * ca + 1.0)),
        &pts,
        &cfg,
    )?;
    let far = integrate(
        |w: f64| {
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok((-t * w.powf(-1.0 / alpha)).exp() * sa / (1.0 + 2.0 * w * ca + w * w))
        },
        &pts,
        &cfg,
    )?;
    let mut v = (near.value + far.value) / (alpha * PI);
    if alpha > 1.0 {
        let (s, c) = (PI / alpha).sin_cos();
        v += 2.0 / alpha * (t * c).exp() * (t * s).cos();
    }
    Ok(v)
}
