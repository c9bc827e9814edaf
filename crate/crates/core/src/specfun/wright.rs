//! Wright function `φ(-β, μ; z) = Σ_k z^k / (k! Γ(μ - βk))` for `0 < β < 1`.
//!
//! Small arguments are summed directly, with the summation error estimated
//! from the largest term. On the negative axis the series cancels
//! catastrophically, so beyond `asym_threshold` (or whenever the series
//! cannot certify its tolerance) the Hankel integral
//! `φ = (2πi)⁻¹ ∫ exp(σ - xσ^β) σ^{-μ} dσ`, `x = -z`, is evaluated along its
//! steepest-descent path `σ = r(θ) e^{iθ}` on which the exponent is real:
//!
//! ```text
//! r(θ)^{1-β} = x sin(βθ) / sin θ,    E(θ) = -r sin((1-β)θ) / sin(βθ),
//! φ = π⁻¹ ∫₀^π e^{E} r^{1-μ} [ (r'/r) sin((1-μ)θ) + cos((1-μ)θ) ] dθ.
//! ```
//!
//! For large `x` the integrand is peaked at θ = 0, where `E(0) = -Y`,
//! `Y = (1-β)/β · (βx)^{1/(1-β)}`, the stretched-exponential decay of φ.
//! The integrand's peak size is divided out before quadrature.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::dd::Dd;
use super::gamma::{ln_recip_gamma, recip_gamma};
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WorkingPrecision {
    Standard,
    #[default]
    Compensated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrightEval {
    pub beta: f64,
    pub series_tol: f64,
    pub max_terms: usize,
    /// For `z <= -asym_threshold` the contour branch is used without trying the series.
    pub asym_threshold: f64,
    pub working_precision: WorkingPrecision,
}

/// Largest positive argument on which the series is attempted.
const POSITIVE_LIMIT: f64 = 50.0;

impl WrightEval {
    /// Defaults: `series_tol = 1e-12`, 600 terms, compensated summation and
    /// an adaptively chosen `asym_threshold`.
    pub fn new(beta: f64) -> Result<Self> {
        Self::with_tol(beta, 1e-12)
    }

    pub fn with_tol(beta: f64, series_tol: f64) -> Result<Self> {
        let mut cfg = WrightEval {
            beta,
            series_tol,
            max_terms: 600,
            asym_threshold: 1.0,
            working_precision: WorkingPrecision::Compensated,
        };
        cfg.validate()?;
        cfg.asym_threshold = default_threshold(beta, series_tol, cfg.working_precision);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::config(format!("beta must lie in (0,1), got {}", self.beta)));
        }
        if !(self.series_tol > 0.0) {
            return Err(Error::config("series_tol must be positive"));
        }
        if self.max_terms < 32 {
            return Err(Error::config("max_terms must be at least 32"));
        }
        if !(self.asym_threshold > 0.0) {
            return Err(Error::config("asym_threshold must be positive"));
        }
        Ok(())
    }

    pub fn phi(&self, mu: f64, z: f64) -> Result<f64> {
        if !z.is_finite() || !mu.is_finite() {
            return Err(Error::domain(format!("wright_phi needs finite arguments (mu={mu}, z={z})")));
        }
        if z == 0.0 {
            return Ok(recip_gamma(mu));
        }
        if z < 0.0 && -z >= self.asym_threshold {
            return self.contour(mu, -z);
        }
        match self.series(mu, z) {
            Ok(v) => Ok(v),
            Err(_) if z < 0.0 => self.contour(mu, -z),
            Err(_) if z <= POSITIVE_LIMIT => self.cut_integral(mu, z),
            Err(e) => Err(e),
        }
    }

    /// `d/dz φ(-β, μ; z) = φ(-β, μ - β; z)`.
    pub fn phi_dz(&self, mu: f64, z: f64) -> Result<f64> {
        self.phi(mu - self.beta, z)
    }

    /// Direct series with an a-posteriori rounding-error check.
    pub fn series(&self, mu: f64, z: f64) -> Result<f64> {
        if z > POSITIVE_LIMIT {
            return Err(Error::NonConvergence {
                what: "wright_phi",
                arg: z,
                detail: format!("positive argument beyond validated range {POSITIVE_LIMIT}"),
            });
        }
        let beta = self.beta;
        let az = z.abs();
        let ln_az = az.ln();
        let mut power = Dd::ONE; // z^k / k!
        let mut sum = Dd::ZERO;
        let mut plain = 0.0f64;
        let mut abs_sum = 0.0f64;
        let mut max_term = 0.0f64;
        let mut ln_fact = 0.0f64;
        let mut small_run = 0;
        for k in 0..self.max_terms {
            let kf = k as f64;
            if k > 0 {
                power = power.mul_f64(z) / Dd::new(kf);
                ln_fact += kf.ln();
            }
            let arg = mu - beta * kf;
            let rg = recip_gamma(arg);
            let term = if rg.is_finite() && power.hi.is_normal() {
                power * Dd::new(rg)
            } else {
                let (lr, sign) = ln_recip_gamma(arg);
                let lt = lr + kf * ln_az - ln_fact;
                let s = if z < 0.0 && k % 2 == 1 { -sign } else { sign };
                Dd::new(s * lt.exp())
            };
            let t = term.hi.abs();
            if !t.is_finite() {
                break;
            }
            sum = sum + term;
            plain += term.hi;
            abs_sum += t;
            max_term = max_term.max(t);
            // Terms decay super-geometrically once k! dominates; stop after
            // several consecutive negligible terms (1/Γ has isolated zeros).
            let scale = sum.hi.abs().max(max_term * f64::EPSILON);
            if k > 2 && t <= 1e-3 * f64::EPSILON * scale && (1.0 - beta) * kf.ln() > ln_az {
                small_run += 1;
                if small_run >= 3 {
                    let value = match self.working_precision {
                        WorkingPrecision::Compensated => sum.to_f64(),
                        WorkingPrecision::Standard => plain,
                    };
                    let err = match self.working_precision {
                        WorkingPrecision::Compensated => 4.0 * f64::EPSILON * max_term,
                        WorkingPrecision::Standard => (kf + 4.0) * f64::EPSILON * abs_sum,
                    };
                    if err <= self.series_tol * value.abs() || (value == 0.0 && max_term == 0.0) {
                        return Ok(value);
                    }
                    return Err(Error::NonConvergence {
                        what: "wright_phi",
                        arg: z,
                        detail: format!(
                            "series cancellation {:.1e} exceeds precision budget",
                            max_term / value.abs()
                        ),
                    });
                }
            } else {
                small_run = 0;
            }
        }
        Err(Error::NonConvergence {
            what: "wright_phi",
            arg: z,
            detail: format!("series did not settle within {} terms", self.max_terms),
        })
    }

    /// Steepest-descent contour evaluation of `φ(-β, μ; -x)` for `x > 0`.
    /// Reliable once `βx` is of order one or larger; for smaller `x` and `β`
    /// near 1 the integrand oscillates far above the result, so [`Self::phi`]
    /// keeps such arguments on the series.
    pub fn contour(&self, mu: f64, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain("contour branch requires a negative argument"));
        }
        let beta = self.beta;
        let one_mu = 1.0 - mu;
        let mut p = Saddle::new(beta, x);
        // Scale by the largest log-integrand over a coarse grid; for small x
        // the peak sits away from θ = 0.
        let shift = (0..=64)
            .map(|i| p.log_size((i as f64 + 0.5) * PI / 65.0, one_mu))
            .fold(p.log_size(0.0, one_mu), f64::max);
        if shift < -760.0 {
            return Ok(0.0);
        }
        p.shift = shift;
        let h = 1.0 / (beta * p.y + 1.0).sqrt();
        let mut pts = vec![0.0];
        let mut b = h;
        while b < PI {
            pts.push(b);
            b *= 2.0;
        }
        pts.push(PI);
        let width = PI / (2.0 * PI * beta * p.y + 1.0).sqrt();
        // The exponent is a difference of terms of size Y, so the integrand
        // itself carries a relative error of about eps * Y.
        let noise = 8.0 * f64::EPSILON * (1.0 + p.y + shift.abs());
        let cfg = QuadratureConfig {
            rel_tol: (0.25 * self.series_tol).max(2.5e-15).max(noise),
            abs_tol: (0.1 * self.series_tol).max(3e-14).max(noise) * width,
            max_panels: 400,
            tail_safety: 1.0,
        };
        let est = integrate(|th| Ok(p.integrand(th, one_mu)), &pts, &cfg).map_err(|e| {
            Error::NonConvergence {
                what: "wright_phi",
                arg: -x,
                detail: format!("contour quadrature: {e}"),
            }
        })?;
        if est.value == 0.0 {
            return Ok(0.0);
        }
        let ln = shift + est.value.abs().ln() - PI.ln();
        Ok(est.value.signum() * ln.exp())
    }
}

impl WrightEval {
    /// `φ(-β, μ; z)` for `0 < z ≤ 50` from the Hankel loop collapsed onto
    /// the negative axis around a circle of radius `ρ`:
    ///
    /// ```text
    /// φ = π⁻¹ ∫_ρ^∞ e^{-r + z r^β cos πβ} r^{-μ} sin(πμ - z r^β sin πβ) dr
    ///   + π⁻¹ ∫_0^π Re[ e^{σ + zσ^β} σ^{1-μ} ]_{σ = ρe^{iθ}} dθ.
    /// ```
    ///
    /// Used where the series cancels, which happens for `β ≥ 1/2` as φ
    /// oscillates and decays along the positive axis. Accuracy is limited to
    /// about 1e-11 relative even when `series_tol` asks for more.
    pub fn cut_integral(&self, mu: f64, z: f64) -> Result<f64> {
        if !(z > 0.0 && z <= POSITIVE_LIMIT) {
            return Err(Error::domain(format!("cut integral needs 0 < z <= {POSITIVE_LIMIT}, got {z}")));
        }
        let beta = self.beta;
        // Keeps z ρ^β ≤ 1 so the circle contributes O(1) terms.
        let rho = (1.0 + z).powf(-1.0 / beta).min(0.5);
        let (sb, cb) = (PI * beta).sin_cos();
        let ray = |r: f64| -> f64 {
            let zr = z * r.powf(beta);
            (-r + zr * cb - mu * r.ln()).exp() * (PI * mu - zr * sb).sin()
        };
        let arc = |th: f64| -> f64 {
            let (s1, c1) = th.sin_cos();
            let (s2, c2) = (beta * th).sin_cos();
            let zr = z * rho.powf(beta);
            let re = rho * c1 + zr * c2;
            let im = rho * s1 + zr * s2 + (1.0 - mu) * th;
            (re + (1.0 - mu) * rho.ln()).exp() * im.cos()
        };
        // Past r_max the ray integrand is below e^{-60} of its largest value.
        let log_ray = |r: f64| -r + z * r.powf(beta) * cb.max(0.0) - mu * r.ln();
        let mut peak = log_ray(rho);
        let mut pts = vec![rho];
        let mut r = rho;
        while pts.len() < 200 {
            r = (2.0 * r).min(r + 8.0);
            pts.push(r);
            let l = log_ray(r);
            peak = peak.max(l);
            if l < peak - 60.0 - (1.0 / self.series_tol).ln() && r > 4.0 {
                break;
            }
        }
        // Each piece is asked for roundoff-level absolute accuracy relative to
        // its own magnitude; the combined check below decides acceptance.
        let arc_size = (rho + z * rho.powf(beta) + (1.0 - mu) * rho.ln()).exp();
        let cfg = |size: f64| QuadratureConfig {
            rel_tol: (0.1 * self.series_tol).max(2.5e-15),
            abs_tol: (0.01 * self.series_tol).max(1000.0 * f64::EPSILON) * size,
            max_panels: 800,
            tail_safety: 1.0,
        };
        let fail = |e: Error| Error::NonConvergence {
            what: "wright_phi",
            arg: z,
            detail: format!("cut integral: {e}"),
        };
        let a = integrate(|r| Ok(ray(r)), &pts, &cfg(peak.exp())).map_err(fail)?;
        let b = integrate(|t| Ok(arc(t)), &[0.0, 0.5 * PI, PI], &cfg(arc_size)).map_err(fail)?;
        let value = (a.value + b.value) / PI;
        let err = (a.error + b.error) / PI;
        // Both pieces are O(1) while φ can be 1e-4, so the attainable
        // relative accuracy here is about 1e-11.
        if !(err <= self.series_tol.max(2e-11) * value.abs()) {
            return Err(Error::NonConvergence {
                what: "wright_phi",
                arg: z,
                detail: format!("cut integral error {err:.1e} exceeds tolerance for value {value:.3e}"),
            });
        }
        Ok(value)
    }
}

/// Geometry of the steepest-descent path for a fixed `x = -z > 0`.
struct Saddle {
    beta: f64,
    ln_x: f64,
    ln_r0: f64,
    y: f64,
    /// Log-scale removed from the integrand.
    shift: f64,
}

impl Saddle {
    fn new(beta: f64, x: f64) -> Self {
        let ln_r0 = (x * beta).ln() / (1.0 - beta);
        let y = ln_r0.exp() * (1.0 - beta) / beta;
        Saddle {
            beta,
            ln_x: x.ln(),
            ln_r0,
            y,
            shift: 0.0,
        }
    }

    /// `(ln r(θ), E(θ))`, with the θ → 0 limits.
    fn path(&self, th: f64) -> (f64, f64) {
        let beta = self.beta;
        if th == 0.0 {
            return (self.ln_r0, -self.y);
        }
        let sb = (beta * th).sin();
        let ln_r = (self.ln_x + sb.ln() - th.sin().ln()) / (1.0 - beta);
        let e = -ln_r.exp() * ((1.0 - beta) * th).sin() / sb;
        (ln_r, e)
    }

    /// `E(θ) + (1-μ) ln r(θ)`, the log of the integrand without its bracket.
    fn log_size(&self, th: f64, one_mu: f64) -> f64 {
        let (ln_r, e) = self.path(th);
        e + one_mu * ln_r
    }

    /// Integrand divided by `exp(shift)`.
    fn integrand(&self, th: f64, one_mu: f64) -> f64 {
        let beta = self.beta;
        let (ln_r, e) = self.path(th);
        // Arrange the large terms so they cancel before exponentiation.
        let expo = (e + self.y) + (one_mu * ln_r - (self.shift + self.y));
        if !(expo > -745.0) {
            return 0.0;
        }
        let dlnr = if th < 0.05 {
            let t2 = th * th;
            let b2 = beta * beta;
            th * ((1.0 - b2) / 3.0
                + t2 * ((1.0 - b2 * b2) / 45.0 + t2 * 2.0 * (1.0 - b2 * b2 * b2) / 945.0))
                / (1.0 - beta)
        } else {
            (beta / (beta * th).tan() - 1.0 / th.tan()) / (1.0 - beta)
        };
        let w = one_mu * th;
        expo.exp() * (dlnr * w.sin() + w.cos())
    }
}

/// Leading term of the large-`x` asymptotic expansion of `φ(-β, μ; -x)`:
/// `r0^{1-μ} e^{-Y} / sqrt(2πβY)` with `r0 = (βx)^{1/(1-β)}`.
pub fn leading_asymptotic(beta: f64, mu: f64, x: f64) -> f64 {
    let p = Saddle::new(beta, x);
    ((1.0 - mu) * p.ln_r0 - p.y - 0.5 * (2.0 * PI * beta * p.y).ln()).exp()
}

/// Stretched-exponential exponent `Y(x) = (1-β)/β (βx)^{1/(1-β)}`, so that
/// `φ(-β, μ; -x) ~ exp(-Y)` up to algebraic factors.
pub fn decay_exponent(beta: f64, x: f64) -> f64 {
    (1.0 - beta) / beta * (beta * x).powf(1.0 / (1.0 - beta))
}

/// Smallest `|z| ≥ 1/β` (on a 1/8 grid) where the series loses more digits to
/// cancellation than the tolerance allows, estimated for `μ = 0` from the
/// largest term and the leading asymptotic size of the result.
fn default_threshold(beta: f64, series_tol: f64, prec: WorkingPrecision) -> f64 {
    let budget = match prec {
        WorkingPrecision::Compensated => series_tol / (4.0 * f64::EPSILON),
        WorkingPrecision::Standard => series_tol / (64.0 * f64::EPSILON),
    };
    let ln_budget = budget.max(1.0).ln();
    // The asymptotic size estimate only means something once r0 > 1.
    let mut x = (1.0 / beta).max(0.125);
    while x < 400.0 {
        let ln_max = ln_max_term(beta, 0.0, x);
        let ln_val = -decay_exponent(beta, x) + ((beta * x).ln() / (1.0 - beta))
            - 0.5 * (2.0 * PI * beta * decay_exponent(beta, x)).ln();
        if ln_max - ln_val > ln_budget {
            return x.max(0.125);
        }
        x += 0.125;
    }
    400.0
}

fn ln_max_term(beta: f64, mu: f64, x: f64) -> f64 {
    let ln_x = x.ln();
    let mut best = f64::NEG_INFINITY;
    let mut ln_fact = 0.0;
    for k in 0..2000 {
        let kf = k as f64;
        if k > 0 {
            ln_fact += kf.ln();
        }
        let (lr, _) = ln_recip_gamma(mu - beta * kf);
        let lt = lr + kf * ln_x - ln_fact;
        if lt.is_finite() {
            best = best.max(lt);
        }
        if k > 8 && lt < best - 60.0 {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

    #[test]
    fn zero_argument_is_first_coefficient() {
        let w = WrightEval::new(0.5).unwrap();
        assert_eq!(w.phi(0.5, 0.0).unwrap(), INV_SQRT_PI);
        assert_eq!(w.phi(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(w.phi(-2.0, 0.0).unwrap(), 0.0);
        assert_eq!(w.phi_dz(1.0, 0.0).unwrap(), recip_gamma(0.5));
    }

    #[test]
    fn half_order_closed_form_both_branches() {
        let w = WrightEval::new(0.5).unwrap();
        for i in 0..=80 {
            let x = 0.25 * i as f64;
            let exact = (-x * x / 4.0).exp() * INV_SQRT_PI;
            let v = w.phi(0.5, -x).unwrap();
            assert!((v - exact).abs() <= 1e-11 * exact, "x={x}: {v} vs {exact}");
            if x > 0.0 {
                let c = w.contour(0.5, x).unwrap();
                assert!((c - exact).abs() <= 1e-11 * exact, "contour x={x}");
            }
        }
    }

    #[test]
    fn series_and_contour_overlap() {
        for &beta in &[0.25, 0.4, 0.6, 0.75] {
            let w = WrightEval::new(beta).unwrap();
            for &mu in &[-1.5, -0.5, 0.0, 0.3, 1.0] {
                for &x in &[0.5, 1.0, 2.0, 3.0] {
                    let Ok(s) = w.series(mu, -x) else { continue };
                    let c = w.contour(mu, x).unwrap();
                    let tol = 1e-11 * s.abs().max(1e-3 * leading_asymptotic(beta, mu, x).abs());
                    assert!((s - c).abs() <= tol, "beta={beta} mu={mu} x={x}: {s} vs {c}");
                }
            }
        }
    }

    #[test]
    fn cut_integral_on_positive_axis() {
        // Beyond z ≈ 5 the Gaussian decay outruns the O(1) integrand and the
        // branch reports non-convergence instead.
        let w = WrightEval::new(0.5).unwrap();
        for i in 1..=20 {
            let z = 0.25 * i as f64;
            let exact = (-z * z / 4.0).exp() * INV_SQRT_PI;
            let c = w.cut_integral(0.5, z).unwrap();
            assert!((c - exact).abs() <= 1e-10 * exact, "z={z}: {c} vs {exact}");
        }
        let w = WrightEval::new(0.3).unwrap();
        for &mu in &[-1.2, 0.0, 0.7, 1.0, 2.4] {
            for &z in &[0.3, 1.0, 2.5] {
                let s = w.series(mu, z).unwrap();
                let c = w.cut_integral(mu, z).unwrap();
                assert!((s - c).abs() <= 1e-10 * s.abs(), "mu={mu} z={z}: {s} vs {c}");
            }
        }
    }

    #[test]
    fn asymptotic_leading_term_is_consistent() {
        let w = WrightEval::new(0.4).unwrap();
        let x = 40.0;
        let v = w.phi(0.2, -x).unwrap();
        let a = leading_asymptotic(0.4, 0.2, x);
        assert!((v / a - 1.0).abs() < 0.05);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let w = WrightEval::new(0.35).unwrap();
        let (mu, z, h) = (0.4, -2.0, 1e-5);
        let fd = (w.phi(mu, z + h).unwrap() - w.phi(mu, z - h).unwrap()) / (2.0 * h);
        assert!((w.phi_dz(mu, z).unwrap() - fd).abs() < 1e-8);
    }

    #[test]
    fn invalid_configuration_rejected() {
        assert!(WrightEval::new(1.0).is_err());
        assert!(WrightEval::with_tol(0.5, 0.0).is_err());
        let mut w = WrightEval::new(0.5).unwrap();
        w.max_terms = 10;
        assert!(w.validate().is_err());
    }

    #[test]
    fn large_positive_argument_is_reported() {
        let w = WrightEval::new(0.5).unwrap();
        assert!(matches!(w.phi(0.5, 80.0), Err(Error::NonConvergence { .. })));
    }
}
