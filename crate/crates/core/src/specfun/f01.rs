//! Confluent hypergeometric limit function `₀F₁(ν; z)`.
//!
//! Positive arguments use the plain series (all terms positive). Negative
//! arguments are oscillatory, `₀F₁(ν; -X²/4) = Γ(ν) (X/2)^{1-ν} J_{ν-1}(X)`;
//! the series is summed in double-double up to `|z| = bessel_switch`, and
//! the Hankel expansion of `J` is used beyond.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::dd::Dd;
use super::gamma::{gamma, ln_gamma};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F01Eval {
    pub series_tol: f64,
    pub max_terms: usize,
    /// `|z|` beyond which negative arguments use the Hankel expansion.
    pub bessel_switch: f64,
}

impl Default for F01Eval {
    fn default() -> Self {
        F01Eval {
            series_tol: 1e-14,
            max_terms: 2000,
            bessel_switch: 200.0,
        }
    }
}

impl F01Eval {
    pub fn new(series_tol: f64, max_terms: usize) -> Result<Self> {
        if !(series_tol > 0.0) {
            return Err(Error::config("series_tol must be positive"));
        }
        if max_terms == 0 {
            return Err(Error::config("max_terms must be positive"));
        }
        Ok(F01Eval {
            series_tol,
            max_terms,
            ..Default::default()
        })
    }

    pub fn eval(&self, nu: f64, z: f64) -> Result<f64> {
        if !(nu > 0.0) || !z.is_finite() {
            return Err(Error::domain(format!("0F1 requires nu > 0 and finite z (nu={nu:?}, z={z:?})")));
        }
        if z == 0.0 {
            Ok(1.0)
        } else if z > 0.0 {
            self.positive_series(nu, z)
        } else if -z <= self.bessel_switch {
            self.compensated_series(nu, z)
        } else {
            self.hankel(nu, z)
        }
    }

    fn positive_series(&self, nu: f64, z: f64) -> Result<f64> {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..self.max_terms {
            let kf = k as f64;
            term *= z / ((kf + nu) * (kf + 1.0));
            sum += term;
            if !sum.is_finite() {
                return Err(Error::NonConvergence {
                    what: "0F1",
                    arg: z,
                    detail: "overflow".into(),
                });
            }
            // Remaining tail is bounded by a geometric series once ratios drop below 1/2.
            let ratio = z / ((kf + 1.0 + nu) * (kf + 2.0));
            if ratio < 0.5 && term <= 0.5 * self.series_tol * sum {
                return Ok(sum);
            }
        }
        Err(Error::NonConvergence {
            what: "0F1",
            arg: z,
            detail: format!("series exceeded {} terms", self.max_terms),
        })
    }

    fn compensated_series(&self, nu: f64, z: f64) -> Result<f64> {
        let zd = Dd::new(z);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        let mut max_term = 1.0f64;
        for k in 0..self.max_terms {
            let kf = k as f64;
            let denom = Dd::new(kf + nu).mul_f64(kf + 1.0);
            term = term * (zd / denom);
            sum = sum + term;
            let t = term.hi.abs();
            max_term = max_term.max(t);
            let ratio = -z / ((kf + 1.0 + nu) * (kf + 2.0));
            if ratio < 0.5 && t <= 1e-3 * self.series_tol * sum.hi.abs().max(1e-300) {
                let s = sum.to_f64();
                // Each double-double term carries ~k·1e-32 relative rounding.
                let err = max_term * 4e-32 * (k as f64 + 1.0);
                if err > self.series_tol * s.abs() {
                    return Err(Error::NonConvergence {
                        what: "0F1",
                        arg: z,
                        detail: format!("cancellation {:.1e} exhausts precision", max_term / s.abs()),
                    });
                }
                return Ok(s);
            }
        }
        Err(Error::NonConvergence {
            what: "0F1",
            arg: z,
            detail: format!("series exceeded {} terms", self.max_terms),
        })
    }

    fn hankel(&self, nu: f64, z: f64) -> Result<f64> {
        let x = 2.0 * (-z).sqrt();
        let order = nu - 1.0;
        let j = bessel_j_hankel(order, x, self.series_tol).ok_or_else(|| Error::NonConvergence {
            what: "0F1",
            arg: z,
            detail: "Hankel expansion did not reach tolerance".into(),
        })?;
        // Γ(ν) (X/2)^{1-ν} in log form to avoid overflow for large ν.
        let scale = if nu < 170.0 {
            gamma(nu) * (0.5 * x).powf(1.0 - nu)
        } else {
            (ln_gamma(nu) + (1.0 - nu) * (0.5 * x).ln()).exp()
        };
        Ok(scale * j)
    }
}

/// Hankel asymptotic expansion of `J_λ(x)` for large `x`; `None` if the
/// smallest term does not reach `tol`.
fn bessel_j_hankel(order: f64, x: f64, tol: f64) -> Option<f64> {
    let mu = 4.0 * order * order;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k / x^k, without the alternating sign
    let mut last = f64::INFINITY;
    let mut converged = false;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (kf * 8.0 * x);
        let mag = a.abs();
        if mag > last {
            break;
        }
        last = mag;
        // k = 1,2,3,4,... contributes to Q(+), P(-), Q(-), P(+), ...
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * a;
        } else {
            p += sign * a;
        }
        if mag < 0.1 * tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let chi = x - (0.5 * order * PI + FRAC_PI_4);
    Some((2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin()))
}

/// `₀F₁(ν; z)` with default settings.
pub fn f01(nu: f64, z: f64) -> Result<f64> {
    F01Eval::default().eval(nu, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_and_bessel_values() {
        let cfg = F01Eval::default();
        assert_eq!(cfg.eval(1.0, 0.0).unwrap(), 1.0);
        // I0(2), J0(2)
        assert!((cfg.eval(1.0, 1.0).unwrap() - 2.279_585_302_336_067_3).abs() < 1e-14);
        assert!((cfg.eval(1.0, -1.0).unwrap() - 0.223_890_779_141_235_67).abs() < 1e-15);
    }

    #[test]
    fn series_and_hankel_agree_across_switch() {
        let series = F01Eval {
            bessel_switch: 1e9,
            ..F01Eval::default()
        };
        let hankel = F01Eval {
            bessel_switch: 1.0,
            ..F01Eval::default()
        };
        for &nu in &[1.0, 2.0, 3.5, 5.0] {
            for &z in &[-120.0, -160.0, -200.0] {
                let a = series.eval(nu, z).unwrap();
                let b = hankel.eval(nu, z).unwrap();
                let scale = gamma(nu) * (-z).sqrt().powf(0.5 - nu);
                assert!((a - b).abs() < 1e-11 * scale, "nu={nu} z={z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn derivative_identity() {
        // d/dz 0F1(ν; z) = 0F1(ν+1; z)/ν
        let cfg = F01Eval::default();
        for &(nu, z) in &[(1.0, 3.0), (2.0, -7.5), (1.5, -40.0)] {
            let h = 1e-5;
            let fd = (cfg.eval(nu, z + h).unwrap() - cfg.eval(nu, z - h).unwrap()) / (2.0 * h);
            let exact = cfg.eval(nu + 1.0, z).unwrap() / nu;
            assert!((fd - exact).abs() < 1e-8 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_nonpositive_nu() {
        assert!(matches!(f01(0.0, 1.0), Err(Error::Domain(_))));
    }
}
