use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of `∂^α u + b ∂^β u - u_xx + c u = f` with `β = α/2`.
///
/// Derived constants are computed on construction and kept private so they
/// cannot drift from `(α, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct TelegraphParams {
    alpha: f64,
    beta: f64,
    b: f64,
    c: f64,
    b1: f64,
    a: f64,
    n: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawParams {
    alpha: f64,
    b: f64,
    c: f64,
}

impl TryFrom<RawParams> for TelegraphParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        TelegraphParams::new(r.alpha, r.b, r.c)
    }
}

impl From<TelegraphParams> for RawParams {
    fn from(p: TelegraphParams) -> Self {
        RawParams {
            alpha: p.alpha,
            b: p.b,
            c: p.c,
        }
    }
}

impl TelegraphParams {
    pub fn new(alpha: f64, b: f64, c: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::config(format!("alpha must lie in (0,2), got {alpha}")));
        }
        if !b.is_finite() || !c.is_finite() {
            return Err(Error::config("b and c must be finite"));
        }
        let b1 = -0.5 * b;
        Ok(TelegraphParams {
            alpha,
            beta: 0.5 * alpha,
            b,
            c,
            b1,
            a: b1 * b1 - c,
            n: if alpha <= 1.0 { 1 } else { 2 },
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    /// `-b/2`.
    pub fn b1(&self) -> f64 {
        self.b1
    }
    /// `b1² - c`.
    pub fn a(&self) -> f64 {
        self.a
    }
    /// Number of initial conditions: 1 for `α ≤ 1`, else 2.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `ρ_β(y) = (1-β)(β/y)^{β/(1-β)}`, the far-field decay rate of the
    /// kernel in `|x|^{1/(1-β)}`.
    pub fn rho(&self, y: f64) -> f64 {
        let beta = self.beta;
        (1.0 - beta) * (beta / y).powf(beta / (1.0 - beta))
    }

    /// Exponential growth rate in `τ` of `e^{b1 τ} h0(x, τ)`.
    pub fn tau_growth(&self) -> f64 {
        self.b1 + self.a.max(0.0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants() {
        let p = TelegraphParams::new(1.4, 1.0, 0.5).unwrap();
        assert_eq!(p.beta(), 0.7);
        assert_eq!(p.b1(), -0.5);
        assert_eq!(p.a(), -0.25);
        assert_eq!(p.n(), 2);
        assert_eq!(TelegraphParams::new(1.0, 0.0, 0.0).unwrap().n(), 1);
    }

    #[test]
    fn rejects_out_of_range_order() {
        assert!(TelegraphParams::new(2.0, 0.0, 0.0).is_err());
        assert!(TelegraphParams::new(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn serde_recomputes_derived_fields() {
        let p: TelegraphParams = serde_json::from_str(r#"{"alpha":0.8,"b":0.5,"c":0.25}"#).unwrap();
        assert_eq!(p, TelegraphParams::new(0.8, 0.5, 0.25).unwrap());
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"alpha":0.8,"b":0.5,"c":0.25}"#);
        assert!(serde_json::from_str::<TelegraphParams>(r#"{"alpha":3,"b":0,"c":0}"#).is_err());
    }
}
