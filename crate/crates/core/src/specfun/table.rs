//! Piecewise Chebyshev tables for `w ↦ φ(-β, μ; -w)`, `w ≥ 0`, at fixed `(β, μ)`.
//!
//! Quadratures over the kernel variable evaluate the Wright function at
//! thousands of points for a handful of `μ` values, so each `(β, μ)` pair is
//! tabulated once. Below `w = 1/β` the table stores `φ` itself. Beyond it,
//! it stores `φ` divided by its leading asymptotic form, which tends to 1, on
//! panels graded geometrically in `r0 = (βw)^{1/(1-β)}`. Panels are split
//! until the Chebyshev tail and off-node checkpoints meet the tolerance.

use std::f64::consts::PI;

use super::wright::{leading_asymptotic, WrightEval};
use crate::error::{Error, Result};

const NODES: usize = 20;
const MAX_PANELS: usize = 400;

#[derive(Debug, Clone)]
struct Panel {
    lo: f64,
    hi: f64,
    scaled: bool,
    coef: Vec<f64>,
}

impl Panel {
    fn eval(&self, w: f64) -> f64 {
        let t = (2.0 * w - self.lo - self.hi) / (self.hi - self.lo);
        clenshaw(&self.coef, t)
    }
}

#[derive(Debug, Clone)]
pub struct WrightTable {
    beta: f64,
    mu: f64,
    panels: Vec<Panel>,
    /// Beyond this point evaluation falls back to the direct method.
    w_max: f64,
    direct: WrightEval,
}

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

fn chebyshev_fit<F>(lo: f64, hi: f64, f: &mut F) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let n = NODES;
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut vals = Vec::with_capacity(n);
    for j in 0..n {
        let t = (PI * (j as f64 + 0.5) / n as f64).cos();
        vals.push(f(mid + half * t)?);
    }
    let mut coef = vec![0.0; n];
    for (k, ck) in coef.iter_mut().enumerate() {
        let s: f64 = vals
            .iter()
            .enumerate()
            .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
            .sum();
        *ck = 2.0 * s / n as f64;
    }
    coef[0] *= 0.5;
    Ok(coef)
}

impl WrightTable {
    /// Tabulate to relative accuracy `tol` (measured against the size of
    /// the stored values on each panel). `tol` should exceed the accuracy of
    /// `cfg` by an order of magnitude.
    pub fn build(cfg: &WrightEval, mu: f64, tol: f64) -> Result<Self> {
        let beta = cfg.beta;
        let direct = *cfg;
        let w1 = 1.0 / beta;
        let ratio = 2f64.powf(1.0 - beta);
        // Stop well before φ leaves the normal double range.
        let mut w_max = w1;
        while leading_asymptotic(beta, mu, ratio * w_max) > 1e-280 && w_max < 1e6 {
            w_max *= ratio;
        }
        let stored = |w: f64, scaled: bool| -> Result<f64> {
            let v = direct.phi(mu, -w)?;
            Ok(if scaled { v / leading_asymptotic(beta, mu, w) } else { v })
        };
        let plain = (w1 / 0.5).ceil();
        let mut todo: Vec<(f64, f64)> = (0..plain as usize)
            .map(|i| (w1 * i as f64 / plain, w1 * (i + 1) as f64 / plain))
            .collect();
        let mut b = w1;
        while b < w_max {
            let next = ratio * b;
            todo.push((b, next));
            b = next;
        }
        w_max = b;
        todo.reverse();
        let mut panels = Vec::new();
        while let Some((lo, hi)) = todo.pop() {
            if panels.len() + todo.len() > MAX_PANELS {
                return Err(Error::NonConvergence {
                    what: "wright_table",
                    arg: mu,
                    detail: format!("more than {MAX_PANELS} panels for beta={beta}"),
                });
            }
            let scaled = lo >= w1 * (1.0 - 1e-12);
            let coef = chebyshev_fit(lo, hi, &mut |w| stored(w, scaled))?;
            let panel = Panel {
                lo,
                hi,
                scaled,
                coef,
            };
            let scale = panel.coef.iter().map(|c| c.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
            let mut worst: f64 = 0.0;
            for &t in &[-0.93, -0.41, 0.17, 0.66, 0.98] {
                let w = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
                let d = (panel.eval(w) - stored(w, scaled)?).abs();
                worst = if d.is_nan() { f64::INFINITY } else { worst.max(d) };
            }
            if !scale.is_finite() || worst == f64::INFINITY {
                return Err(Error::NonConvergence {
                    what: "wright_table",
                    arg: mu,
                    detail: format!("non-finite values on [{lo}, {hi}] for beta={beta}"),
                });
            }
            let tail = panel.coef[NODES - 3..].iter().map(|c| c.abs()).sum::<f64>();
            if worst <= tol * scale && tail <= tol * scale {
                panels.push(panel);
            } else {
                let mid = 0.5 * (lo + hi);
                todo.push((mid, hi));
                todo.push((lo, mid));
            }
        }
        Ok(WrightTable {
            beta,
            mu,
            panels,
            w_max,
            direct,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `φ(-β, μ; -w)` for `w ≥ 0`.
    pub fn eval(&self, w: f64) -> Result<f64> {
        if !(w >= 0.0) {
            return Err(Error::domain(format!("wright table needs w >= 0, got {w}")));
        }
        if w >= self.w_max {
            return self.direct.phi(self.mu, -w);
        }
        // Panels are sorted by construction (depth-first from the left).
        let i = self.panels.partition_point(|p| p.hi <= w).min(self.panels.len() - 1);
        let p = &self.panels[i];
        let v = p.eval(w);
        Ok(if p.scaled {
            v * leading_asymptotic(self.beta, self.mu, w)
        } else {
            v
        })
    }

    pub fn panels(&self) -> usize {
        self.panels.len()
    }
}
