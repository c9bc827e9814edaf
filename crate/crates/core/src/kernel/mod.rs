//! Fundamental solution `Γ(x, y) = ½ ∫_{|x|}^∞ h0(x, τ) g(y, τ) dτ` and its
//! derivatives `∂x^m D^ν Γ`, where
//!
//! ```text
//! h0(x, τ) = ₀F₁(1; a(τ² - x²)/4),
//! D^ν g(y, τ) = e^{b1 τ} y^{-ν-1} φ(-β, -ν; -τ y^{-β})     (D^ν acts on y).
//! ```
//!
//! The `τ` integral is evaluated in the self-similar variable `w = τ y^{-β}`
//! and truncated where the stretched-exponential envelope of the Wright
//! factor has fallen below the tolerance.

mod bound;
mod h0;
mod params;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

pub use bound::{decay_bound, DecayBound, DEFAULT_DECAY_CONSTANT};
pub use params::TelegraphParams;

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadratureConfig};
use crate::specfun::{decay_exponent, F01Eval, WrightEval, WrightTable};
pub(crate) use h0::binomial;
use h0::H0Jet;

/// Largest spatial derivative order supported by [`Kernel::gamma_deriv`].
pub const MAX_M: usize = 2;
/// Largest power of `L1 = ∂τ + b1` supported by [`Kernel::h0_l1k`].
pub const MAX_K: usize = 4;

/// Evaluator for the fundamental solution of one parameter set.
#[derive(Debug, Clone)]
pub struct Kernel {
    params: TelegraphParams,
    quad: QuadratureConfig,
    wright: WrightEval,
    f01: F01Eval,
    bound: DecayBound,
    table_tol: f64,
    /// Wright tables by `μ` bit pattern, built on first use and never mutated.
    /// `None` records a `μ` for which the table could not be built.
    tables: Arc<RwLock<HashMap<u64, Option<Arc<WrightTable>>>>>,
}

/// Source of `φ(-β, μ; -w)` values inside a quadrature.
enum PhiSource<'a> {
    Table(Arc<WrightTable>),
    Direct(&'a WrightEval, f64),
}

impl PhiSource<'_> {
    fn eval(&self, w: f64) -> Result<f64> {
        match self {
            PhiSource::Table(t) => t.eval(w),
            PhiSource::Direct(e, mu) => e.phi(*mu, -w),
        }
    }
}

/// Smallest `k ≥ 0` with `β(k-1) < ν ≤ βk` (zero for `ν ≤ 0`).
pub fn lemma_k(beta: f64, nu: f64) -> usize {
    if nu <= 0.0 {
        0
    } else {
        let k = (nu / beta).ceil();
        // guard against ν/β landing a hair above an integer through rounding
        if beta * (k - 1.0) >= nu {
            (k - 1.0) as usize
        } else {
            k as usize
        }
    }
}

impl Kernel {
    pub fn new(params: TelegraphParams, quad: QuadratureConfig) -> Result<Self> {
        let quad = quad.validated()?;
        // Tables interpolate the direct evaluator, whose own accuracy is
        // limited to about 1e-12 for β near 1.
        let table_tol = (0.1 * quad.rel_tol).clamp(1e-11, 1e-8);
        Ok(Kernel {
            params,
            quad,
            wright: WrightEval::with_tol(params.beta(), (0.1 * table_tol).max(1e-12))?,
            f01: F01Eval::default(),
            bound: DecayBound::default(),
            table_tol,
            tables: Arc::default(),
        })
    }

    /// Cached table for `φ(-β, mu; ·)`, or the direct evaluator if the table
    /// cannot be built.
    fn phi_source(&self, mu: f64) -> PhiSource<'_> {
        let key = mu.to_bits();
        if let Some(entry) = self.tables.read().expect("table cache poisoned").get(&key) {
            return match entry {
                Some(t) => PhiSource::Table(Arc::clone(t)),
                None => PhiSource::Direct(&self.wright, mu),
            };
        }
        let built = WrightTable::build(&self.wright, mu, self.table_tol).ok().map(Arc::new);
        let mut map = self.tables.write().expect("table cache poisoned");
        match map.entry(key).or_insert(built) {
            Some(t) => PhiSource::Table(Arc::clone(t)),
            None => PhiSource::Direct(&self.wright, mu),
        }
    }

    pub fn with_decay_bound(mut self, bound: DecayBound) -> Self {
        self.bound = bound;
        self
    }

    pub fn params(&self) -> &TelegraphParams {
        &self.params
    }

    pub fn quad(&self) -> &QuadratureConfig {
        &self.quad
    }

    pub fn wright(&self) -> &WrightEval {
        &self.wright
    }

    /// `∂x^m L1^k h0(x, τ)` with `L1 = ∂τ + b1`.
    pub fn h0_l1k(&self, k: usize, m: usize, x: f64, tau: f64) -> Result<f64> {
        if k > MAX_K || m > MAX_M {
            return Err(Error::domain(format!("h0_l1k supports k <= {MAX_K}, m <= {MAX_M}")));
        }
        if !(tau >= x.abs()) {
            return Err(Error::domain(format!("h0_l1k requires tau >= |x| (x={x:?}, tau={tau:?})")));
        }
        let jet = H0Jet::new(&self.f01, self.params.a(), x, tau, k + m)?;
        Ok(jet.l1k(self.params.b1(), k, 0, m))
    }

    /// `D^ν g(y, τ) = e^{b1 τ} y^{-ν-1} φ(-β, -ν; -τ y^{-β})`.
    pub fn g_deriv(&self, nu: f64, y: f64, tau: f64) -> Result<f64> {
        if !(y > 0.0) || !(tau >= 0.0) {
            return Err(Error::domain(format!("g_deriv requires y > 0, tau >= 0 (y={y}, tau={tau})")));
        }
        let beta = self.params.beta();
        let w = tau * y.powf(-beta);
        let phi = self.wright.phi(-nu, -w)?;
        if phi == 0.0 {
            return Ok(0.0);
        }
        Ok(phi * (self.params.b1() * tau - (nu + 1.0) * y.ln()).exp())
    }

    /// `Γ(x, y)`.
    pub fn gamma_fs(&self, x: f64, y: f64) -> Result<f64> {
        self.gamma_deriv(0, 0.0, x, y)
    }

    /// `∂x^m D^ν Γ(x, y)`. The `m = 0` case integrates `h0 · D^ν g`
    /// directly; `m ≥ 1` goes through the integration-by-parts form with
    /// the smallest admissible `k` (see [`Kernel::gamma_deriv_parts`]).
    pub fn gamma_deriv(&self, m: usize, nu: f64, x: f64, y: f64) -> Result<f64> {
        self.gamma_combo(&[(1.0, nu)], m, x, y)
    }

    /// `Σ_j c_j ∂x^m D^{ν_j} Γ(x, y)` for `terms = [(c_j, ν_j)]`, sharing one
    /// `τ` quadrature when `m = 0`.
    pub fn gamma_combo(&self, terms: &[(f64, f64)], m: usize, x: f64, y: f64) -> Result<f64> {
        self.check_point(m, x, y)?;
        if m == 0 {
            let a = self.params.a();
            let f01 = &self.f01;
            let half = 0.5
                * self.tau_integral(terms, y, x.abs(), self.params.tau_growth(), |tau| {
                    Ok(H0Jet::new(f01, a, x, tau, 0)?.partial(0, 0))
                })?;
            return Ok(half);
        }
        let beta = self.params.beta();
        let mut sum = 0.0;
        for &(c, nu) in terms {
            if c != 0.0 {
                sum += c * self.gamma_deriv_parts(m, nu, x, y, lemma_k(beta, nu))?;
            }
        }
        Ok(sum)
    }

    /// `∂x^m D^ν Γ` after moving `k` factors `D^β` off `g` by parts:
    ///
    /// ```text
    /// 2 ∂x^m D^ν Γ = ∫_{|x|}^∞ ∂x^m L1^k h0 · D^{ν-βk} g dτ
    ///              - sgn(x) Σ_{j=1}^{m} T^{j-1}[ ∂x^{m-j} L1^k h0 · D^{ν-βk} g ]
    ///              + Σ_{i=1}^{k} T^m[ L1^{i-1} h0 · D^{ν-βi} g ],
    /// ```
    ///
    /// where `T^r[F] = ((∂x + sgn(x) ∂τ)^r F)(x, |x|)` is the derivative
    /// along the light cone `τ = |x|`.
    pub fn gamma_deriv_parts(&self, m: usize, nu: f64, x: f64, y: f64, k: usize) -> Result<f64> {
        self.check_point(m, x, y)?;
        if k > MAX_K {
            return Err(Error::domain(format!("integration-by-parts depth k <= {MAX_K}")));
        }
        let p = &self.params;
        let (beta, b1, a) = (p.beta(), p.b1(), p.a());
        let f01 = &self.f01;
        let mu = nu - beta * k as f64;
        let main = self.tau_integral(&[(1.0, mu)], y, x.abs(), p.tau_growth(), |tau| {
            Ok(H0Jet::new(f01, a, x, tau, k + m)?.l1k(b1, k, 0, m))
        })?;
        if m == 0 && k == 0 {
            return Ok(0.5 * main);
        }
        let s = if x > 0.0 { 1.0 } else { -1.0 };
        let ax = x.abs();
        let jet = H0Jet::new(f01, a, x, ax, k + 2 * m + 1)?;
        let mut edge = 0.0;
        for j in 1..=m {
            edge -= s * self.cone_derivative(&jet, j - 1, k, m - j, mu, y, s)?;
        }
        for i in 1..=k {
            edge += self.cone_derivative(&jet, m, i - 1, 0, nu - beta * i as f64, y, s)?;
        }
        Ok(0.5 * (main + edge))
    }

    /// `T^r[ ∂x^q L1^k h0 · D^μ g ]` at `τ = |x|`.
    #[allow(clippy::too_many_arguments)]
    fn cone_derivative(&self, jet: &H0Jet, r: usize, k: usize, q: usize, mu: f64, y: f64, s: f64) -> Result<f64> {
        let b1 = self.params.b1();
        let beta = self.params.beta();
        let tau = jet.tau();
        // ∂τ^c D^μ g = Σ_i C(c,i) b1^{c-i} (-1)^i D^{μ+iβ} g
        let mut g_shift = Vec::with_capacity(r + 1);
        for i in 0..=r {
            g_shift.push(self.g_deriv(mu + beta * i as f64, y, tau)?);
        }
        let g_dtau = |c: usize| -> f64 {
            (0..=c)
                .map(|i| {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    binomial(c, i) * b1.powi((c - i) as i32) * sign * g_shift[i]
                })
                .sum()
        };
        let mut total = 0.0;
        for ax in 0..=r {
            let rest = r - ax;
            let sp = s.powi(rest as i32);
            for bt in 0..=rest {
                total += binomial(r, ax)
                    * sp
                    * binomial(rest, bt)
                    * jet.l1k(b1, k, bt, q + ax)
                    * g_dtau(rest - bt);
            }
        }
        Ok(total)
    }

    fn check_point(&self, m: usize, x: f64, y: f64) -> Result<()> {
        if m > MAX_M {
            return Err(Error::domain(format!("spatial derivative order m <= {MAX_M}")));
        }
        if !(y > 0.0) || !y.is_finite() || !x.is_finite() {
            return Err(Error::domain(format!("kernel requires finite x and y > 0 (x={x:?}, y={y:?})")));
        }
        if m >= 1 && x == 0.0 {
            return Err(Error::domain("spatial derivatives of the kernel are undefined at x = 0"));
        }
        Ok(())
    }

    /// `∫_{τ_lo}^∞ h(τ) Σ_j c_j D^{ν_j} g(y, τ) dτ`, where `|h(τ)|` grows at
    /// most like `exp((growth - b1) τ)` up to algebraic factors.
    pub fn tau_integral<H>(&self, terms: &[(f64, f64)], y: f64, tau_lo: f64, growth: f64, h: H) -> Result<f64>
    where
        H: FnMut(f64) -> Result<f64>,
    {
        let rate = growth - self.params.b1();
        self.tau_integral_env(terms, y, tau_lo, |tau| rate * tau, h)
    }

    /// As [`Kernel::tau_integral`], with `log_h(τ)` bounding `ln |h(τ)|`
    /// up to algebraic factors and additive constants. The bound only
    /// steers where the integral is truncated.
    pub fn tau_integral_env<L, H>(&self, terms: &[(f64, f64)], y: f64, tau_lo: f64, log_h: L, mut h: H) -> Result<f64>
    where
        L: Fn(f64) -> f64,
        H: FnMut(f64) -> Result<f64>,
    {
        if !(y > 0.0) {
            return Err(Error::domain(format!("kernel requires y > 0 (y={y})")));
        }
        let beta = self.params.beta();
        let b1 = self.params.b1();
        let yb = y.powf(beta);
        let ln_y = y.ln();
        let w0 = tau_lo / yb;
        let pts = self.w_breakpoints(terms, ln_y, yb, w0, |tau| b1 * tau + log_h(tau));
        let sources: Vec<(f64, f64, PhiSource)> = terms
            .iter()
            .filter(|t| t.0 != 0.0)
            .map(|&(c, nu)| (c, nu, self.phi_source(-nu)))
            .collect();
        let integrand = |w: f64| -> Result<f64> {
            let tau = w * yb;
            let mut gsum = 0.0;
            for (c, nu, src) in &sources {
                let (c, nu) = (*c, *nu);
                let phi = src.eval(w)?;
                if phi != 0.0 {
                    gsum += c * phi * (b1 * tau - (nu + 1.0) * ln_y).exp();
                }
            }
            if gsum == 0.0 {
                return Ok(0.0);
            }
            Ok(yb * gsum * h(tau)?)
        };
        let est = integrate(integrand, &pts, &self.quad)?;
        Ok(est.value)
    }

    /// Panel boundaries in `w` out to the point where the integrand envelope
    /// has dropped by `ln(tail_safety / rel_tol)` plus a margin.
    fn w_breakpoints<L: Fn(f64) -> f64>(&self, terms: &[(f64, f64)], ln_y: f64, yb: f64, w0: f64, log_eh: L) -> Vec<f64> {
        let beta = self.params.beta();
        let cut = (self.quad.tail_safety / self.quad.rel_tol).ln() + 10.0;
        let env = |w: f64| -> f64 {
            let mut best = f64::NEG_INFINITY;
            for &(c, nu) in terms {
                if c == 0.0 {
                    continue;
                }
                let shape = if w > 1.0 {
                    let y = decay_exponent(beta, w);
                    (1.0 + nu) * (beta * w).ln() / (1.0 - beta) - y - 0.5 * (2.0 * PI * beta * y).ln()
                } else {
                    0.0
                };
                best = best.max(c.abs().ln() - (nu + 1.0) * ln_y + shape);
            }
            best + log_eh(w * yb)
        };
        let mut pts = vec![w0];
        let mut w = w0;
        let mut peak = env(w0);
        for _ in 0..400 {
            let slope = (beta * w).powf(beta / (1.0 - beta));
            let step = (4.0 / (1.0 + slope)).min(2.0);
            w += step;
            pts.push(w);
            let e = env(w);
            peak = peak.max(e);
            if e < peak - cut && w > 1.0 {
                break;
            }
        }
        pts
    }

    pub fn decay_envelope(&self) -> DecayBound {
        self.bound
    }

    /// Decay envelope for `|∂x^m D^ν Γ(x, y)|`; see [`decay_bound`].
    pub fn decay_bound(&self, m: usize, nu: f64, theta: f64, x: f64, y: f64) -> f64 {
        self.bound.eval(&self.params, m, nu, theta, x, y)
    }

    /// Initial-data weight `[D^{α-k} + (2-k) b D^{β-k}] Γ(x, y)` for `k ∈ {1, 2}`.
    pub fn initial_kernel(&self, k: usize, x: f64, y: f64) -> Result<f64> {
        self.gamma_combo(&initial_terms(&self.params, k)?, 0, x, y)
    }
}

/// Weighted orders `[(coef, ν)]` of the initial-data operator for `τ_k`.
pub fn initial_terms(p: &TelegraphParams, k: usize) -> Result<Vec<(f64, f64)>> {
    match k {
        1 => {
            let mut t = vec![(1.0, p.alpha() - 1.0)];
            if p.b() != 0.0 {
                t.push((p.b(), p.beta() - 1.0));
            }
            Ok(t)
        }
        2 if p.n() == 2 => Ok(vec![(1.0, p.alpha() - 2.0)]),
        _ => Err(Error::domain(format!("initial condition index k={k} not in 1..=n={}", p.n()))),
    }
}

/// `Γ(x, y)` for one-off evaluations.
pub fn gamma_fs(p: &TelegraphParams, q: &QuadratureConfig, x: f64, y: f64) -> Result<f64> {
    Kernel::new(*p, *q)?.gamma_fs(x, y)
}

/// `∂x^m D^ν Γ(x, y)` for one-off evaluations.
pub fn gamma_deriv(p: &TelegraphParams, q: &QuadratureConfig, m: usize, nu: f64, x: f64, y: f64) -> Result<f64> {
    Kernel::new(*p, *q)?.gamma_deriv(m, nu, x, y)
}

/// `∂x^m L1^k h0(x, τ)` for one-off evaluations.
pub fn h0_l1k(p: &TelegraphParams, k: usize, m: usize, x: f64, tau: f64) -> Result<f64> {
    Kernel::new(*p, QuadratureConfig::default())?.h0_l1k(k, m, x, tau)
}

/// `D^ν g(y, τ)` for one-off evaluations.
pub fn g_deriv(p: &TelegraphParams, nu: f64, y: f64, tau: f64) -> Result<f64> {
    Kernel::new(*p, QuadratureConfig::default())?.g_deriv(nu, y, tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kernel(alpha: f64, b: f64, c: f64) -> Kernel {
        Kernel::new(TelegraphParams::new(alpha, b, c).unwrap(), QuadratureConfig::default()).unwrap()
    }

    #[test]
    fn heat_kernel_reduction() {
        let k = kernel(1.0, 0.0, 0.0);
        for &(x, y) in &[(0.0f64, 1.0f64), (0.5, 0.3), (-2.0, 1.7)] {
            let exact = (-x * x / (4.0 * y)).exp() / (2.0 * (PI * y).sqrt());
            let v = k.gamma_fs(x, y).unwrap();
            assert!((v - exact).abs() < 1e-10 * exact, "({x},{y}): {v} vs {exact}");
        }
    }

    #[test]
    fn evenness_is_exact() {
        let k = kernel(0.7, 0.4, 0.3);
        assert_eq!(k.gamma_fs(0.8, 0.6).unwrap(), k.gamma_fs(-0.8, 0.6).unwrap());
    }

    #[test]
    fn lemma_k_selection() {
        assert_eq!(lemma_k(0.5, -0.3), 0);
        assert_eq!(lemma_k(0.5, 0.0), 0);
        assert_eq!(lemma_k(0.5, 0.5), 1);
        assert_eq!(lemma_k(0.5, 0.51), 2);
        assert_eq!(lemma_k(0.7, 0.4), 1);
    }

    #[test]
    fn direct_and_parts_paths_agree() {
        let k = kernel(1.4, 0.6, 0.3);
        let nu = 0.4;
        let direct = k.gamma_deriv(0, nu, 0.7, 0.5).unwrap();
        for depth in 0..=3 {
            let parts = k.gamma_deriv_parts(0, nu, 0.7, 0.5, depth).unwrap();
            assert!((direct - parts).abs() < 1e-9 * direct.abs(), "k={depth}: {direct} vs {parts}");
        }
    }

    #[test]
    fn spatial_derivatives_match_differences() {
        let k = kernel(0.8, 0.5, 0.25);
        let (x, y, h) = (0.6, 0.4, 1e-4);
        for &nu in &[0.0, -0.2, 0.3] {
            let f = |x: f64| k.gamma_deriv(0, nu, x, y).unwrap();
            let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
            let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            let g1 = k.gamma_deriv(1, nu, x, y).unwrap();
            let g2 = k.gamma_deriv(2, nu, x, y).unwrap();
            assert!((g1 - d1).abs() < 1e-6 * d1.abs().max(1.0), "nu={nu}: {g1} vs {d1}");
            assert!((g2 - d2).abs() < 1e-4 * d2.abs().max(1.0), "nu={nu}: {g2} vs {d2}");
            let gm = k.gamma_deriv(1, nu, -x, y).unwrap();
            assert!((gm + g1).abs() < 1e-9 * g1.abs());
        }
    }

    #[test]
    fn derivative_at_origin_is_domain_error() {
        let k = kernel(1.0, 0.0, 0.0);
        assert!(matches!(k.gamma_deriv(1, 0.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(k.gamma_fs(1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn g_deriv_edge_values() {
        let k = kernel(1.2, 0.3, 0.1);
        assert_eq!(k.g_deriv(0.0, 0.7, 0.0).unwrap(), 0.0);
        assert_eq!(k.g_deriv(1.0, 0.7, 0.0).unwrap(), 0.0);
        let v = k.g_deriv(0.4, 0.7, 0.0).unwrap();
        let expect = 0.7f64.powf(-1.4) * crate::specfun::recip_gamma(-0.4);
        assert!((v - expect).abs() < 1e-14 * expect.abs());
    }

    #[test]
    fn initial_terms_drop_b_for_second_condition() {
        let p = TelegraphParams::new(1.5, 0.7, 0.0).unwrap();
        assert_eq!(initial_terms(&p, 2).unwrap(), vec![(1.0, -0.5)]);
        assert_eq!(initial_terms(&p, 1).unwrap().len(), 2);
        let p1 = TelegraphParams::new(0.5, 0.7, 0.0).unwrap();
        assert!(initial_terms(&p1, 2).is_err());
    }
}
