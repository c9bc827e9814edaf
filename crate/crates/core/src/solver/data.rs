//! Problem data: callable data functions, the growth envelope, problem
//! specifications, and the signed periodic extensions that turn half-strip
//! and rectangle problems into whole-line integrals.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exprparse::{Bindings, Expr, Var};
use crate::green::{reflection_sign, BoundaryKind};
use crate::kernel::TelegraphParams;

type Fn1 = dyn Fn(f64) -> Result<f64> + Send + Sync;
type Fn2 = dyn Fn(f64, f64) -> Result<f64> + Send + Sync;

/// A function of one variable. Implementations must be safe to call
/// concurrently; `kinks` lists points where it is not smooth, which the
/// quadratures use as panel boundaries.
#[derive(Clone)]
pub struct Data1 {
    f: Arc<Fn1>,
    kinks: Arc<[f64]>,
    label: String,
}

impl fmt::Debug for Data1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Data1({})", self.label)
    }
}

impl Data1 {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        Data1 {
            f: Arc::new(f),
            kinks: Arc::from(Vec::new()),
            label: label.into(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Data1::new(format!("{c}"), move |_| Ok(c))
    }

    /// An expression in the single variable `var`; any other variable is
    /// reported as unbound at evaluation time.
    pub fn from_expr(e: Expr, var: Var) -> Self {
        let label = e.to_string();
        Data1::new(label, move |v| {
            let b = match var {
                Var::X => Bindings::new().x(v),
                Var::Y => Bindings::new().y(v),
                Var::T => Bindings::new().t(v),
                Var::S => Bindings::new().s(v),
            };
            Ok(e.eval(&b)?)
        })
    }

    /// Piecewise-linear interpolation of samples `(xs[i], vs[i])`, held
    /// constant beyond the first and last abscissa.
    pub fn sampled(label: impl Into<String>, xs: Vec<f64>, vs: Vec<f64>) -> Result<Self> {
        if xs.is_empty() || xs.len() != vs.len() {
            return Err(Error::config("sampled data needs equally many abscissae and values, at least one"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || xs.iter().chain(&vs).any(|v| !v.is_finite()) {
            return Err(Error::config("sampled data abscissae must be finite and strictly increasing"));
        }
        let kinks: Arc<[f64]> = Arc::from(xs.clone());
        let f = move |x: f64| -> Result<f64> {
            let n = xs.len();
            if x <= xs[0] {
                return Ok(vs[0]);
            }
            if x >= xs[n - 1] {
                return Ok(vs[n - 1]);
            }
            let i = xs.partition_point(|&p| p <= x);
            let (x0, x1) = (xs[i - 1], xs[i]);
            let r = (x - x0) / (x1 - x0);
            Ok(vs[i - 1] + r * (vs[i] - vs[i - 1]))
        };
        Ok(Data1 {
            f: Arc::new(f),
            kinks,
            label: label.into(),
        })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = (self.f)(x)?;
        if !v.is_finite() {
            return Err(Error::domain(format!("data `{}` is not finite at {x:?}", self.label)));
        }
        Ok(v)
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// A function of `(x, y)`, used for the source term.
#[derive(Clone)]
pub struct Data2 {
    f: Arc<Fn2>,
    label: String,
}

impl fmt::Debug for Data2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Data2({})", self.label)
    }
}

impl Data2 {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    {
        Data2 {
            f: Arc::new(f),
            label: label.into(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Data2::new(format!("{c}"), move |_, _| Ok(c))
    }

    pub fn from_expr(e: Expr) -> Self {
        let label = e.to_string();
        Data2::new(label, move |x, y| Ok(e.eval(&Bindings::new().x(x).y(y))?))
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let v = (self.f)(x, y)?;
        if !v.is_finite() {
            return Err(Error::domain(format!("source `{}` is not finite at ({x}, {y})", self.label)));
        }
        Ok(v)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Declared bound `|data(x)| ≤ K exp(ρ |x|^{1/(1-β)})` on the initial data
/// and the source. The representation needs `ρ` below
/// `(1-β)(β/T)^{β/(1-β)}`; the bound is enforced by checking every data
/// value the quadratures request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthEnvelope {
    pub constant: f64,
    pub rho: f64,
}

impl Default for GrowthEnvelope {
    fn default() -> Self {
        GrowthEnvelope {
            constant: 1e6,
            rho: 0.0,
        }
    }
}

impl GrowthEnvelope {
    /// Largest admissible `ρ` for horizon `t_max`.
    pub fn rho_limit(p: &TelegraphParams, t_max: f64) -> f64 {
        p.rho(t_max)
    }

    pub fn check(&self, p: &TelegraphParams, t_max: f64) -> Result<()> {
        if !(self.constant > 0.0) || !self.constant.is_finite() {
            return Err(Error::config("growth envelope constant must be positive and finite"));
        }
        let limit = Self::rho_limit(p, t_max);
        if !(self.rho >= 0.0 && self.rho < limit) {
            return Err(Error::GrowthViolation(format!(
                "declared growth rate rho={} must lie in [0, {limit}) for T={t_max}",
                self.rho
            )));
        }
        Ok(())
    }

    /// `ln(K exp(ρ |x|^ε))`.
    pub fn log_bound(&self, beta: f64, x: f64) -> f64 {
        self.constant.ln() + self.rho * x.abs().powf(1.0 / (1.0 - beta))
    }

    pub(crate) fn admit(&self, beta: f64, what: &str, x: f64, v: f64) -> Result<f64> {
        if v.abs().ln() > self.log_bound(beta, x) {
            return Err(Error::GrowthViolation(format!(
                "|{what}| = {v:e} at x = {x} exceeds the envelope {:e} exp({} |x|^{})",
                self.constant,
                self.rho,
                1.0 / (1.0 - beta)
            )));
        }
        Ok(v)
    }
}

/// Problem geometry and boundary-condition indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Variant {
    Cauchy,
    HalfStrip { i: u8, a1: f64 },
    Rect { i: u8, j: u8, a1: f64, a2: f64 },
}

impl Variant {
    pub fn boundary(&self) -> Option<BoundaryKind> {
        match *self {
            Variant::Cauchy => None,
            Variant::HalfStrip { i, .. } => Some(BoundaryKind { i, j: None }),
            Variant::Rect { i, j, .. } => Some(BoundaryKind { i, j: Some(j) }),
        }
    }

    /// Whether `x` lies in the closed spatial domain.
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Variant::Cauchy => x.is_finite(),
            Variant::HalfStrip { a1, .. } => x >= a1 && x.is_finite(),
            Variant::Rect { a1, a2, .. } => x >= a1 && x <= a2,
        }
    }
}

/// A problem for the telegraph equation: geometry, horizon `T`, initial
/// data `τ1` (and `τ2` when `α > 1`), boundary data `φ1` at `a1` and `φ2`
/// at `a2`, and the source `f`. Absent boundary data and source are zero.
///
/// Index 0 prescribes `u` on the wall; index 1 prescribes `u_x`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub variant: Variant,
    pub t_max: f64,
    pub tau1: Data1,
    pub tau2: Option<Data1>,
    pub phi1: Option<Data1>,
    pub phi2: Option<Data1>,
    pub f: Option<Data2>,
    pub growth: GrowthEnvelope,
}

impl ProblemSpec {
    pub fn new(variant: Variant, t_max: f64, tau1: Data1) -> Self {
        ProblemSpec {
            variant,
            t_max,
            tau1,
            tau2: None,
            phi1: None,
            phi2: None,
            f: None,
            growth: GrowthEnvelope::default(),
        }
    }

    pub fn cauchy(t_max: f64, tau1: Data1) -> Self {
        Self::new(Variant::Cauchy, t_max, tau1)
    }

    pub fn half(i: u8, a1: f64, t_max: f64, tau1: Data1) -> Self {
        Self::new(Variant::HalfStrip { i, a1 }, t_max, tau1)
    }

    pub fn rect(i: u8, j: u8, a1: f64, a2: f64, t_max: f64, tau1: Data1) -> Self {
        Self::new(Variant::Rect { i, j, a1, a2 }, t_max, tau1)
    }

    pub fn with_tau2(mut self, d: Data1) -> Self {
        self.tau2 = Some(d);
        self
    }

    pub fn with_phi1(mut self, d: Data1) -> Self {
        self.phi1 = Some(d);
        self
    }

    pub fn with_phi2(mut self, d: Data1) -> Self {
        self.phi2 = Some(d);
        self
    }

    pub fn with_source(mut self, d: Data2) -> Self {
        self.f = Some(d);
        self
    }

    pub fn with_growth(mut self, g: GrowthEnvelope) -> Self {
        self.growth = g;
        self
    }

    pub fn validate(&self, p: &TelegraphParams) -> Result<()> {
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(Error::config(format!("time horizon T must be positive, got {}", self.t_max)));
        }
        match (p.n(), self.tau2.is_some()) {
            (2, false) => return Err(Error::config("alpha > 1 needs the initial derivative tau2")),
            (1, true) => return Err(Error::config("tau2 is only used when alpha > 1")),
            _ => {}
        }
        match self.variant {
            Variant::Cauchy => {
                if self.phi1.is_some() || self.phi2.is_some() {
                    return Err(Error::config("the Cauchy problem takes no boundary data"));
                }
            }
            Variant::HalfStrip { i, a1 } => {
                BoundaryKind::half(i)?;
                if !a1.is_finite() {
                    return Err(Error::config("half-strip needs a finite a1"));
                }
                if self.phi2.is_some() {
                    return Err(Error::config("the half-strip has no second wall (phi2 given)"));
                }
            }
            Variant::Rect { i, j, a1, a2 } => {
                BoundaryKind::rect(i, j)?;
                if !(a1 < a2) || !a1.is_finite() || !a2.is_finite() {
                    return Err(Error::config(format!("rectangle needs finite a1 < a2 (a1={a1}, a2={a2})")));
                }
            }
        }
        self.growth.check(p, self.t_max)
    }
}

/// Signed extension `E` of data given on the domain to the whole line, so
/// that `∫_domain G(x, y; t, s) d(t) dt = ∫_R Γ(x - t, y - s) E(t) dt`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Extension {
    Identity,
    /// `E(t) = d(t)` for `t ≥ a1`, `σ_i d(2a1 - t)` below.
    Half { a1: f64, sign: f64 },
    /// Reflections about both walls: period `2L`, factor `(-1)^{i+j}` per period.
    Rect { a1: f64, len: f64, sign: f64, alt: f64 },
}

impl Extension {
    pub(crate) fn new(v: &Variant) -> Self {
        match *v {
            Variant::Cauchy => Extension::Identity,
            Variant::HalfStrip { i, a1 } => Extension::Half {
                a1,
                sign: reflection_sign(i),
            },
            Variant::Rect { i, j, a1, a2 } => Extension::Rect {
                a1,
                len: a2 - a1,
                sign: reflection_sign(i),
                alt: if (i + j) % 2 == 0 { 1.0 } else { -1.0 },
            },
        }
    }

    /// Preimage of `t` in the domain and the sign carried by the extension.
    pub(crate) fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            Extension::Identity => (t, 1.0),
            Extension::Half { a1, sign } => {
                if t >= a1 {
                    (t, 1.0)
                } else {
                    (2.0 * a1 - t, sign)
                }
            }
            Extension::Rect { a1, len, sign, alt } => {
                let n = ((t - a1 + len) / (2.0 * len)).floor();
                let r = t - a1 - 2.0 * len * n;
                let period_sign = if alt < 0.0 && (n as i64).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
                if r >= 0.0 {
                    ((a1 + r).min(a1 + len), period_sign)
                } else {
                    ((a1 - r).min(a1 + len), period_sign * sign)
                }
            }
        }
    }

    /// Points in `(lo, hi)` where the extension of data with `kinks` may
    /// fail to be smooth: the walls and their images, and the images of
    /// the kinks.
    pub(crate) fn breakpoints(&self, lo: f64, hi: f64, kinks: &[f64]) -> Vec<f64> {
        let mut out = Vec::new();
        let mut push = |p: f64| {
            if p > lo && p < hi {
                out.push(p);
            }
        };
        match *self {
            Extension::Identity => kinks.iter().for_each(|&k| push(k)),
            Extension::Half { a1, .. } => {
                push(a1);
                for &k in kinks {
                    push(k);
                    push(2.0 * a1 - k);
                }
            }
            Extension::Rect { a1, len, .. } => {
                let n_lo = ((lo - a1) / len).floor() as i64 - 1;
                let n_hi = ((hi - a1) / len).ceil() as i64 + 1;
                for n in n_lo..=n_hi {
                    push(a1 + n as f64 * len);
                }
                let inside: Vec<f64> = kinks.iter().copied().filter(|&k| k > a1 && k < a1 + len).collect();
                if !inside.is_empty() {
                    let m_lo = ((lo - a1) / (2.0 * len)).floor() as i64 - 1;
                    let m_hi = ((hi - a1) / (2.0 * len)).ceil() as i64 + 1;
                    for m in m_lo..=m_hi {
                        let base = a1 + 2.0 * m as f64 * len;
                        for &k in &inside {
                            push(base + (k - a1));
                            push(base - (k - a1));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Extended initial datum with the growth check applied at the preimage.
pub(crate) struct Extended<'a> {
    pub ext: Extension,
    pub data: &'a Data1,
    pub growth: &'a GrowthEnvelope,
    pub beta: f64,
    pub what: &'static str,
}

impl Extended<'_> {
    pub(crate) fn eval(&self, t: f64) -> Result<f64> {
        let (t0, sign) = self.ext.map(t);
        let v = self.data.eval(t0)?;
        Ok(sign * self.growth.admit(self.beta, self.what, t0, v)?)
    }
}

/// Extended source at a fixed time `s`.
pub(crate) struct ExtendedSource<'a> {
    pub ext: Extension,
    pub data: &'a Data2,
    pub growth: &'a GrowthEnvelope,
    pub beta: f64,
}

impl ExtendedSource<'_> {
    pub(crate) fn eval(&self, t: f64, s: f64) -> Result<f64> {
        let (t0, sign) = self.ext.map(t);
        let v = self.data.eval(t0, s)?;
        Ok(sign * self.growth.admit(self.beta, "f", t0, v)?)
    }
}
