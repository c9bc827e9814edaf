//! Solution representations for the Cauchy problem, the half-strip problems
//! `P_i` and the rectangle problems `P_ij`:
//!
//! ```text
//! u(x, y) = Σ_k ∫ τ_k(t) [D^{α-k} + (2-k) b D^{β-k}] G(x, y; t, 0) dt
//!         + ∫_0^y ∫ G(x, y; t, s) f(t, s) dt ds  + boundary terms,
//! ```
//!
//! with `G = Γ(x - t, y - s)` on the line and the image-series Green
//! functions otherwise. The boundary terms are
//! `(-1)^i ∫_0^y ∂t^{1-i} G(x, y; a1, s) φ1(s) ds` at `a1` and
//! `-(-1)^j ∫_0^y ∂t^{1-j} G(x, y; a2, s) φ2(s) ds` at `a2`.
//!
//! Because the image sums act on the source point only, the data terms
//! equal whole-line integrals of the signed periodic extension of the data
//! against `Γ`. Writing `Γ` as its `τ` integral and swapping the order,
//!
//! ```text
//! ∫ E(t) D^ν Γ(x - t, y) dt = ½ ∫_0^∞ D^ν g(y, τ) ∫_{x-τ}^{x+τ} h0(x - t, τ) E(t) dt dτ,
//! ```
//!
//! so each data term costs one `τ` quadrature with a finite inner integral.
//! [`Solver::initial_term_direct`] keeps the unswapped form, which sums the
//! Green function images explicitly, as an independent check.

mod data;
mod field;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use data::{Data1, Data2, GrowthEnvelope, ProblemSpec, Variant};
pub use field::{FieldMeta, GridSpec, ScalarField};

use crate::error::{Error, Result};
use crate::green::{images_needed_deriv, rect_image_sum, Green, ImageSeriesConfig, Truncation};
use crate::kernel::{initial_terms, DecayBound, Kernel, TelegraphParams};
use crate::quad::{graded_points, integrate, with_breaks, QuadratureConfig};
use crate::specfun::decay_exponent;
use data::{Extended, ExtendedSource, Extension};

/// Tolerances for the three nested layers of a solution evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// The `τ` quadratures inside the kernel.
    pub kernel: QuadratureConfig,
    /// Finite spatial integrals nested inside a `τ` quadrature.
    pub inner: QuadratureConfig,
    /// Time integrals (source and boundary terms) and the direct
    /// spatial integrals.
    pub outer: QuadratureConfig,
    pub images: ImageSeriesConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            kernel: QuadratureConfig {
                rel_tol: 1e-10,
                abs_tol: 1e-15,
                ..QuadratureConfig::default()
            },
            inner: QuadratureConfig {
                rel_tol: 1e-11,
                abs_tol: 1e-15,
                ..QuadratureConfig::default()
            },
            outer: QuadratureConfig {
                rel_tol: 1e-8,
                abs_tol: 1e-11,
                max_panels: 4000,
                ..QuadratureConfig::default()
            },
            images: ImageSeriesConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn validated(self) -> Result<Self> {
        self.kernel.validated()?;
        self.inner.validated()?;
        self.outer.validated()?;
        self.images.validated()?;
        Ok(self)
    }
}

/// A solution value with the image-series truncation used by its boundary
/// terms (rectangle problems only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointValue {
    pub value: f64,
    pub truncation: Option<Truncation>,
}

impl PointValue {
    fn plain(value: f64) -> Self {
        PointValue { value, truncation: None }
    }
}

fn merge(a: Option<Truncation>, b: Truncation) -> Option<Truncation> {
    Some(match a {
        None => b,
        Some(a) => Truncation {
            images: a.images.max(b.images),
            capped: a.capped || b.capped,
        },
    })
}

/// Initial-data weight `[D^{α-k} + (2-k) b D^{β-k}] G(x, y; t, 0)` of a
/// kernel (free space) or Green function, as a function of the source point.
pub trait SpatialKernel: Sync {
    fn initial_weight(&self, k: usize, x: f64, y: f64, t: f64) -> Result<f64>;
}

/// The fundamental solution on the whole line.
pub struct FreeSpace<'a>(pub &'a Kernel);

impl SpatialKernel for FreeSpace<'_> {
    fn initial_weight(&self, k: usize, x: f64, y: f64, t: f64) -> Result<f64> {
        self.0.initial_kernel(k, x - t, y)
    }
}

/// The half-strip Green function `G_i`.
pub struct HalfStripKernel<'a> {
    pub kernel: &'a Kernel,
    pub i: u8,
    pub a1: f64,
}

impl SpatialKernel for HalfStripKernel<'_> {
    fn initial_weight(&self, k: usize, x: f64, y: f64, t: f64) -> Result<f64> {
        let sign = crate::green::reflection_sign(self.i);
        Ok(self.kernel.initial_kernel(k, x - t, y)? + sign * self.kernel.initial_kernel(k, x + t - 2.0 * self.a1, y)?)
    }
}

/// The rectangle Green function `G_ij`, truncated by the tail bound of the
/// weighted kernel.
pub struct RectKernel<'a> {
    pub kernel: &'a Kernel,
    pub i: u8,
    pub j: u8,
    pub a1: f64,
    pub a2: f64,
    pub images: ImageSeriesConfig,
}

impl SpatialKernel for RectKernel<'_> {
    fn initial_weight(&self, k: usize, x: f64, y: f64, t: f64) -> Result<f64> {
        let p = self.kernel.params();
        let len = self.a2 - self.a1;
        // the weight is dominated by its most singular order
        let nu = initial_terms(p, k)?.iter().fold(f64::NEG_INFINITY, |m, t| m.max(t.1));
        let trunc = images_needed_deriv(p, &self.kernel.decay_envelope(), &self.images, 0, nu, len, y);
        let kernel = self.kernel;
        rect_image_sum(self.i, self.j, self.a1, len, x, t, trunc.images, |z| kernel.initial_kernel(k, z, y), false)
    }
}

/// `[D^{α-k} + (2-k) b D^{β-k}]` applied to a kernel or Green function.
pub fn initial_kernel<K: SpatialKernel + ?Sized>(green_eval: &K, k: usize, x: f64, y: f64, t: f64) -> Result<f64> {
    green_eval.initial_weight(k, x, y, t)
}

/// Number of geometric grading levels toward `σ = 0` needed to resolve a
/// kernel centred at distance `dist`: below `σ_min = (dist / w_cut)^{1/β}`
/// the Wright factor is under `e^{-50}`.
fn grading_levels(beta: f64, dist: f64, span: f64) -> usize {
    if dist <= 0.0 {
        return 60;
    }
    let mut w_cut = 1.0;
    while decay_exponent(beta, w_cut) < 50.0 {
        w_cut *= 1.5;
    }
    let sigma_min = (dist / w_cut).powf(1.0 / beta);
    ((span / sigma_min).log2().ceil().max(0.0) as usize).clamp(4, 60)
}

#[derive(Debug, Clone)]
pub struct Solver {
    green: Green,
    cfg: SolverConfig,
}

impl Solver {
    pub fn new(params: TelegraphParams, cfg: SolverConfig) -> Result<Self> {
        let cfg = cfg.validated()?;
        let kernel = Kernel::new(params, cfg.kernel)?;
        Ok(Solver {
            green: Green::new(kernel, cfg.images)?,
            cfg,
        })
    }

    pub fn with_decay_bound(params: TelegraphParams, cfg: SolverConfig, bound: DecayBound) -> Result<Self> {
        let cfg = cfg.validated()?;
        let kernel = Kernel::new(params, cfg.kernel)?.with_decay_bound(bound);
        Ok(Solver {
            green: Green::new(kernel, cfg.images)?,
            cfg,
        })
    }

    pub fn kernel(&self) -> &Kernel {
        self.green.kernel()
    }

    pub fn green(&self) -> &Green {
        &self.green
    }

    pub fn params(&self) -> &TelegraphParams {
        self.kernel().params()
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// `u(x, y)` for any problem variant.
    ///
    /// At `y = 0` the value is `τ1(x)`; on a wall with a value condition
    /// it is the boundary datum. Neither goes through quadrature.
    pub fn solve(&self, spec: &ProblemSpec, x: f64, y: f64) -> Result<PointValue> {
        let p = *self.params();
        spec.validate(&p)?;
        if !spec.variant.contains(x) {
            return Err(Error::domain(format!("x = {x} is outside the spatial domain")));
        }
        if !(y >= 0.0 && y <= spec.t_max) {
            return Err(Error::domain(format!("y = {y} is outside [0, T = {}]", spec.t_max)));
        }
        if y == 0.0 {
            return Ok(PointValue::plain(spec.tau1.eval(x)?));
        }
        let wall = |d: &Option<Data1>| -> Result<f64> { d.as_ref().map_or(Ok(0.0), |d| d.eval(y)) };
        match spec.variant {
            Variant::HalfStrip { i: 0, a1 } | Variant::Rect { i: 0, a1, .. } if x == a1 => {
                return Ok(PointValue::plain(wall(&spec.phi1)?));
            }
            Variant::Rect { j: 0, a2, .. } if x == a2 => return Ok(PointValue::plain(wall(&spec.phi2)?)),
            _ => {}
        }
        let mut value = self.initial_term(spec, 1, x, y)?;
        if p.n() == 2 {
            value += self.initial_term(spec, 2, x, y)?;
        }
        value += self.source_term(spec, x, y)?;
        let b = self.boundary_term(spec, x, y)?;
        Ok(PointValue {
            value: value + b.value,
            truncation: b.truncation,
        })
    }

    pub fn solve_cauchy(&self, spec: &ProblemSpec, x: f64, y: f64) -> Result<f64> {
        if spec.variant != Variant::Cauchy {
            return Err(Error::config("solve_cauchy needs a Cauchy problem"));
        }
        Ok(self.solve(spec, x, y)?.value)
    }

    pub fn solve_half(&self, spec: &ProblemSpec, x: f64, y: f64) -> Result<f64> {
        if !matches!(spec.variant, Variant::HalfStrip { .. }) {
            return Err(Error::config("solve_half needs a half-strip problem"));
        }
        Ok(self.solve(spec, x, y)?.value)
    }

    pub fn solve_rect(&self, spec: &ProblemSpec, x: f64, y: f64) -> Result<PointValue> {
        if !matches!(spec.variant, Variant::Rect { .. }) {
            return Err(Error::config("solve_rect needs a rectangle problem"));
        }
        self.solve(spec, x, y)
    }

    fn datum(spec: &ProblemSpec, k: usize) -> Result<&Data1> {
        match k {
            1 => Ok(&spec.tau1),
            2 => spec.tau2.as_ref().ok_or_else(|| Error::config("tau2 is required when alpha > 1")),
            _ => Err(Error::domain(format!("initial condition index k={k} not in 1..=2"))),
        }
    }

    /// Bound on `ln |∫_{x-τ}^{x+τ} h0 E dt|` up to algebraic factors.
    fn spread_log_bound(&self, spec: &ProblemSpec, x: f64, tau: f64) -> f64 {
        let p = self.params();
        let reach = match spec.variant {
            Variant::Cauchy => x.abs() + tau,
            Variant::HalfStrip { a1, .. } => x.abs() + tau + 2.0 * a1.abs(),
            Variant::Rect { a1, a2, .. } => a1.abs().max(a2.abs()),
        };
        p.a().max(0.0).sqrt() * tau + spec.growth.log_bound(p.beta(), reach)
    }

    /// `∫_{x-τ}^{x+τ} h0(x - t, τ) e(t) dt`.
    fn spread<E>(&self, ext: &Extension, kinks: &[f64], x: f64, tau: f64, mut e: E) -> Result<f64>
    where
        E: FnMut(f64) -> Result<f64>,
    {
        if tau <= 0.0 {
            return Ok(0.0);
        }
        let (lo, hi) = (x - tau, x + tau);
        let pts = with_breaks(lo, hi, &ext.breakpoints(lo, hi, kinks));
        let kernel = self.kernel();
        let flat = self.params().a() == 0.0;
        let est = integrate(
            |t| {
                let h0 = if flat { 1.0 } else { kernel.h0_l1k(0, 0, x - t, tau)? };
                Ok(h0 * e(t)?)
            },
            &pts,
            &self.cfg.inner,
        )?;
        Ok(est.value)
    }

    /// Contribution of `τ_k` (`k ∈ {1, 2}`), by the swapped-order form.
    pub fn initial_term(&self, spec: &ProblemSpec, k: usize, x: f64, y: f64) -> Result<f64> {
        let p = self.params();
        let data = Self::datum(spec, k)?;
        let terms = initial_terms(p, k)?;
        let ext = Extension::new(&spec.variant);
        let src = Extended {
            ext,
            data,
            growth: &spec.growth,
            beta: p.beta(),
            what: if k == 1 { "tau1" } else { "tau2" },
        };
        let v = self.kernel().tau_integral_env(
            &terms,
            y,
            0.0,
            |tau| self.spread_log_bound(spec, x, tau),
            |tau| self.spread(&ext, data.kinks(), x, tau, |t| src.eval(t)),
        )?;
        Ok(0.5 * v)
    }

    /// Contribution of `τ_k` from the Green function weights directly:
    /// `∫ τ_k(t) [D^{α-k} + (2-k) b D^{β-k}] G(x, y; t, 0) dt`.
    pub fn initial_term_direct(&self, spec: &ProblemSpec, k: usize, x: f64, y: f64) -> Result<f64> {
        let p = *self.params();
        let data = Self::datum(spec, k)?;
        let kernel = self.kernel();
        let scale = y.powf(p.beta());
        let (lo, hi, weight): (f64, f64, Box<dyn SpatialKernel + '_>) = match spec.variant {
            Variant::Cauchy => {
                let r = self.window_radius(spec, k, x, y)?;
                (x - r, x + r, Box::new(FreeSpace(kernel)))
            }
            Variant::HalfStrip { i, a1 } => {
                let r = self.window_radius(spec, k, x, y)?;
                (a1, x + r, Box::new(HalfStripKernel { kernel, i, a1 }))
            }
            Variant::Rect { i, j, a1, a2 } => (
                a1,
                a2,
                Box::new(RectKernel {
                    kernel,
                    i,
                    j,
                    a1,
                    a2,
                    images: self.cfg.images,
                }),
            ),
        };
        let mut extra: Vec<f64> = data.kinks().to_vec();
        extra.push(x);
        for e in -4..8 {
            let d = scale * 2f64.powi(e);
            extra.push(x - d);
            extra.push(x + d);
        }
        let pts = with_breaks(lo, hi, &extra);
        let growth = &spec.growth;
        let est = integrate(
            |t| {
                let v = growth.admit(p.beta(), "tau", t, data.eval(t)?)?;
                Ok(v * initial_kernel(weight.as_ref(), k, x, y, t)?)
            },
            &pts,
            &self.cfg.outer,
        )?;
        Ok(est.value)
    }

    /// Half-width of the window beyond which the weighted kernel times the
    /// data envelope is below the outer tolerance.
    fn window_radius(&self, spec: &ProblemSpec, k: usize, x: f64, y: f64) -> Result<f64> {
        let p = self.params();
        let nu = initial_terms(p, k)?.iter().fold(f64::NEG_INFINITY, |m, t| m.max(t.1));
        let beta = p.beta();
        let at = |r: f64| {
            DecayBound::shape(p, 0, nu, 0.0, r, y).ln() + spec.growth.log_bound(beta, x.abs() + r)
                - spec.growth.log_bound(beta, x.abs())
        };
        let base = at(0.0);
        let cut = (self.cfg.outer.rel_tol * 1e-2).ln();
        let mut r = y.powf(beta);
        for _ in 0..200 {
            if at(r) - base < cut {
                return Ok(r);
            }
            r *= 1.25;
        }
        Err(Error::GrowthViolation(format!(
            "data envelope does not decay against the kernel at (x={x:?}, y={y:?})"
        )))
    }

    /// `∫_0^y ∫ G(x, y; t, s) f(t, s) dt ds`, integrated in
    /// `v = (y - s)^α` so the `(y - s)^{α-1}` endpoint behaviour becomes
    /// regular.
    pub fn source_term(&self, spec: &ProblemSpec, x: f64, y: f64) -> Result<f64> {
        let Some(f) = &spec.f else {
            return Ok(0.0);
        };
        let p = self.params();
        let alpha = p.alpha();
        let ext = Extension::new(&spec.variant);
        let src = ExtendedSource {
            ext,
            data: f,
            growth: &spec.growth,
            beta: p.beta(),
        };
        let kernel = self.kernel();
        let v_max = y.powf(alpha);
        let pts = graded_points(0.0, v_max, 8, 0.5, false);
        let est = integrate(
            |v| {
                if v <= 0.0 {
                    return Ok(0.0);
                }
                let sigma = v.powf(1.0 / alpha);
                let s = (y - sigma).max(0.0);
                let inner = kernel.tau_integral_env(
                    &[(1.0, 0.0)],
                    sigma,
                    0.0,
                    |tau| self.spread_log_bound(spec, x, tau),
                    |tau| self.spread(&ext, &[], x, tau, |t| src.eval(t, s)),
                )?;
                Ok(0.5 * inner * sigma / (alpha * v))
            },
            &pts,
            &self.cfg.outer,
        )?;
        Ok(est.value)
    }

    /// Boundary-data terms of the half-strip and rectangle problems.
    pub fn boundary_term(&self, spec: &ProblemSpec, x: f64, y: f64) -> Result<PointValue> {
        let beta = self.params().beta();
        let g = &self.green;
        let mut out = PointValue::plain(0.0);
        match spec.variant {
            Variant::Cauchy => {}
            Variant::HalfStrip { i, a1 } => {
                if let Some(phi) = &spec.phi1 {
                    let sign = if i == 0 { 1.0 } else { -1.0 };
                    out.value = sign
                        * self.wall_integral(beta, x - a1, y, |sigma| {
                            let kv = if i == 0 {
                                g.half_dt(0, a1, x, sigma, a1, 0.0)?
                            } else {
                                g.half(1, a1, x, sigma, a1, 0.0)?
                            };
                            Ok(kv * phi.eval(y - sigma)?)
                        })?;
                }
            }
            Variant::Rect { i, j, a1, a2 } => {
                let mut trunc: Option<Truncation> = None;
                let mut wall = |phi: &Data1, at: f64, idx: u8, sign: f64, dist: f64| -> Result<f64> {
                    let v = self.wall_integral(beta, dist, y, |sigma| {
                        let gv = if idx == 0 {
                            g.rect_dt(i, j, a1, a2, x, sigma, at, 0.0)?
                        } else {
                            g.rect(i, j, a1, a2, x, sigma, at, 0.0)?
                        };
                        trunc = merge(trunc, gv.truncation);
                        Ok(gv.value * phi.eval(y - sigma)?)
                    })?;
                    Ok(sign * v)
                };
                let mut total = 0.0;
                if let Some(phi) = &spec.phi1 {
                    total += wall(phi, a1, i, if i == 0 { 1.0 } else { -1.0 }, x - a1)?;
                }
                if let Some(phi) = &spec.phi2 {
                    total += wall(phi, a2, j, if j == 0 { -1.0 } else { 1.0 }, a2 - x)?;
                }
                out = PointValue {
                    value: total,
                    truncation: trunc,
                };
            }
        }
        Ok(out)
    }

    /// `∫_0^y K(σ) dσ` over the elapsed time `σ = y - s`, graded toward
    /// `σ = 0` where a kernel centred `dist` away from the wall peaks.
    fn wall_integral<K>(&self, beta: f64, dist: f64, y: f64, mut k: K) -> Result<f64>
    where
        K: FnMut(f64) -> Result<f64>,
    {
        let levels = grading_levels(beta, dist, y);
        let pts = graded_points(0.0, y, levels, 0.5, false);
        let est = integrate(
            |sigma| if sigma <= 0.0 { Ok(0.0) } else { k(sigma) },
            &pts,
            &self.cfg.outer,
        )?;
        Ok(est.value)
    }

    /// Evaluate on a grid, concurrently. Points are independent; the first
    /// failure in grid order is reported with its location.
    pub fn eval_field(&self, spec: &ProblemSpec, grid: &GridSpec) -> Result<ScalarField> {
        let grid = grid.validated()?;
        spec.validate(self.params())?;
        let results: Vec<Result<PointValue>> = (0..grid.len())
            .into_par_iter()
            .map(|n| self.solve(spec, grid.x(n % grid.nx), grid.y(n / grid.nx)))
            .collect();
        let completed = results.iter().filter(|r| r.is_ok()).count();
        let mut values = Vec::with_capacity(grid.len());
        let mut trunc: Option<Truncation> = None;
        for (n, r) in results.into_iter().enumerate() {
            match r {
                Ok(v) => {
                    if let Some(t) = v.truncation {
                        trunc = merge(trunc, t);
                    }
                    values.push(v.value);
                }
                Err(e) => {
                    return Err(Error::AtPoint {
                        x: grid.x(n % grid.nx),
                        y: grid.y(n / grid.nx),
                        completed,
                        total: grid.len(),
                        source: Box::new(e),
                    })
                }
            }
        }
        let mut meta = FieldMeta {
            source: "solve".into(),
            ..FieldMeta::default()
        };
        meta.settings.insert("params".into(), serde_json::to_value(self.params()).expect("params serialize"));
        meta.settings.insert("config".into(), serde_json::to_value(self.cfg).expect("config serializes"));
        meta.settings.insert("variant".into(), serde_json::to_value(spec.variant).expect("variant serializes"));
        if let Some(t) = trunc {
            meta.settings.insert("max_images".into(), t.images.into());
            if t.capped {
                meta.warnings.push(format!(
                    "image series capped at {} images; the tail bound was not met",
                    t.images
                ));
            }
        }
        ScalarField::new(grid, values, meta)
    }
}

/// `u(x, y)` of a Cauchy problem with default solver settings apart from `q`.
pub fn solve_cauchy(p: &TelegraphParams, q: &QuadratureConfig, spec: &ProblemSpec, x: f64, y: f64) -> Result<f64> {
    let cfg = SolverConfig {
        kernel: *q,
        ..SolverConfig::default()
    };
    Solver::new(*p, cfg)?.solve_cauchy(spec, x, y)
}

/// `u(x, y)` of a half-strip problem.
pub fn solve_half(
    p: &TelegraphParams,
    q: &QuadratureConfig,
    cfg: &ImageSeriesConfig,
    spec: &ProblemSpec,
    x: f64,
    y: f64,
) -> Result<f64> {
    let c = SolverConfig {
        kernel: *q,
        images: *cfg,
        ..SolverConfig::default()
    };
    Solver::new(*p, c)?.solve_half(spec, x, y)
}

/// `u(x, y)` of a rectangle problem, with truncation metadata.
pub fn solve_rect(
    p: &TelegraphParams,
    q: &QuadratureConfig,
    cfg: &ImageSeriesConfig,
    spec: &ProblemSpec,
    x: f64,
    y: f64,
) -> Result<PointValue> {
    let c = SolverConfig {
        kernel: *q,
        images: *cfg,
        ..SolverConfig::default()
    };
    Solver::new(*p, c)?.solve_rect(spec, x, y)
}

/// Field of any problem variant on `grid`.
pub fn eval_field(
    p: &TelegraphParams,
    q: &QuadratureConfig,
    cfg: &ImageSeriesConfig,
    spec: &ProblemSpec,
    grid: &GridSpec,
) -> Result<ScalarField> {
    let c = SolverConfig {
        kernel: *q,
        images: *cfg,
        ..SolverConfig::default()
    };
    Solver::new(*p, c)?.eval_field(spec, grid)
}
