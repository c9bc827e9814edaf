//! Finite-difference reference solver, independent of the kernel code.
//!
//! Caputo derivatives of order `ν ≤ 1` use the L1 scheme at `y_n` (order
//! 1 reduces to the backward difference). For `α ∈ (1, 2)` the derivative is
//! written as `D^{α-1}` of `u_y`, with `u_y` replaced by the difference
//! quotients `v^k = (u^k - u^{k-1})/Δy` and `v^0 = τ2`. This form is centred
//! between `y_{n-1}` and `y_n`. Every other term is weighted
//! `θ·(level n) + (1-θ)·(level n-1)`. Space uses central differences, with
//! second-order ghost points for derivative conditions. One tridiagonal
//! solve per level; the history sums are computed directly.
//!
//! Whole-line and half-line problems are cut to a finite window. The cut
//! edges carry the solution of the space-free scheme for the data found
//! at that edge. The window is then doubled and the problem re-solved; a
//! disagreement is reported as a warning on the field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{DecayBound, TelegraphParams};
use crate::solver::{Data1, Data2, FieldMeta, GridSpec, ProblemSpec, ScalarField, Variant};
use crate::specfun::gamma;

/// Time discretisation, fixed by `n = ⌈α⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    L1,
    Order2Time,
}

impl Scheme {
    pub fn for_params(p: &TelegraphParams) -> Self {
        if p.n() == 1 {
            Scheme::L1
        } else {
            Scheme::Order2Time
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FDConfig {
    /// Nodes in `x`, walls included.
    pub nx: usize,
    /// Levels in `y`, including `y = 0`.
    pub ny: usize,
    pub scheme: Scheme,
    /// Weight of the new level in all terms except `D^α`.
    pub theta: f64,
    /// `[x_lo, x_hi]` for whole-line problems, or the far edge for the
    /// half-line. Chosen from the data and the kernel decay when absent.
    pub window: Option<(f64, f64)>,
}

impl FDConfig {
    pub fn new(p: &TelegraphParams, nx: usize, ny: usize) -> Self {
        FDConfig {
            nx,
            ny,
            scheme: Scheme::for_params(p),
            theta: 1.0,
            window: None,
        }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Self {
        self.window = Some((lo, hi));
        self
    }

    pub fn validate(&self, p: &TelegraphParams) -> Result<()> {
        if self.nx < 3 || self.ny < 2 {
            return Err(Error::config(format!(
                "finite differences need nx >= 3 and ny >= 2 (got {} x {})",
                self.nx, self.ny
            )));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::config(format!("theta must lie in [0, 1], got {}", self.theta)));
        }
        if self.scheme != Scheme::for_params(p) {
            return Err(Error::config(format!(
                "scheme {:?} does not match alpha = {}",
                self.scheme,
                p.alpha()
            )));
        }
        if let Some((lo, hi)) = self.window {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::config(format!("window [{lo}, {hi}] is empty")));
            }
        }
        Ok(())
    }
}

/// Discrete Caputo derivative of one order on a uniform grid:
///
/// ```text
/// D^ν u(y_n) ≈ lead·(u^n - u^{n-1}) + Σ_{k=1}^{n-1} hist[n-k]·(u^k - u^{k-1}) + slope[n]·u'(0).
/// ```
///
/// For `ν ∈ (1, 2)` the value approximates the mean of `D^ν u` at `y_{n-1}`
/// and `y_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CaputoWeights {
    pub order: f64,
    pub dy: f64,
    pub lead: f64,
    /// `hist[j]` for `j = 1..ny`; `hist[0]` is unused.
    pub hist: Vec<f64>,
    /// `slope[n]`; zero for orders up to 1.
    pub slope: Vec<f64>,
}

/// Weights for `D^ν`, `ν ∈ (0, 2)`, on `ny` levels spaced `dy`.
pub fn caputo_weights(order: f64, ny: usize, dy: f64) -> Result<CaputoWeights> {
    if !(order > 0.0 && order < 2.0) {
        return Err(Error::config(format!("Caputo order must lie in (0, 2), got {order}")));
    }
    if !(dy > 0.0 && dy.is_finite()) {
        return Err(Error::config(format!("step must be positive, got {dy}")));
    }
    let second = order > 1.0;
    let gam = if second { order - 1.0 } else { order };
    let scale = dy.powf(-gam) / gamma(2.0 - gam);
    // a_0 = 1 exactly, also at order 1 where 0^0 would give 0
    let a: Vec<f64> = (0..ny.max(1))
        .map(|k| if k == 0 { 1.0 } else { ((k + 1) as f64).powf(1.0 - gam) - (k as f64).powf(1.0 - gam) })
        .collect();
    let mut hist = vec![0.0; ny.max(1)];
    let mut slope = vec![0.0; ny.max(1)];
    if second {
        for j in 1..hist.len() {
            hist[j] = scale * (a[j] - a[j - 1]) / dy;
        }
        for n in 1..slope.len() {
            slope[n] = -scale * a[n - 1];
        }
    } else {
        for j in 1..hist.len() {
            hist[j] = scale * a[j];
        }
    }
    Ok(CaputoWeights {
        order,
        dy,
        lead: if second { scale * a[0] / dy } else { scale * a[0] },
        hist,
        slope,
    })
}

impl CaputoWeights {
    /// History part at level `n`, given increments `d[k] = u^k - u^{k-1}`.
    fn history(&self, n: usize, d: impl Fn(usize) -> f64, slope0: f64) -> f64 {
        let mut s = self.slope[n] * slope0;
        for k in 1..n {
            s += self.hist[n - k] * d(k);
        }
        s
    }

    /// The discrete derivative at level `n >= 1` of samples `u[0..=n]`.
    pub fn apply(&self, u: &[f64], n: usize, slope0: f64) -> f64 {
        self.lead * (u[n] - u[n - 1]) + self.history(n, |k| u[k] - u[k - 1], slope0)
    }
}

/// Condition on one side of the spatial grid, sampled per level.
#[derive(Debug, Clone)]
enum Side {
    /// Prescribed values.
    Value(Vec<f64>),
    /// Prescribed outward `u_x` (left: `u_x`, right: `u_x`), via a ghost node.
    Slope(Vec<f64>),
}

/// One marching problem: nodes, data and walls.
struct Layout<'a> {
    p: &'a TelegraphParams,
    theta: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
    tau1: Vec<f64>,
    tau2: Vec<f64>,
    /// `f[n][i]`.
    f: Vec<Vec<f64>>,
    /// `None` for the space-free scalar scheme.
    sides: Option<(Side, Side)>,
}

fn thomas(lower: &[f64], diag: &mut [f64], upper: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    for i in 1..n {
        if diag[i - 1] == 0.0 || !diag[i - 1].is_finite() {
            return Err(Error::SingularSystem(format!("zero pivot at row {}", i - 1)));
        }
        let m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if diag[n - 1] == 0.0 || !diag[n - 1].is_finite() {
        return Err(Error::SingularSystem(format!("zero pivot at row {}", n - 1)));
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
    Ok(())
}

/// `Δu` at node `i` of level values `u`, with the ghost contributions of
/// slope conditions (`g_left`, `g_right` at this level).
fn laplacian(u: &[f64], i: usize, inv_dx2: f64, sides: &(Side, Side), n: usize, dx: f64) -> f64 {
    let last = u.len() - 1;
    if i == 0 {
        if let Side::Slope(g) = &sides.0 {
            return (2.0 * u[1] - 2.0 * u[0]) * inv_dx2 - 2.0 * g[n] / dx;
        }
    }
    if i == last {
        if let Side::Slope(g) = &sides.1 {
            return (2.0 * u[last - 1] - 2.0 * u[last]) * inv_dx2 + 2.0 * g[n] / dx;
        }
    }
    (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2
}

/// March all levels; returns `u[n][i]`.
fn march(l: &Layout) -> Result<Vec<Vec<f64>>> {
    let p = l.p;
    let ny = l.ys.len();
    let nodes = l.xs.len();
    let dy = l.ys[1] - l.ys[0];
    let wa = caputo_weights(p.alpha(), ny, dy)?;
    let wb = if p.b() != 0.0 {
        Some(caputo_weights(p.beta(), ny, dy)?)
    } else {
        None
    };
    let (th, c, b) = (l.theta, p.c(), p.b());
    let (dx, inv_dx2) = if nodes > 1 {
        let dx = l.xs[1] - l.xs[0];
        (dx, 1.0 / (dx * dx))
    } else {
        (1.0, 0.0)
    };
    let mut u: Vec<Vec<f64>> = Vec::with_capacity(ny);
    let mut u0 = l.tau1.clone();
    if let Some((left, right)) = &l.sides {
        if let Side::Value(v) = left {
            u0[0] = v[0];
        }
        if let Side::Value(v) = right {
            u0[nodes - 1] = v[0];
        }
    }
    u.push(u0);
    // increments d[k][i] = u^k_i - u^{k-1}_i, d[0] unused
    let mut d: Vec<Vec<f64>> = vec![vec![0.0; nodes]];
    // D^β at the previous level
    let mut lb_prev = vec![0.0; nodes];

    let mut lower = vec![0.0; nodes];
    let mut diag = vec![0.0; nodes];
    let mut upper = vec![0.0; nodes];
    let mut rhs = vec![0.0; nodes];
    for n in 1..ny {
        let prev = &u[n - 1];
        let lead_b = wb.as_ref().map_or(0.0, |w| w.lead);
        let a_coef = wa.lead + b * th * lead_b + th * c;
        for i in 0..nodes {
            let ha = wa.history(n, |k| d[k][i], l.tau2[i]);
            let hb = wb.as_ref().map_or(0.0, |w| w.history(n, |k| d[k][i], 0.0));
            let mut r = wa.lead * prev[i] - ha + b * th * (lead_b * prev[i] - hb) - b * (1.0 - th) * lb_prev[i]
                - (1.0 - th) * c * prev[i]
                + th * l.f[n][i]
                + (1.0 - th) * l.f[n - 1][i];
            lower[i] = 0.0;
            upper[i] = 0.0;
            diag[i] = a_coef;
            if let Some(sides) = &l.sides {
                let value_row = (i == 0 && matches!(sides.0, Side::Value(_)))
                    || (i == nodes - 1 && matches!(sides.1, Side::Value(_)));
                if value_row {
                    let v = match (i == 0, &sides.0, &sides.1) {
                        (true, Side::Value(v), _) => v[n],
                        (_, _, Side::Value(v)) => v[n],
                        _ => unreachable!(),
                    };
                    diag[i] = 1.0;
                    rhs[i] = v;
                    continue;
                }
                r += (1.0 - th) * laplacian(prev, i, inv_dx2, sides, n - 1, dx);
                diag[i] += 2.0 * th * inv_dx2;
                if i == 0 {
                    // slope wall: ghost u_{-1} = u_1 - 2Δx g
                    let Side::Slope(g) = &sides.0 else { unreachable!() };
                    upper[i] = -2.0 * th * inv_dx2;
                    r -= 2.0 * th * g[n] / dx;
                } else if i == nodes - 1 {
                    let Side::Slope(g) = &sides.1 else { unreachable!() };
                    lower[i] = -2.0 * th * inv_dx2;
                    r += 2.0 * th * g[n] / dx;
                } else {
                    lower[i] = -th * inv_dx2;
                    upper[i] = -th * inv_dx2;
                }
            }
            rhs[i] = r;
        }
        thomas(&lower, &mut diag, &upper, &mut rhs)?;
        let next = rhs.clone();
        let dn: Vec<f64> = next.iter().zip(prev).map(|(a, b)| a - b).collect();
        if let Some(w) = &wb {
            for i in 0..nodes {
                lb_prev[i] = w.lead * dn[i] + w.history(n, |k| d[k][i], 0.0);
            }
        }
        d.push(dn);
        u.push(next);
    }
    Ok(u)
}

fn sample1(d: &Data1, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter().map(|&x| d.eval(x)).collect()
}

fn sample_f(f: &Option<Data2>, xs: &[f64], ys: &[f64]) -> Result<Vec<Vec<f64>>> {
    ys.iter()
        .map(|&y| {
            xs.iter()
                .map(|&x| f.as_ref().map_or(Ok(0.0), |f| f.eval(x, y)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    GridSpec::new(lo, hi, n, 0.0, 0.0, 1).map(|g| g.xs()).unwrap_or_default()
}

/// Space-free solution at `x`: the scheme for `D^α u + b D^β u + c u = f(x, y)`.
fn edge_values(p: &TelegraphParams, spec: &ProblemSpec, theta: f64, x: f64, ys: &[f64]) -> Result<Vec<f64>> {
    let l = Layout {
        p,
        theta,
        xs: vec![x],
        ys: ys.to_vec(),
        tau1: vec![spec.tau1.eval(x)?],
        tau2: vec![spec.tau2.as_ref().map_or(Ok(0.0), |d| d.eval(x))?],
        f: sample_f(&spec.f, &[x], ys)?,
        sides: None,
    };
    Ok(march(&l)?.into_iter().map(|row| row[0]).collect())
}

fn wall(d: &Option<Data1>, kind: u8, ys: &[f64]) -> Result<Side> {
    let v = ys
        .iter()
        .map(|&y| d.as_ref().map_or(Ok(0.0), |d| d.eval(y)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(if kind == 0 { Side::Value(v) } else { Side::Slope(v) })
}

/// Solve on `[lo, hi]`; `left`/`right` are `None` for cut edges.
#[allow(clippy::too_many_arguments)]
fn solve_on(
    p: &TelegraphParams,
    spec: &ProblemSpec,
    cfg: &FDConfig,
    lo: f64,
    hi: f64,
    nx: usize,
    left: Option<Side>,
    right: Option<Side>,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let xs = axis(lo, hi, nx);
    let ys = axis(0.0, spec.t_max, cfg.ny);
    let left = match left {
        Some(s) => s,
        None => Side::Value(edge_values(p, spec, cfg.theta, lo, &ys)?),
    };
    let right = match right {
        Some(s) => s,
        None => Side::Value(edge_values(p, spec, cfg.theta, hi, &ys)?),
    };
    let l = Layout {
        p,
        theta: cfg.theta,
        tau1: sample1(&spec.tau1, &xs)?,
        tau2: match &spec.tau2 {
            Some(d) => sample1(d, &xs)?,
            None => vec![0.0; nx],
        },
        f: sample_f(&spec.f, &xs, &ys)?,
        xs: xs.clone(),
        ys,
        sides: Some((left, right)),
    };
    Ok((xs, march(&l)?))
}

/// Half-width beyond which the kernel at `y = T` has fallen by `1e-3`.
fn kernel_reach(p: &TelegraphParams, t_max: f64) -> f64 {
    let at0 = DecayBound::shape(p, 0, 0.0, 0.0, 0.0, t_max);
    let mut r = 0.05 * t_max.powf(p.beta());
    while DecayBound::shape(p, 0, 0.0, 0.0, r, t_max) > 1e-3 * at0 && r < 1e6 {
        r *= 1.1;
    }
    r
}

/// Largest `|x - centre|` within 20 where the data exceed `1e-3` of their
/// maximum; 20 when they do not decay.
fn data_reach(spec: &ProblemSpec, centre: f64, one_sided: bool) -> Result<f64> {
    let reach = 20.0;
    let steps = 800;
    let mut size = Vec::with_capacity(2 * steps + 1);
    let lo = if one_sided { 0 } else { -(steps as i64) };
    for k in lo..=steps as i64 {
        let x = centre + reach * k as f64 / steps as f64;
        let mut m = spec.tau1.eval(x)?.abs();
        if let Some(t2) = &spec.tau2 {
            m = m.max(t2.eval(x)?.abs());
        }
        if let Some(f) = &spec.f {
            for j in 0..=4 {
                m = m.max(f.eval(x, spec.t_max * j as f64 / 4.0)?.abs());
            }
        }
        size.push((x, m));
    }
    let top = size.iter().fold(0.0f64, |a, s| a.max(s.1));
    if top == 0.0 {
        return Ok(0.0);
    }
    Ok(size
        .iter()
        .filter(|s| s.1 > 1e-3 * top)
        .fold(0.0f64, |a, s| a.max((s.0 - centre).abs())))
}

fn interp(xs: &[f64], vs: &[f64], x: f64) -> f64 {
    let k = xs.partition_point(|&t| t <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[k - 1], xs[k]);
    let w = (x - x0) / (x1 - x0);
    vs[k - 1] * (1.0 - w) + vs[k] * w
}

/// Finite-difference solution on `nx × ny` nodes covering the rectangle,
/// or a window of the line or half-line, and `y ∈ [0, T]`.
pub fn fd_solve(p: &TelegraphParams, spec: &ProblemSpec, cfg: &FDConfig) -> Result<ScalarField> {
    cfg.validate(p)?;
    spec.validate(p)?;
    let ys = axis(0.0, spec.t_max, cfg.ny);
    let mut meta = FieldMeta {
        source: "fd_solve".into(),
        ..FieldMeta::default()
    };
    meta.settings.insert("params".into(), serde_json::to_value(p).expect("params serialize"));
    meta.settings.insert("fd".into(), serde_json::to_value(cfg).expect("config serializes"));
    meta.settings.insert("variant".into(), serde_json::to_value(spec.variant).expect("variant serializes"));

    let (lo, hi, xs, u) = match spec.variant {
        Variant::Rect { i, j, a1, a2 } => {
            let (xs, u) = solve_on(
                p,
                spec,
                cfg,
                a1,
                a2,
                cfg.nx,
                Some(wall(&spec.phi1, i, &ys)?),
                Some(wall(&spec.phi2, j, &ys)?),
            )?;
            (a1, a2, xs, u)
        }
        Variant::Cauchy | Variant::HalfStrip { .. } => {
            let half = match spec.variant {
                Variant::HalfStrip { i, a1 } => Some((i, a1)),
                _ => None,
            };
            let (lo, hi) = match (cfg.window, half) {
                (Some((lo, hi)), None) => (lo, hi),
                (Some((_, hi)), Some((_, a1))) => {
                    if !(hi > a1) {
                        return Err(Error::config(format!("window edge {hi} must exceed a1 = {a1}")));
                    }
                    (a1, hi)
                }
                (None, None) => {
                    let r = data_reach(spec, 0.0, false)? + kernel_reach(p, spec.t_max);
                    (-r, r)
                }
                (None, Some((_, a1))) => (a1, a1 + data_reach(spec, a1, true)? + kernel_reach(p, spec.t_max)),
            };
            let left = |ys: &[f64]| -> Result<Option<Side>> {
                match half {
                    Some((i, _)) => Ok(Some(wall(&spec.phi1, i, ys)?)),
                    None => Ok(None),
                }
            };
            let (xs, u) = solve_on(p, spec, cfg, lo, hi, cfg.nx, left(&ys)?, None)?;
            // sanity re-run on a window twice as wide, same spacing
            let (lo2, hi2, nx2) = match half {
                Some(_) => (lo, lo + 2.0 * (hi - lo), 2 * cfg.nx - 1),
                None => {
                    let mid = 0.5 * (lo + hi);
                    (mid - (hi - lo), mid + (hi - lo), 2 * cfg.nx - 1)
                }
            };
            let (xs2, u2) = solve_on(p, spec, cfg, lo2, hi2, nx2, left(&ys)?, None)?;
            let scale = u.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
            let mut gap = 0.0f64;
            for (row, row2) in u.iter().zip(&u2) {
                for (x, v) in xs.iter().zip(row) {
                    gap = gap.max((v - interp(&xs2, row2, *x)).abs());
                }
            }
            meta.settings.insert("window".into(), serde_json::json!([lo, hi]));
            meta.settings.insert("window_gap".into(), (gap / scale).into());
            if gap > 1e-3 * scale {
                meta.warnings.push(format!(
                    "doubling the window [{lo}, {hi}] changed the solution by {:.2e} relative",
                    gap / scale
                ));
            }
            (lo, hi, xs, u)
        }
    };
    debug_assert_eq!(xs.len(), cfg.nx);
    let grid = GridSpec::new(lo, hi, cfg.nx, 0.0, spec.t_max, cfg.ny)?;
    let values = u.into_iter().flatten().collect();
    ScalarField::new(grid, values, meta)
}

/// Discrete `D^α u + b D^β u - u_xx + c u - f` at the interior nodes, with
/// `θ = 1` and, when `α > 1`, `u_y(x, 0)` estimated by a one-sided
/// second-order difference.
pub fn residual(p: &TelegraphParams, field: &ScalarField, f_samples: &ScalarField) -> Result<ScalarField> {
    residual_with(p, field, f_samples, 1.0, None)
}

/// [`residual`] with the level weight `theta` and, optionally, `u_y(x, 0)`
/// at every `x` node.
pub fn residual_with(
    p: &TelegraphParams,
    field: &ScalarField,
    f_samples: &ScalarField,
    theta: f64,
    tau2: Option<&[f64]>,
) -> Result<ScalarField> {
    let g = field.grid;
    if f_samples.grid != g {
        return Err(Error::GridMismatch("source samples are on a different grid".into()));
    }
    if g.nx < 3 || g.ny < 3 && p.n() == 2 || g.ny < 2 {
        return Err(Error::GridMismatch(format!("{}x{} grid is too small for a residual", g.nx, g.ny)));
    }
    if g.y_min != 0.0 {
        return Err(Error::GridMismatch("the residual needs the history from y = 0".into()));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::config(format!("theta must lie in [0, 1], got {theta}")));
    }
    if let Some(t) = tau2 {
        if t.len() != g.nx {
            return Err(Error::GridMismatch(format!("{} tau2 values for {} nodes", t.len(), g.nx)));
        }
    }
    let dy = g.y(1) - g.y(0);
    let dx = g.x(1) - g.x(0);
    let wa = caputo_weights(p.alpha(), g.ny, dy)?;
    let wb = caputo_weights(p.beta(), g.ny, dy)?;
    let (b, c) = (p.b(), p.c());
    let col = |i: usize| (0..g.ny).map(|n| field.at(i, n)).collect::<Vec<f64>>();
    let mut values = Vec::with_capacity((g.nx - 2) * (g.ny - 1));
    let cols: Vec<Vec<f64>> = (0..g.nx).map(col).collect();
    let slope0: Vec<f64> = (0..g.nx)
        .map(|i| match (p.n(), tau2) {
            (1, _) => 0.0,
            (_, Some(t)) => t[i],
            _ => (-3.0 * cols[i][0] + 4.0 * cols[i][1] - cols[i][2]) / (2.0 * dy),
        })
        .collect();
    let lap = |i: usize, n: usize| (cols[i - 1][n] - 2.0 * cols[i][n] + cols[i + 1][n]) / (dx * dx);
    for n in 1..g.ny {
        for i in 1..g.nx - 1 {
            let u = &cols[i];
            let da = wa.apply(u, n, slope0[i]);
            let db_n = wb.apply(u, n, 0.0);
            let db_p = if n > 1 { wb.apply(u, n - 1, 0.0) } else { 0.0 };
            let mix = |now: f64, before: f64| theta * now + (1.0 - theta) * before;
            let r = da + b * mix(db_n, db_p) - mix(lap(i, n), lap(i, n - 1)) + c * mix(u[n], u[n - 1])
                - mix(f_samples.at(i, n), f_samples.at(i, n - 1));
            values.push(r);
        }
    }
    let grid = GridSpec::new(g.x(1), g.x(g.nx - 2), g.nx - 2, g.y(1), g.y(g.ny - 1), g.ny - 1)?;
    let mut meta = FieldMeta {
        source: "residual".into(),
        ..FieldMeta::default()
    };
    meta.settings.insert("theta".into(), theta.into());
    ScalarField::new(grid, values, meta)
}
