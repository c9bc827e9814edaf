//! Green functions of the half-strip problems `P_i` and the rectangle
//! problems `P_ij` by the method of images:
//!
//! ```text
//! G_i  = Γ(x - t, y - s) + (-1)^{i+1} Γ(x + t - 2a1, y - s),
//! G_ij = Σ_m (-1)^{(i+j)m} [Γ(X1_m, y - s) + (-1)^{i+1} Γ(X2_m, y - s)],
//! X1_m = 2mL + x - t,   X2_m = 2mL + x + t - 2a1,   L = a2 - a1.
//! ```
//!
//! Index 0 imposes a value condition at the wall and index 1 a derivative
//! condition. The rectangle series is truncated with an analytic tail bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{DecayBound, Kernel, TelegraphParams};
use crate::quad::QuadratureConfig;

/// Boundary-condition indices: `i` at `a1`, `j` at `a2` (absent on the half-strip).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryKind {
    pub i: u8,
    pub j: Option<u8>,
}

impl BoundaryKind {
    pub fn half(i: u8) -> Result<Self> {
        check_index("i", i)?;
        Ok(BoundaryKind { i, j: None })
    }

    pub fn rect(i: u8, j: u8) -> Result<Self> {
        check_index("i", i)?;
        check_index("j", j)?;
        Ok(BoundaryKind { i, j: Some(j) })
    }
}

fn check_index(name: &str, v: u8) -> Result<()> {
    if v > 1 {
        return Err(Error::config(format!("boundary index {name} must be 0 or 1, got {v}")));
    }
    Ok(())
}

/// `(-1)^{i+1}`: the sign of the image reflected through a wall with index `i`.
pub fn reflection_sign(i: u8) -> f64 {
    if i == 0 {
        -1.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageSeriesConfig {
    /// Absolute bound on the discarded tail.
    pub tol: f64,
    /// Cap on `|m|`.
    pub max_images: usize,
}

impl Default for ImageSeriesConfig {
    fn default() -> Self {
        ImageSeriesConfig {
            tol: 1e-12,
            max_images: 500,
        }
    }
}

impl ImageSeriesConfig {
    pub fn validated(self) -> Result<Self> {
        if !(self.tol > 0.0) {
            return Err(Error::config("image series tol must be positive"));
        }
        if self.max_images == 0 {
            return Err(Error::config("max_images must be positive"));
        }
        Ok(self)
    }
}

/// How many image pairs were summed and whether the cap cut the series short.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub images: usize,
    /// The tail bound was not met within `max_images` (a truncation warning).
    pub capped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenValue {
    pub value: f64,
    pub truncation: Truncation,
}

/// Smallest `M` such that the images omitted by a sum truncated at `M`
/// contribute at most `cfg.tol`, for spatial derivative order
/// `m_order ∈ {0, 1}`.
///
/// Each omitted level `k > M` holds at most four images, all at distance at
/// least `(2k - 1)L` from the evaluation point, so the tail is bounded by
/// `4 Σ_{m > M} bound((2m - 1)L, y - s)` with the kernel's decay envelope.
pub fn images_needed_order(
    p: &TelegraphParams,
    bound: &DecayBound,
    cfg: &ImageSeriesConfig,
    m_order: usize,
    a1: f64,
    a2: f64,
    y_minus_s: f64,
) -> Truncation {
    images_needed_deriv(p, bound, cfg, m_order, 0.0, a2 - a1, y_minus_s)
}

/// As [`images_needed_order`] for image sums of `∂x^m D^ν Γ` over a
/// period `2 len`.
pub fn images_needed_deriv(
    p: &TelegraphParams,
    bound: &DecayBound,
    cfg: &ImageSeriesConfig,
    m_order: usize,
    nu: f64,
    len: f64,
    y_minus_s: f64,
) -> Truncation {
    let term = |m: usize| 4.0 * bound.eval(p, m_order, nu, 0.0, (2.0 * m as f64 - 1.0) * len, y_minus_s);
    // Once a term drops below tol/1000 the envelope decays faster than
    // geometrically, so the unsummed remainder is negligible against tol.
    let mut terms = Vec::new();
    let mut settled = false;
    for m in 1..=cfg.max_images + 1 {
        let t = term(m);
        terms.push(t);
        if m > 2 && t <= 1e-3 * cfg.tol {
            settled = true;
            break;
        }
    }
    if settled {
        let mut tail: f64 = terms.iter().sum();
        for (images, t) in terms.iter().enumerate().take(cfg.max_images + 1) {
            if tail <= cfg.tol {
                return Truncation { images, capped: false };
            }
            tail -= t;
        }
    }
    Truncation {
        images: cfg.max_images,
        capped: true,
    }
}

/// [`images_needed_order`] for the Green function itself, with the default
/// decay constant.
pub fn images_needed(p: &TelegraphParams, cfg: &ImageSeriesConfig, a1: f64, a2: f64, y_minus_s: f64) -> Truncation {
    images_needed_order(p, &DecayBound::default(), cfg, 0, a1, a2, y_minus_s)
}

/// `Σ_m w_m [F(x - t + 2mL) + s_i F(x + t - 2a1 + 2mL)]` with `w_m = 1` for even
/// `m` and `(-1)^{i+j}` for odd `m`. With `dt` set, `F` is the `x`
/// derivative and the direct terms change sign, giving the `t` derivative.
///
/// The direct terms run over `|m| <= M` and the reflected ones over
/// `-M-1 <= m <= M`, so every omitted term sits at distance at least
/// `(2M + 1)L`. The fixed ordering keeps the sum bit-reproducible.
#[allow(clippy::too_many_arguments)]
pub(crate) fn rect_image_sum<F>(i: u8, j: u8, a1: f64, len: f64, x: f64, t: f64, images: usize, mut f: F, dt: bool) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m_max = images as i64;
    let alt = if (i + j).is_multiple_of(2) { 1.0 } else { -1.0 };
    let weight = |m: i64| if m % 2 == 0 { 1.0 } else { alt };
    let si = reflection_sign(i);
    let direct_sign = if dt { -1.0 } else { 1.0 };
    let mut value = 0.0;
    for m in -m_max - 1..=m_max {
        let shift = 2.0 * m as f64 * len;
        let mut term = si * f(shift + x + t - 2.0 * a1)?;
        if m >= -m_max {
            term += direct_sign * f(shift + x - t)?;
        }
        value += weight(m) * term;
    }
    Ok(value)
}

/// Green-function evaluator sharing one kernel (and its Wright tables).
#[derive(Debug, Clone)]
pub struct Green {
    kernel: Kernel,
    images: ImageSeriesConfig,
}

impl Green {
    pub fn new(kernel: Kernel, images: ImageSeriesConfig) -> Result<Self> {
        Ok(Green {
            kernel,
            images: images.validated()?,
        })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn images(&self) -> &ImageSeriesConfig {
        &self.images
    }

    /// `Γ_x`, extended by its limit 0 at the origin (`Γ` is even and, for
    /// `ν = 0`, continuously differentiable there).
    fn gamma_x(&self, x: f64, y: f64) -> Result<f64> {
        if x == 0.0 {
            return Ok(0.0);
        }
        self.kernel.gamma_deriv(1, 0.0, x, y)
    }

    fn check_times(y: f64, s: f64) -> Result<f64> {
        if !(s >= 0.0 && s < y) {
            return Err(Error::domain(format!("Green functions need 0 <= s < y (s={s}, y={y})")));
        }
        Ok(y - s)
    }

    fn check_half(a1: f64, x: f64, t: f64) -> Result<()> {
        if !(x >= a1 && t >= a1) {
            return Err(Error::domain(format!("half-strip needs x, t >= a1 (a1={a1:?}, x={x:?}, t={t:?})")));
        }
        Ok(())
    }

    fn check_rect(a1: f64, a2: f64, x: f64, t: f64) -> Result<()> {
        if !(a2 > a1) {
            return Err(Error::domain(format!("rectangle needs a1 < a2 (a1={a1}, a2={a2})")));
        }
        if !(x >= a1 && x <= a2 && t >= a1 && t <= a2) {
            return Err(Error::domain(format!("rectangle needs a1 <= x, t <= a2 (x={x:?}, t={t:?})")));
        }
        Ok(())
    }

    /// `G_i(x, y; t, s)`.
    #[allow(clippy::too_many_arguments)]
    pub fn half(&self, i: u8, a1: f64, x: f64, y: f64, t: f64, s: f64) -> Result<f64> {
        check_index("i", i)?;
        Self::check_half(a1, x, t)?;
        let ys = Self::check_times(y, s)?;
        let k = &self.kernel;
        Ok(k.gamma_fs(x - t, ys)? + reflection_sign(i) * k.gamma_fs(x + t - 2.0 * a1, ys)?)
    }

    /// `∂G_i/∂t (x, y; t, s)`.
    #[allow(clippy::too_many_arguments)]
    pub fn half_dt(&self, i: u8, a1: f64, x: f64, y: f64, t: f64, s: f64) -> Result<f64> {
        check_index("i", i)?;
        Self::check_half(a1, x, t)?;
        let ys = Self::check_times(y, s)?;
        Ok(-self.gamma_x(x - t, ys)? + reflection_sign(i) * self.gamma_x(x + t - 2.0 * a1, ys)?)
    }

    /// `∂G_i/∂x (x, y; t, s)`.
    #[allow(clippy::too_many_arguments)]
    pub fn half_dx(&self, i: u8, a1: f64, x: f64, y: f64, t: f64, s: f64) -> Result<f64> {
        check_index("i", i)?;
        Self::check_half(a1, x, t)?;
        let ys = Self::check_times(y, s)?;
        Ok(self.gamma_x(x - t, ys)? + reflection_sign(i) * self.gamma_x(x + t - 2.0 * a1, ys)?)
    }

    /// Image sum shared by the `rect*` evaluators.
    #[allow(clippy::too_many_arguments)]
    fn rect_sum(&self, i: u8, j: u8, a1: f64, a2: f64, x: f64, y: f64, t: f64, s: f64, deriv: Deriv) -> Result<GreenValue> {
        check_index("i", i)?;
        check_index("j", j)?;
        Self::check_rect(a1, a2, x, t)?;
        let ys = Self::check_times(y, s)?;
        let len = a2 - a1;
        let trunc = images_needed_order(
            self.kernel.params(),
            &self.kernel.decay_envelope(),
            &self.images,
            usize::from(deriv != Deriv::None),
            a1,
            a2,
            ys,
        );
        let k = &self.kernel;
        let value = rect_image_sum(i, j, a1, len, x, t, trunc.images, |z| {
            if deriv == Deriv::None {
                k.gamma_fs(z, ys)
            } else {
                self.gamma_x(z, ys)
            }
        }, deriv == Deriv::Dt)?;
        Ok(GreenValue { value, truncation: trunc })
    }

    /// `G_ij(x, y; t, s)` with truncation metadata.
    #[allow(clippy::too_many_arguments)]
    pub fn rect(&self, i: u8, j: u8, a1: f64, a2: f64, x: f64, y: f64, t: f64, s: f64) -> Result<GreenValue> {
        self.rect_sum(i, j, a1, a2, x, y, t, s, Deriv::None)
    }

    /// `∂G_ij/∂t (x, y; t, s)` with truncation metadata.
    #[allow(clippy::too_many_arguments)]
    pub fn rect_dt(&self, i: u8, j: u8, a1: f64, a2: f64, x: f64, y: f64, t: f64, s: f64) -> Result<GreenValue> {
        self.rect_sum(i, j, a1, a2, x, y, t, s, Deriv::Dt)
    }

    /// `∂G_ij/∂x (x, y; t, s)` with truncation metadata.
    #[allow(clippy::too_many_arguments)]
    pub fn rect_dx(&self, i: u8, j: u8, a1: f64, a2: f64, x: f64, y: f64, t: f64, s: f64) -> Result<GreenValue> {
        self.rect_sum(i, j, a1, a2, x, y, t, s, Deriv::Dx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Deriv {
    None,
    Dx,
    Dt,
}

/// `G_i(x, y; t, s)` for one-off evaluations.
#[allow(clippy::too_many_arguments)]
pub fn green_half(p: &TelegraphParams, q: &QuadratureConfig, i: u8, a1: f64, x: f64, y: f64, t: f64, s: f64) -> Result<f64> {
    Green::new(Kernel::new(*p, *q)?, ImageSeriesConfig::default())?.half(i, a1, x, y, t, s)
}

/// `∂G_i/∂t (x, y; t, s)` for one-off evaluations.
#[allow(clippy::too_many_arguments)]
pub fn green_half_dt(p: &TelegraphParams, q: &QuadratureConfig, i: u8, a1: f64, x: f64, y: f64, t: f64, s: f64) -> Result<f64> {
    Green::new(Kernel::new(*p, *q)?, ImageSeriesConfig::default())?.half_dt(i, a1, x, y, t, s)
}

/// `G_ij(x, y; t, s)` for one-off evaluations.
#[allow(clippy::too_many_arguments)]
pub fn green_rect(
    p: &TelegraphParams,
    q: &QuadratureConfig,
    cfg: &ImageSeriesConfig,
    i: u8,
    j: u8,
    a1: f64,
    a2: f64,
    x: f64,
    y: f64,
    t: f64,
    s: f64,
) -> Result<GreenValue> {
    Green::new(Kernel::new(*p, *q)?, *cfg)?.rect(i, j, a1, a2, x, y, t, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn green(alpha: f64, b: f64, c: f64) -> Green {
        let k = Kernel::new(TelegraphParams::new(alpha, b, c).unwrap(), QuadratureConfig::default()).unwrap();
        Green::new(k, ImageSeriesConfig::default()).unwrap()
    }

    #[test]
    fn dirichlet_half_strip_vanishes_on_wall() {
        let g = green(0.9, 0.3, 0.2);
        for &(x, y, s) in &[(0.4, 0.7, 0.1), (2.0, 1.5, 1.0), (0.01, 0.3, 0.0)] {
            assert_eq!(g.half(0, 0.0, x, y, 0.0, s).unwrap(), 0.0);
        }
    }

    #[test]
    fn neumann_half_strip_has_zero_normal_derivative() {
        let g = green(1.3, 0.2, 0.1);
        let v = g.half_dt(1, -1.0, 0.5, 0.8, -1.0, 0.2).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn dirichlet_derivative_on_wall_doubles_kernel_slope() {
        let g = green(0.7, 0.0, 0.4);
        let (a1, x, y) = (0.5, 1.2, 0.9);
        let v = g.half_dt(0, a1, x, y, a1, 0.0).unwrap();
        let gx = g.kernel().gamma_deriv(1, 0.0, x - a1, y).unwrap();
        assert!((v + 2.0 * gx).abs() <= 1e-14 * gx.abs());
    }

    #[test]
    fn half_dt_matches_difference_quotient() {
        let g = green(1.1, 0.4, 0.3);
        let (a1, x, y, t, s, h) = (0.0, 0.9, 0.7, 0.4, 0.2, 1e-4);
        for i in 0..=1 {
            let fd = (g.half(i, a1, x, y, t + h, s).unwrap() - g.half(i, a1, x, y, t - h, s).unwrap()) / (2.0 * h);
            let d = g.half_dt(i, a1, x, y, t, s).unwrap();
            assert!((d - fd).abs() < 1e-6, "i={i}: {d} vs {fd}");
        }
    }

    #[test]
    fn rect_symmetry_and_walls() {
        let g = green(0.8, 0.5, 0.25);
        let (a1, a2) = (0.0, 1.5);
        let v = g.rect(0, 0, a1, a2, 0.3, 0.9, 1.1, 0.2).unwrap();
        let w = g.rect(0, 0, a1, a2, 1.1, 0.9, 0.3, 0.2).unwrap();
        assert!((v.value - w.value).abs() < 1e-13);
        assert!(!v.truncation.capped);
        let wall = g.rect(0, 0, a1, a2, 0.3, 0.9, a2, 0.2).unwrap();
        assert!(wall.value.abs() < 1e-12, "{}", wall.value);
        let nwall = g.rect_dt(1, 1, a1, a2, 0.3, 0.9, a2, 0.2).unwrap();
        assert!(nwall.value.abs() < 1e-12, "{}", nwall.value);
    }

    #[test]
    fn x_derivatives_match_difference_quotients() {
        let g = green(1.3, 0.3, 0.2);
        let (a1, a2, y, t, s, h) = (0.0, 1.2, 0.6, 0.45, 0.1, 1e-4);
        let x = 0.8;
        for i in 0..=1 {
            let fd = (g.half(i, a1, x + h, y, t, s).unwrap() - g.half(i, a1, x - h, y, t, s).unwrap()) / (2.0 * h);
            assert!((g.half_dx(i, a1, x, y, t, s).unwrap() - fd).abs() < 1e-6);
            for j in 0..=1 {
                let v = |x| g.rect(i, j, a1, a2, x, y, t, s).unwrap().value;
                let fd = (v(x + h) - v(x - h)) / (2.0 * h);
                let d = g.rect_dx(i, j, a1, a2, x, y, t, s).unwrap().value;
                assert!((d - fd).abs() < 1e-6, "({i},{j}): {d} vs {fd}");
            }
        }
        assert!(g.rect_dx(1, 1, a1, a2, a1, y, t, s).unwrap().value.abs() < 1e-12);
        assert!(g.rect_dx(0, 1, a1, a2, a2, y, t, s).unwrap().value.abs() < 1e-12);
        assert!(g.half_dx(1, a1, a1, y, t, s).unwrap().abs() < 1e-15);
    }

    #[test]
    fn rect_approaches_half_strip_for_wide_domains() {
        let g = green(1.0, 0.2, 0.1);
        let half = g.half(0, 0.0, 0.6, 0.2, 0.3, 0.0).unwrap();
        let rect = g.rect(0, 1, 0.0, 10.0, 0.6, 0.2, 0.3, 0.0).unwrap();
        assert!((half - rect.value).abs() <= 1e-12);
        assert_eq!(rect.truncation.images, 0);
    }

    #[test]
    fn image_count_grows_with_time() {
        let p = TelegraphParams::new(1.0, 0.0, 0.0).unwrap();
        let cfg = ImageSeriesConfig::default();
        let mut last = 0;
        for &ys in &[0.1, 0.5, 2.0, 8.0] {
            let n = images_needed(&p, &cfg, 0.0, 1.0, ys);
            assert!(!n.capped);
            assert!(n.images >= last);
            last = n.images;
        }
        assert!(last > 0);
        let capped = images_needed(&p, &ImageSeriesConfig { tol: 1e-12, max_images: 2 }, 0.0, 0.1, 50.0);
        assert!(capped.capped);
    }

    #[test]
    fn invalid_indices_rejected() {
        let g = green(1.0, 0.0, 0.0);
        assert!(matches!(g.half(2, 0.0, 1.0, 1.0, 0.5, 0.0), Err(Error::Config(_))));
        assert!(matches!(g.half(0, 0.0, 1.0, 1.0, 0.5, 1.0), Err(Error::Domain(_))));
        assert!(BoundaryKind::rect(1, 3).is_err());
    }
}
