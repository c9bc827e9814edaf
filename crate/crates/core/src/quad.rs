//! Globally adaptive Gauss–Kronrod (10/21) quadrature on finite intervals.
//!
//! Panels are kept in a max-heap keyed on their error estimate; the worst
//! panel is bisected until the summed estimate meets
//! `max(abs_tol, rel_tol * |I|)`. Semi-infinite integrals are handled by the
//! callers, which know an analytic cutoff for their integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Multiplier (≥ 1) applied to analytic tail-cutoff estimates.
    pub tail_safety: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-11,
            abs_tol: 1e-14,
            max_panels: 2000,
            tail_safety: 10.0,
        }
    }
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Result<Self> {
        QuadratureConfig {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::config("quadrature tolerances must be positive"));
        }
        if self.max_panels == 0 {
            return Err(Error::config("max_panels must be positive"));
        }
        if !(self.tail_safety >= 1.0) {
            return Err(Error::config("tail_safety must be >= 1"));
        }
        Ok(self)
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Error target for a given integral value.
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    /// Part of `error` attributable to rounding, which bisection cannot reduce.
    floor: f64,
}

impl Panel {
    fn excess(&self) -> f64 {
        (self.error - self.floor).max(0.0)
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.excess() == other.excess()
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.excess().total_cmp(&other.excess())
    }
}

fn gk21<F>(f: &mut F, lo: f64, hi: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    if !value.is_finite() {
        return Err(Error::QuadratureFailure {
            lo,
            hi,
            error: f64::INFINITY,
            panels: 1,
        });
    }
    Ok(Panel {
        lo,
        hi,
        value,
        error: err,
        floor,
    })
}

/// Integrate `f` over `[points[0], points[last]]`, with the interior points
/// used as initial panel boundaries.
pub fn integrate<F>(mut f: F, points: &[f64], cfg: &QuadratureConfig) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    assert!(points.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(gk21(&mut f, w[0], w[1])?);
        }
    }
    if heap.is_empty() {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    loop {
        let (value, error, excess) = heap
            .iter()
            .fold((0.0, 0.0, 0.0), |(v, e, x), p| (v + p.value, e + p.error, x + p.excess()));
        // Rounding error is accepted as is: it does not shrink under bisection.
        if excess <= cfg.target(value) {
            return Ok(finish(&heap));
        }
        if heap.len() >= cfg.max_panels {
            return Err(Error::QuadratureFailure {
                lo: points[0],
                hi: points[points.len() - 1],
                error,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Panel cannot be split further; its error is at the roundoff floor.
            heap.push(Panel {
                error: worst.floor,
                ..worst
            });
            continue;
        }
        heap.push(gk21(&mut f, worst.lo, mid)?);
        heap.push(gk21(&mut f, mid, worst.hi)?);
    }
}

fn finish(heap: &BinaryHeap<Panel>) -> Estimate {
    // Sum in a fixed order so the result does not depend on heap layout.
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    Estimate {
        value,
        error,
        panels: panels.len(),
    }
}

/// Breakpoints on `[lo, hi]` refined geometrically toward `lo`
/// (or toward `hi` when `toward_hi`): widths shrink by `ratio` per level.
pub fn graded_points(lo: f64, hi: f64, levels: usize, ratio: f64, toward_hi: bool) -> Vec<f64> {
    let len = hi - lo;
    let mut pts = vec![lo, hi];
    let mut w = len;
    for _ in 0..levels {
        w *= ratio;
        pts.push(if toward_hi { hi - w } else { lo + w });
    }
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

/// Merge, sort and clip extra breakpoints into `[lo, hi]`.
pub fn with_breaks(lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    pts.extend(extra.iter().copied().filter(|&p| p > lo && p < hi));
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadratureConfig::default();
        let est = integrate(|x| Ok(x.powi(7) - 3.0 * x * x), &[0.0, 2.0], &cfg).unwrap();
        assert!((est.value - (32.0 - 8.0)).abs() < 1e-12);
        assert_eq!(est.panels, 1);
    }

    #[test]
    fn endpoint_singularity_with_grading() {
        let cfg = QuadratureConfig::new(1e-12, 1e-15).unwrap();
        let pts = graded_points(0.0, 1.0, 30, 0.5, false);
        let est = integrate(|x| Ok(x.powf(-0.5)), &pts, &cfg).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9, "{}", est.value);
    }

    #[test]
    fn oscillatory_integrand() {
        let cfg = QuadratureConfig::default();
        let est = integrate(|x| Ok((50.0 * x).cos()), &[0.0, 3.0], &cfg).unwrap();
        assert!((est.value - (150.0f64).sin() / 50.0).abs() < 1e-12);
    }

    #[test]
    fn panel_budget_is_enforced() {
        let cfg = QuadratureConfig {
            max_panels: 3,
            ..QuadratureConfig::default()
        };
        let r = integrate(|x| Ok((1.0 / (x + 1e-9)).sin()), &[0.0, 1.0], &cfg);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn cancelling_integral_stops_at_rounding_floor() {
        let cfg = QuadratureConfig::new(1e-12, 1e-18).unwrap();
        let est = integrate(|x| Ok(if x < 1.0 { 1.0 } else { -1.0 }), &[0.0, 1.0, 2.0], &cfg).unwrap();
        assert!(est.value.abs() < 1e-14);
        assert_eq!(est.panels, 2);
    }

    #[test]
    fn integrand_errors_propagate() {
        let cfg = QuadratureConfig::default();
        let r = integrate(|_| Err(Error::domain("nope")), &[0.0, 1.0], &cfg);
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
