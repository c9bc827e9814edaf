//! Fundamental-solution values against frozen mpmath quadratures.

use fractel::kernel::{Kernel, TelegraphParams};
use fractel::quad::QuadratureConfig;
use serde::Deserialize;

#[derive(Deserialize)]
struct Row {
    alpha: f64,
    b: f64,
    c: f64,
    x: f64,
    y: f64,
    #[serde(default)]
    k: usize,
    #[serde(default)]
    m: usize,
    #[serde(default)]
    nu: f64,
    value: f64,
}

#[derive(Deserialize)]
struct Oracle {
    gamma_fs: Vec<Row>,
    initial_kernel: Vec<Row>,
    gamma_deriv: Vec<Row>,
}

fn oracle() -> Oracle {
    serde_json::from_str(include_str!("oracles/kernel.json")).expect("oracle file parses")
}

fn kernel(r: &Row) -> Kernel {
    let p = TelegraphParams::new(r.alpha, r.b, r.c).unwrap();
    Kernel::new(p, QuadratureConfig::default()).unwrap()
}

fn check(label: &str, r: &Row, v: f64) {
    let err = (v - r.value).abs() / r.value.abs();
    assert!(
        err <= 1e-9,
        "{label} alpha={} b={} c={} x={} y={}: {v} vs {} (rel {err:.1e})",
        r.alpha,
        r.b,
        r.c,
        r.x,
        r.y,
        r.value
    );
}

#[test]
fn gamma_fs_reference_values() {
    for r in &oracle().gamma_fs {
        check("gamma_fs", r, kernel(r).gamma_fs(r.x, r.y).unwrap());
    }
}

#[test]
fn initial_kernel_reference_values() {
    for r in &oracle().initial_kernel {
        check("initial_kernel", r, kernel(r).initial_kernel(r.k, r.x, r.y).unwrap());
    }
}

#[test]
fn gamma_deriv_reference_values() {
    for r in &oracle().gamma_deriv {
        check("gamma_deriv", r, kernel(r).gamma_deriv(r.m, r.nu, r.x, r.y).unwrap());
    }
}
