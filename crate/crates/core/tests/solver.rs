//! Solution representations against exact solutions and against each other.

use std::f64::consts::PI;

use fractel::kernel::TelegraphParams;
use fractel::solver::*;
use fractel::specfun::mittag_leffler;
use fractel::Error;

fn solver(alpha: f64, b: f64, c: f64) -> Solver {
    Solver::new(TelegraphParams::new(alpha, b, c).unwrap(), SolverConfig::default()).unwrap()
}

fn f1(label: &str, f: fn(f64) -> f64) -> Data1 {
    Data1::new(label, move |x| Ok(f(x)))
}

/// Adds `τ2 = 0` when the order needs it.
fn at_rest(s: &Solver, spec: ProblemSpec) -> ProblemSpec {
    if s.params().n() == 2 {
        spec.with_tau2(Data1::constant(0.0))
    } else {
        spec
    }
}

fn heat_gaussian(z: f64, y: f64) -> f64 {
    (-z * z / (1.0 + 4.0 * y)).exp() / (1.0 + 4.0 * y).sqrt()
}

#[test]
fn heat_equation_gaussian() {
    let s = solver(1.0, 0.0, 0.0);
    let spec = ProblemSpec::cauchy(2.0, f1("exp(-x^2)", |x| (-x * x).exp()));
    for &(x, y) in &[(0.0, 0.1), (0.7, 0.5), (-1.9, 1.0), (3.0, 2.0)] {
        let u = s.solve_cauchy(&spec, x, y).unwrap();
        let e = heat_gaussian(x, y);
        assert!((u - e).abs() < 1e-8, "({x},{y}): {u} vs {e}");
    }
}

#[test]
fn heat_equation_half_strip_by_odd_reflection() {
    let s = solver(1.0, 0.0, 0.0);
    let odd = |x: f64| (-(x - 1.0) * (x - 1.0)).exp() - (-(x + 1.0) * (x + 1.0)).exp();
    let spec = ProblemSpec::half(0, 0.0, 1.0, f1("odd pair", odd));
    for &(x, y) in &[(0.1, 0.2), (1.0, 0.5), (2.5, 1.0)] {
        let u = s.solve_half(&spec, x, y).unwrap();
        let e = heat_gaussian(x - 1.0, y) - heat_gaussian(x + 1.0, y);
        assert!((u - e).abs() < 1e-8, "({x},{y}): {u} vs {e}");
    }
}

#[test]
fn mittag_leffler_decay_of_constant_data() {
    for &alpha in &[0.5, 1.0, 1.5] {
        let s = solver(alpha, 0.0, 1.0);
        let spec = at_rest(&s, ProblemSpec::cauchy(1.0, Data1::constant(1.0)));
        for &y in &[0.25, 0.5, 1.0] {
            let u = s.solve_cauchy(&spec, 0.3, y).unwrap();
            let e = mittag_leffler(alpha, -y.powf(alpha)).unwrap();
            assert!((u - e).abs() < 1e-7, "alpha={alpha} y={y}: {u} vs {e}");
        }
    }
}

#[test]
fn constants_are_preserved() {
    for &(alpha, b) in &[(0.5, 0.4), (1.0, -0.3), (1.5, 0.3)] {
        let s = solver(alpha, b, 0.0);
        let one = || Data1::constant(1.0);
        let specs = [
            ProblemSpec::cauchy(1.0, one()),
            ProblemSpec::half(0, -0.5, 1.0, one()).with_phi1(one()),
            ProblemSpec::half(1, -0.5, 1.0, one()),
            ProblemSpec::rect(1, 1, 0.0, 1.0, 1.0, one()),
            ProblemSpec::rect(0, 1, 0.0, 1.0, 1.0, one()).with_phi1(one()),
        ];
        for spec in specs {
            let spec = at_rest(&s, spec);
            for &(x, y) in &[(0.2, 0.3), (0.9, 1.0)] {
                let u = s.solve(&spec, x, y).unwrap().value;
                assert!((u - 1.0).abs() < 1e-8, "alpha={alpha} {:?} ({x},{y}): {u}", spec.variant);
            }
        }
    }
}

#[test]
fn reaction_balanced_by_constant_source() {
    let s = solver(0.8, 0.5, 0.25);
    let spec = ProblemSpec::cauchy(1.0, Data1::constant(1.0)).with_source(Data2::constant(0.25));
    for &y in &[0.2, 1.0] {
        let u = s.solve_cauchy(&spec, 0.4, y).unwrap();
        assert!((u - 1.0).abs() < 1e-7, "y={y}: {u}");
    }
}

#[test]
fn linear_profile_with_neumann_walls() {
    // u = x - a1 has u_x = 1 on every wall
    let s = solver(1.5, 0.3, 0.0);
    let lin = || f1("x", |x| x);
    let one = || Data1::constant(1.0);
    let specs = [
        ProblemSpec::half(1, 0.0, 1.0, lin()).with_phi1(one()),
        ProblemSpec::rect(1, 1, 0.0, 1.0, 1.0, lin()).with_phi1(one()).with_phi2(one()),
        ProblemSpec::rect(0, 1, 0.0, 1.0, 1.0, lin()).with_phi2(one()),
    ];
    for spec in specs {
        let spec = at_rest(&s, spec);
        for &(x, y) in &[(0.3, 0.4), (0.8, 1.0)] {
            let u = s.solve(&spec, x, y).unwrap().value;
            assert!((u - x).abs() < 1e-7, "{:?} ({x},{y}): {u}", spec.variant);
        }
    }
}

#[test]
fn rectangle_eigenmodes() {
    // D^α T + (λ + c) T = 0 separates with the wall-compatible mode X(x)
    let c = 0.1;
    type Mode = (u8, u8, fn(f64) -> f64, f64);
    let modes: [Mode; 4] = [
        (0, 0, |x| (PI * x).sin(), PI * PI),
        (1, 1, |x| (PI * x).cos(), PI * PI),
        (0, 1, |x| (0.5 * PI * x).sin(), 0.25 * PI * PI),
        (1, 0, |x| (0.5 * PI * x).cos(), 0.25 * PI * PI),
    ];
    for &alpha in &[0.5, 1.5] {
        let s = solver(alpha, 0.0, c);
        for &(i, j, mode, lambda) in &modes {
            let spec = at_rest(&s, ProblemSpec::rect(i, j, 0.0, 1.0, 1.0, f1("mode", mode)));
            for &(x, y) in &[(0.3, 0.25), (0.7, 0.6)] {
                let u = s.solve_rect(&spec, x, y).unwrap();
                let e = mittag_leffler(alpha, -(lambda + c) * y.powf(alpha)).unwrap() * mode(x);
                assert!((u.value - e).abs() < 1e-7, "alpha={alpha} ({i},{j}) ({x},{y}): {} vs {e}", u.value);
                assert!(u.truncation.is_none_or(|t| !t.capped));
            }
        }
    }
}

#[test]
fn swapped_and_direct_data_terms_agree() {
    let s = solver(0.8, 0.5, 0.25);
    let gauss = || f1("exp(-x^2)", |x| (-x * x).exp());
    let specs = [
        ProblemSpec::cauchy(1.0, gauss()),
        ProblemSpec::half(1, -0.5, 1.0, gauss()),
        ProblemSpec::rect(0, 1, -1.0, 0.5, 1.0, gauss()),
    ];
    for spec in specs {
        for &(x, y) in &[(0.1, 0.3), (0.4, 0.9)] {
            let a = s.initial_term(&spec, 1, x, y).unwrap();
            let b = s.initial_term_direct(&spec, 1, x, y).unwrap();
            assert!((a - b).abs() < 1e-7, "{:?} ({x},{y}): {a} vs {b}", spec.variant);
        }
    }
    let s = solver(1.4, -0.2, 0.3);
    let spec = ProblemSpec::cauchy(1.0, Data1::constant(0.0)).with_tau2(gauss());
    let a = s.initial_term(&spec, 2, 0.2, 0.7).unwrap();
    let b = s.initial_term_direct(&spec, 2, 0.2, 0.7).unwrap();
    assert!((a - b).abs() < 1e-7, "{a} vs {b}");
}

#[test]
fn even_data_give_even_solutions_and_superposition_holds() {
    let s = solver(0.6, 0.3, 0.1);
    let a = ProblemSpec::cauchy(1.0, f1("exp(-x^2)", |x| (-x * x).exp()));
    let b = ProblemSpec::cauchy(1.0, f1("x exp(-x^2)", |x| x * (-x * x).exp()));
    let ab = ProblemSpec::cauchy(1.0, f1("(1+2x) exp(-x^2)", |x| (1.0 + 2.0 * x) * (-x * x).exp()));
    let (x, y) = (0.45, 0.5);
    let ua = s.solve_cauchy(&a, x, y).unwrap();
    assert!((ua - s.solve_cauchy(&a, -x, y).unwrap()).abs() < 1e-10);
    let ub = s.solve_cauchy(&b, x, y).unwrap();
    assert!((ub + s.solve_cauchy(&b, -x, y).unwrap()).abs() < 1e-10);
    let uab = s.solve_cauchy(&ab, x, y).unwrap();
    assert!((uab - ua - 2.0 * ub).abs() < 1e-9);
}

#[test]
fn initial_data_recovered_as_y_vanishes() {
    let s = solver(0.6, 0.3, 0.1);
    let spec = ProblemSpec::cauchy(1.0, f1("exp(-x^2)", |x| (-x * x).exp()));
    let x: f64 = 0.5;
    let target = (-x * x).exp();
    let mut last = f64::INFINITY;
    for &y in &[1e-1, 1e-2, 1e-3, 1e-4] {
        let err = (s.solve_cauchy(&spec, x, y).unwrap() - target).abs();
        assert!(err < last, "y={y}: {err} !< {last}");
        last = err;
    }
    assert!(last < 1e-2);
    assert_eq!(s.solve_cauchy(&spec, x, 0.0).unwrap(), target);
}

#[test]
fn dirichlet_trace_is_approached_near_the_wall() {
    let s = solver(0.8, 0.0, 0.0);
    let spec = ProblemSpec::half(0, 0.0, 1.0, Data1::constant(0.0)).with_phi1(f1("y", |y| y));
    let y = 0.5;
    let mut last = f64::INFINITY;
    for &x in &[0.1, 0.01, 0.001] {
        let err = (s.solve_half(&spec, x, y).unwrap() - y).abs();
        assert!(err < last, "x={x}: {err}");
        last = err;
    }
    assert!(last < 2e-2 * y);
    assert_eq!(s.solve_half(&spec, 0.0, y).unwrap(), y);
}

#[test]
fn field_matches_pointwise_solves() {
    let s = solver(0.8, 0.5, 0.25);
    let spec = ProblemSpec::cauchy(1.0, f1("exp(-x^2)", |x| (-x * x).exp()));
    let grid = GridSpec::new(-1.0, 1.0, 3, 0.5, 1.0, 2).unwrap();
    let field = s.eval_field(&spec, &grid).unwrap();
    assert_eq!(field.meta.source, "solve");
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let u = s.solve_cauchy(&spec, grid.x(ix), grid.y(iy)).unwrap();
            assert_eq!(field.at(ix, iy).to_bits(), u.to_bits());
        }
    }
}

#[test]
fn errors_are_classified() {
    let s = solver(1.5, 0.0, 0.0);
    let spec = ProblemSpec::cauchy(1.0, Data1::constant(1.0));
    assert!(s.solve(&spec, 0.0, 0.5).unwrap_err().is_config());

    let s = solver(0.5, 0.0, 0.0);
    let half = ProblemSpec::half(0, 0.0, 1.0, Data1::constant(1.0));
    assert!(matches!(s.solve(&half, -0.1, 0.5), Err(Error::Domain(_))));
    assert!(s.solve(&half, 0.1, 1.5).is_err());

    let bad = ProblemSpec::cauchy(1.0, Data1::new("boom", |x| if x > 0.5 { Ok(f64::NAN) } else { Ok(1.0) }));
    let grid = GridSpec::new(0.0, 1.0, 3, 0.0, 0.0, 1).unwrap();
    match s.eval_field(&bad, &grid) {
        Err(Error::AtPoint { x, completed, total, .. }) => {
            assert_eq!(x, 1.0);
            assert_eq!((completed, total), (2, 3));
        }
        other => panic!("expected a located failure, got {other:?}"),
    }
}
