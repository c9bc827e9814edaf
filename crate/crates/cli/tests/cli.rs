//! End-to-end runs of the `fractel` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fractel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractel")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A fresh directory per test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fractel-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// `(x, y, u)` rows of a field CSV.
fn rows(csv: &str) -> Vec<[f64; 3]> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,u"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

#[test]
fn heat_kernel_value() {
    let o = fractel(&["gamma", "--alpha", "1", "--b", "0", "--c", "0", "--x", "0", "--y", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 0.5 / std::f64::consts::PI.sqrt()).abs() < 1e-13, "{v}");
}

#[test]
fn zero_time_is_a_configuration_error() {
    let o = fractel(&["gamma", "--alpha", "1", "--x", "0", "--y", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("y > 0"), "{}", stderr(&o));
}

#[test]
fn identical_flags_give_identical_files() {
    let dir = scratch("determinism");
    let run = |name: &str, threads: &str| {
        let out = dir.join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_fractel"))
            .env("FRACTEL_THREADS", threads)
            .args(["gamma", "--alpha", "0.8", "--b", "0.5", "--c", "0.25", "--x-range", "-2:2", "--nx", "9"])
            .args(["--y-range", "0.1:1", "--ny", "4", "--out", path_str(&out)])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", "1");
    assert_eq!(a, run("b.csv", "1"));
    assert_eq!(a, run("c.csv", "3"));
    assert_eq!(rows(std::str::from_utf8(&a).unwrap()).len(), 36);
}

#[test]
fn manifest_accompanies_output_and_replays_the_run() {
    let dir = scratch("manifest");
    let out = dir.join("field.csv");
    let o = fractel(&[
        "solve", "--alpha", "0.6", "--b", "0.3", "--variant", "rect", "--i", "0", "--j", "1", "--a2", "1", "--tau1",
        "x*(2-x)", "--phi2", "0", "--x-range", "0:1", "--nx", "3", "--y", "0.4", "--out", path_str(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let first = std::fs::read(&out).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("field.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["schema"], 1);
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["params"]["params"]["alpha"], 0.6);
    assert!(manifest["tolerances"]["outer"]["rel_tol"].is_number());
    assert!(manifest["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(manifest["field"]["source"], "solve");
    std::fs::remove_file(&out).unwrap();
    let argv: Vec<String> = manifest["argv"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    let again = Command::new(env!("CARGO_BIN_EXE_fractel")).args(&argv).output().unwrap();
    assert!(again.status.success());
    assert_eq!(std::fs::read(&out).unwrap(), first);
}

#[test]
fn constant_cauchy_data_give_ones() {
    let o = fractel(&["solve", "--alpha", "0.7", "--b", "0.4", "--c", "0", "--tau1", "1", "--x-range", "-3:3", "--nx", "5"]);
    assert_eq!(o.status.code(), Some(2), "a grid without y must be rejected");
    assert!(stderr(&o).contains("--y"), "{}", stderr(&o));
    let o = fractel(&[
        "solve", "--alpha", "0.7", "--b", "0.4", "--c", "0", "--tau1", "1", "--x-range", "-3:3", "--nx", "5", "--y-range",
        "0.2:1", "--ny", "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for r in rows(&stdout(&o)) {
        assert!((r[2] - 1.0).abs() <= 1e-6, "{r:?}");
    }
}

#[test]
fn zero_rectangle_data_give_zero_field() {
    let o = fractel(&[
        "solve", "--alpha", "1.3", "--variant", "rect", "--i", "0", "--j", "0", "--a1", "0", "--a2", "1", "--tau1", "0",
        "--tau2", "0", "--x-range", "0:1", "--nx", "4", "--y-range", "0.25:1", "--ny", "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(rows(&stdout(&o)).iter().all(|r| r[2] == 0.0));
}

#[test]
fn gaussian_cauchy_problem_matches_the_pinned_oracle_run() {
    // Nodes of the 201x200 FD oracle at y = 1, |x| <= 2, frozen from an
    // earlier `solve --method fd` run.
    let pinned = rows(include_str!("data/cauchy_gaussian_fd_y1.csv"));
    let o = fractel(&[
        "solve", "--alpha", "0.8", "--b", "0.5", "--c", "0.25", "--tau1", "exp(-x^2)", "--method", "fd", "--nx", "201",
        "--ny", "200",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fd = rows(&stdout(&o));
    for p in &pinned {
        let r = fd.iter().find(|r| r[0] == p[0] && r[1] == p[1]).expect("pinned node present");
        assert_eq!(r[2].to_bits(), p[2].to_bits(), "FD oracle drifted at x={}", p[0]);
    }
    // The analytic solution agrees with the pinned oracle to its accuracy.
    let xs: Vec<f64> = pinned.iter().step_by(11).map(|p| p[0]).collect();
    let scale = pinned.iter().fold(0.0f64, |m, p| m.max(p[2].abs()));
    for (k, &x) in xs.iter().enumerate() {
        let o = fractel(&[
            "solve", "--alpha", "0.8", "--b", "0.5", "--c", "0.25", "--tau1", "exp(-x^2)", "--x", &format!("{x:?}"), "--y", "1",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let u: f64 = stdout(&o).trim().parse().unwrap();
        let want = pinned[11 * k][2];
        assert!((u - want).abs() <= 5e-3 * scale, "x={x}: {u} vs {want}");
    }
}

#[test]
fn parse_errors_echo_offset_and_caret() {
    let o = fractel(&["solve", "--alpha", "0.5", "--tau1", "sin(", "--x", "0", "--y", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("byte 4"), "{err}");
    assert!(err.contains("sin(\n    ^"), "{err}");
}

#[test]
fn exit_codes_by_failure_class() {
    let code = |args: &[&str]| fractel(args).status.code();
    // missing tau2 when alpha > 1
    assert_eq!(code(&["solve", "--alpha", "1.5", "--tau1", "1", "--x", "0", "--y", "1"]), Some(2));
    // wrong variable in an initial datum
    assert_eq!(code(&["solve", "--alpha", "0.5", "--tau1", "y", "--x", "0", "--y", "1"]), Some(2));
    // division by zero while evaluating data
    assert_eq!(code(&["solve", "--alpha", "0.5", "--tau1", "1/(x-x)", "--x", "0", "--y", "1"]), Some(2));
    // growth rate beyond the admissible limit
    assert_eq!(code(&["solve", "--alpha", "0.5", "--tau1", "1", "--growth-rho", "10", "--x", "0", "--y", "1"]), Some(2));
    // unknown flag
    assert_eq!(code(&["gamma", "--alpha", "1", "--bogus"]), Some(2));
    // numerical failure: series overflow
    assert_eq!(code(&["specfun", "f01", "--nu", "1", "--z", "1e300"]), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_fractel"))
        .env("FRACTEL_THREADS", "zero")
        .args(["gamma", "--alpha", "1", "--x", "0", "--y", "1"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sampled_data_and_spec_files() {
    let dir = scratch("spec");
    let samples = dir.join("ones.csv");
    std::fs::write(&samples, "x,u\n-10,1\n0,1\n10,1\n").unwrap();
    let spec = dir.join("problem.json");
    std::fs::write(
        &spec,
        format!(r#"{{"alpha": 0.9, "b": 0.2, "variant": "half", "i": 1, "a1": -1, "t_max": 1, "tau1": "@{}"}}"#, samples.display()),
    )
    .unwrap();
    let o = fractel(&["solve", "--spec", path_str(&spec), "--x-range", "-1:2", "--nx", "4", "--y", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for r in rows(&stdout(&o)) {
        assert!((r[2] - 1.0).abs() < 1e-6, "{r:?}");
    }
    // Flags override the file: c = 1 makes the constant decay.
    let o = fractel(&["solve", "--spec", path_str(&spec), "--c", "1", "--x", "0", "--y", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let u: f64 = stdout(&o).trim().parse().unwrap();
    assert!(u < 0.9, "{u}");
    std::fs::write(&spec, r#"{"alpha": 0.9, "tau1": "1", "colour": 3}"#).unwrap();
    let o = fractel(&["solve", "--spec", path_str(&spec), "--x", "0", "--y", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));
}

#[test]
fn green_and_specfun_commands() {
    let o = fractel(&["green", "--alpha", "0.8", "--kind", "rect", "--i", "0", "--j", "0", "--a2", "1", "--t", "0.3", "--x", "1", "--y", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).trim().parse::<f64>().unwrap().abs() < 1e-14);
    let o = fractel(&["green", "--alpha", "0.8", "--kind", "half", "--a2", "1", "--t", "0.3", "--x", "1", "--y", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fractel(&["specfun", "wright", "--beta", "0.5", "--mu", "0.5", "--z-range", "-2:2", "--n", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for r in rows(&stdout(&o)) {
        let exact = (-r[0] * r[0] / 4.0).exp() / std::f64::consts::PI.sqrt();
        assert!((r[2] - exact).abs() < 1e-12 * exact);
    }
}

#[test]
fn verify_scenarios_report_and_exit() {
    let dir = scratch("verify");
    let report = dir.join("report.json");
    let o = fractel(&["verify", "constant-solution", "--report", path_str(&report)]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["value"].as_f64().unwrap() <= 1e-6));

    let o = fractel(&["verify", "heat-kernel"]);
    assert!(o.status.success(), "{}", stdout(&o));

    let o = fractel(&["verify", "cauchy-vs-fd", "--levels", "3", "--report", path_str(&report)]);
    assert!(o.status.success(), "{}", stdout(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let gaps: Vec<f64> =
        r["checks"][0]["details"]["gaps"].as_array().unwrap().iter().map(|g| g.as_f64().unwrap()).collect();
    assert_eq!(gaps.len(), 3);
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");

    // A near-wave problem on a coarse grid misses the 5% target: exit 1.
    let spec = dir.join("wave.json");
    std::fs::write(
        &spec,
        r#"{"alpha": 1.9, "variant": "rect", "i": 0, "j": 0, "a1": 0, "a2": 1, "tau1": "sin(pi*x)", "tau2": "0"}"#,
    )
    .unwrap();
    let o = fractel(&["verify", "--spec", path_str(&spec), "--levels", "1"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}
