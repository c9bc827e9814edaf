//! Verification scenarios with a machine-readable report.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, ValueEnum};
use fractel::kernel::{Kernel, TelegraphParams};
use fractel::oracle::{fd_solve, FDConfig};
use fractel::quad::QuadratureConfig;
use fractel::solver::{Data1, ProblemSpec, ScalarField, Solver, SolverConfig, Variant};
use fractel::specfun::{mittag_leffler, WrightEval};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{self, CliError, RunManifest};
use crate::problem::ProblemArgs;

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum Scenario {
    /// Constant data with c = 0 reproduce u = 1 on every variant.
    ConstantSolution,
    /// b = c = 0 reduces the kernel to the diffusion-wave and heat kernels.
    HeatKernel,
    /// Constant Cauchy data with b = 0, c = 1 decay like E_α(-y^α).
    MittagLeffler,
    /// Gaussian Cauchy problem against the finite-difference oracle.
    CauchyVsFd,
    /// Sine data on a Dirichlet rectangle against the finite-difference oracle.
    RectVsFd,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(value_enum, required_unless_present = "spec")]
    scenario: Option<Scenario>,
    /// Compare the analytic solution of this problem with the FD oracle.
    #[arg(long, conflicts_with = "scenario")]
    spec: Option<PathBuf>,
    /// Refinement levels for the FD comparisons (level k uses 50·2^k steps).
    #[arg(long, default_value_t = 3)]
    levels: u32,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    pass: bool,
    value: f64,
    threshold: f64,
    #[serde(skip_serializing_if = "Value::is_null")]
    details: Value,
}

fn check(name: impl Into<String>, value: f64, threshold: f64, details: Value) -> Check {
    Check {
        name: name.into(),
        pass: value <= threshold,
        value,
        threshold,
        details,
    }
}

#[derive(Serialize)]
struct Report<'a> {
    schema: u32,
    scenario: String,
    pass: bool,
    checks: &'a [Check],
    manifest: &'a RunManifest,
}

pub fn cmd_verify(a: VerifyArgs, mut manifest: RunManifest, start: Instant) -> Result<ExitCode, CliError> {
    if !(1..=5).contains(&a.levels) {
        return Err(CliError::config(format!("--levels must be between 1 and 5, got {}", a.levels)));
    }
    let (name, checks) = match (a.scenario, &a.spec) {
        (Some(s), _) => {
            let name = s.to_possible_value().expect("scenario names").get_name().to_string();
            let checks = match s {
                Scenario::ConstantSolution => constant_solution()?,
                Scenario::HeatKernel => heat_kernel()?,
                Scenario::MittagLeffler => mittag()?,
                Scenario::CauchyVsFd => {
                    let p = TelegraphParams::new(0.8, 0.5, 0.25)?;
                    let spec = ProblemSpec::cauchy(1.0, Data1::new("exp(-x^2)", |x| Ok((-x * x).exp())));
                    fd_sweep(&p, &spec, a.levels)?
                }
                Scenario::RectVsFd => {
                    let p = TelegraphParams::new(0.6, 0.3, 0.1)?;
                    let spec = ProblemSpec::rect(0, 0, 0.0, 1.0, 1.0, Data1::new("sin(pi x)", |x| Ok((PI * x).sin())));
                    fd_sweep(&p, &spec, a.levels)?
                }
            };
            (name, checks)
        }
        (None, Some(path)) => {
            let built = ProblemArgs {
                spec: Some(path.clone()),
                ..ProblemArgs::default()
            }
            .build()?;
            manifest.params = built.description;
            (format!("spec:{}", path.display()), fd_sweep(&built.params, &built.spec, a.levels)?)
        }
        (None, None) => return Err(CliError::config("give a scenario or --spec")),
    };
    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        println!(
            "{} {}: {:.3e} (threshold {:.1e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.threshold
        );
    }
    println!("{name}: {}", if pass { "all checks passed" } else { "FAILED" });
    manifest.finish(start);
    if let Some(path) = &a.report {
        manifest.outputs.push(path.display().to_string());
        let report = Report {
            schema: 1,
            scenario: name,
            pass,
            checks: &checks,
            manifest: &manifest,
        };
        output::write_file(path, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
    }
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn at_rest(p: &TelegraphParams, spec: ProblemSpec) -> ProblemSpec {
    if p.n() == 2 {
        spec.with_tau2(Data1::constant(0.0))
    } else {
        spec
    }
}

fn constant_solution() -> Result<Vec<Check>, CliError> {
    let mut checks = vec![];
    for &(alpha, b) in &[(0.5, 0.4), (1.5, 0.3)] {
        let p = TelegraphParams::new(alpha, b, 0.0)?;
        let s = Solver::new(p, SolverConfig::default())?;
        let one = || Data1::constant(1.0);
        let mut specs = vec![
            ("Cauchy".to_string(), ProblemSpec::cauchy(1.0, one())),
            ("P_0".to_string(), ProblemSpec::half(0, 0.0, 1.0, one()).with_phi1(one())),
            ("P_1".to_string(), ProblemSpec::half(1, 0.0, 1.0, one())),
        ];
        for i in 0..=1 {
            for j in 0..=1 {
                let mut spec = ProblemSpec::rect(i, j, 0.0, 1.0, 1.0, one());
                if i == 0 {
                    spec = spec.with_phi1(one());
                }
                if j == 0 {
                    spec = spec.with_phi2(one());
                }
                specs.push((format!("P_{i}{j}"), spec));
            }
        }
        for (name, spec) in specs {
            let spec = at_rest(&p, spec);
            let pts = [(0.1, 0.2), (0.5, 0.6), (0.9, 1.0)];
            let devs: Vec<f64> = pts
                .par_iter()
                .map(|&(x, y)| s.solve(&spec, x, y).map(|v| (v.value - 1.0).abs()))
                .collect::<Result<_, _>>()?;
            let worst = devs.iter().copied().fold(0.0, f64::max);
            checks.push(check(format!("{name} alpha={alpha} max|u-1|"), worst, 1e-6, Value::Null));
        }
    }
    Ok(checks)
}

fn heat_kernel() -> Result<Vec<Check>, CliError> {
    let mut checks = vec![];
    for &alpha in &[0.5, 1.0, 1.5] {
        let p = TelegraphParams::new(alpha, 0.0, 0.0)?;
        let k = Kernel::new(p, QuadratureConfig::default())?;
        let beta = p.beta();
        let w = WrightEval::new(beta)?;
        let pts: Vec<(f64, f64)> =
            (0..21).flat_map(|i| (0..11).map(move |j| (-3.0 + 0.3 * f64::from(i), 0.1 + 0.19 * f64::from(j)))).collect();
        let errs: Vec<(f64, f64)> = pts
            .par_iter()
            .map(|&(x, y)| -> fractel::Result<(f64, f64)> {
                let g = k.gamma_fs(x, y)?;
                let wave = 0.5 * y.powf(beta - 1.0) * w.phi(beta, -x.abs() * y.powf(-beta))?;
                let heat = (-x * x / (4.0 * y)).exp() / (2.0 * (PI * y).sqrt());
                Ok(((g - wave).abs() / wave.abs(), (g - heat).abs() / heat.abs()))
            })
            .collect::<Result<_, _>>()?;
        let worst = errs.iter().map(|e| e.0).fold(0.0, f64::max);
        checks.push(check(format!("alpha={alpha} diffusion-wave kernel rel err"), worst, 1e-8, Value::Null));
        if alpha == 1.0 {
            let worst = errs.iter().map(|e| e.1).fold(0.0, f64::max);
            checks.push(check("alpha=1 heat kernel rel err", worst, 1e-8, Value::Null));
        }
    }
    Ok(checks)
}

fn mittag() -> Result<Vec<Check>, CliError> {
    let mut checks = vec![];
    for &alpha in &[0.5, 1.0, 1.5] {
        let p = TelegraphParams::new(alpha, 0.0, 1.0)?;
        let s = Solver::new(p, SolverConfig::default())?;
        let spec = at_rest(&p, ProblemSpec::cauchy(1.0, Data1::constant(1.0)));
        let mut worst = 0.0f64;
        for &y in &[0.25f64, 0.5, 1.0] {
            let e = mittag_leffler(alpha, -y.powf(alpha))?;
            worst = worst.max((s.solve_cauchy(&spec, 0.3, y)? - e).abs());
        }
        checks.push(check(format!("alpha={alpha} max|u-E_alpha|"), worst, 1e-6, Value::Null));
    }
    Ok(checks)
}

fn bilinear(u: &ScalarField, x: f64, y: f64) -> f64 {
    let g = u.grid;
    let fx = (x - g.x_min) / (g.x_max - g.x_min) * (g.nx - 1) as f64;
    let fy = (y - g.y_min) / (g.y_max - g.y_min) * (g.ny - 1) as f64;
    let i = (fx.floor().max(0.0) as usize).min(g.nx - 2);
    let j = (fy.floor().max(0.0) as usize).min(g.ny - 2);
    let (wx, wy) = (fx - i as f64, fy - j as f64);
    u.at(i, j) * (1.0 - wx) * (1.0 - wy)
        + u.at(i + 1, j) * wx * (1.0 - wy)
        + u.at(i, j + 1) * (1.0 - wx) * wy
        + u.at(i + 1, j + 1) * wx * wy
}

/// Compare the analytic solution with FD fields over `levels` refinements
/// at 9×5 fixed points, reporting L∞ relative gaps and observed orders.
fn fd_sweep(p: &TelegraphParams, spec: &ProblemSpec, levels: u32) -> Result<Vec<Check>, CliError> {
    let t = spec.t_max;
    let xs: Vec<f64> = match spec.variant {
        Variant::Cauchy => (0..9).map(|k| -2.0 + 0.5 * f64::from(k)).collect(),
        Variant::HalfStrip { a1, .. } => (0..9).map(|k| a1 + 0.25 * f64::from(k + 1)).collect(),
        Variant::Rect { a1, a2, .. } => (0..9).map(|k| a1 + (a2 - a1) * 0.1 * f64::from(k + 1)).collect(),
    };
    let pts: Vec<(f64, f64)> = (1..=5).flat_map(|j| xs.iter().map(move |&x| (x, t * 0.2 * f64::from(j)))).collect();
    let s = Solver::new(*p, SolverConfig::default())?;
    let exact: Vec<f64> = pts.par_iter().map(|&(x, y)| s.solve(spec, x, y).map(|v| v.value)).collect::<Result<_, _>>()?;
    let scale = exact.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut gaps = vec![];
    let mut sizes = vec![];
    for k in 0..levels {
        let steps = 50usize << k;
        let u = fd_solve(p, spec, &FDConfig::new(p, steps + 1, steps))?;
        let gap = pts.iter().zip(&exact).map(|(&(x, y), e)| (bilinear(&u, x, y) - e).abs()).fold(0.0, f64::max);
        gaps.push(gap / scale);
        sizes.push([steps + 1, steps]);
    }
    let orders: Vec<f64> = gaps.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let details = json!({"grids": sizes, "gaps": gaps, "observed_orders": orders});
    let mut checks = vec![check("final L-inf relative gap", gaps[gaps.len() - 1], 0.05, details)];
    if levels > 1 {
        let worst_ratio = gaps.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        let mut c = check("gap ratio between levels (must shrink)", worst_ratio, 1.0, Value::Null);
        c.pass = worst_ratio < 1.0;
        checks.push(c);
    }
    Ok(checks)
}
