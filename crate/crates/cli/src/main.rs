//! `fractel`: command-line front end for the fractional telegraph library.
//!
//! Exit codes: 0 success, 1 failed verification, 2 configuration or input
//! error, 3 numerical failure.

mod output;
mod problem;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fractel::green::{Green, ImageSeriesConfig};
use fractel::kernel::{Kernel, TelegraphParams};
use fractel::oracle::{fd_solve, FDConfig};
use fractel::quad::QuadratureConfig;
use fractel::solver::{FieldMeta, GridSpec, ScalarField, Solver, SolverConfig};
use fractel::specfun::{f01, gamma, mittag_leffler, recip_gamma, WrightEval};
use rayon::prelude::*;
use serde_json::json;

use output::{fmt17, CliError, RunManifest};
use problem::ProblemArgs;

#[derive(Parser)]
#[command(name = "fractel", version, about = "Fundamental solution, Green functions and solvers for the time-fractional telegraph equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

// Parsed once per process; boxing the large variants buys nothing.
#[allow(clippy::large_enum_variant)]
#[derive(Subcommand)]
enum Command {
    /// Evaluate a special function at one point or over a range.
    Specfun(SpecfunArgs),
    /// Evaluate the fundamental solution or its derivatives.
    Gamma(GammaArgs),
    /// Evaluate a half-strip or rectangle Green function.
    Green(GreenArgs),
    /// Solve a Cauchy, half-strip or rectangle problem on a grid.
    Solve(SolveArgs),
    /// Run a verification scenario and report pass/fail per check.
    Verify(verify::VerifyArgs),
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<TelegraphParams, CliError> {
        Ok(TelegraphParams::new(self.alpha, self.b, self.c)?)
    }
}

/// A closed interval written `lo:hi`.
#[derive(Clone, Copy, Debug)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

fn parse_range(s: &str) -> Result<Range, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number `{t}` in range `{s}`"));
    Ok(Range { lo: num(lo)?, hi: num(hi)? })
}

#[derive(Args, Clone, Copy)]
pub struct GridArgs {
    /// Single x value.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "x_range")]
    x: Option<f64>,
    /// x interval `lo:hi`, sampled at `--nx` points.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    x_range: Option<Range>,
    #[arg(long, default_value_t = 51)]
    nx: usize,
    /// Single y value.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "y_range")]
    y: Option<f64>,
    /// y interval `lo:hi`, sampled at `--ny` points.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    y_range: Option<Range>,
    #[arg(long, default_value_t = 51)]
    ny: usize,
}

impl GridArgs {
    fn grid(&self) -> Result<GridSpec, CliError> {
        let axis = |name: &str, v: Option<f64>, r: Option<Range>, n: usize| match (v, r) {
            (Some(v), _) => Ok((v, v, 1)),
            (None, Some(r)) => Ok((r.lo, r.hi, n)),
            (None, None) => Err(CliError::config(format!("give --{name} or --{name}-range"))),
        };
        let (x0, x1, nx) = axis("x", self.x, self.x_range, self.nx)?;
        let (y0, y1, ny) = axis("y", self.y, self.y_range, self.ny)?;
        Ok(GridSpec::new(x0, x1, nx, y0, y1, ny)?)
    }
}

#[derive(Args)]
struct OutArgs {
    /// Write the field here (CSV, or JSON with `--format json`) and the run
    /// manifest next to it as `<stem>.manifest.json`. Without it, a single
    /// value is printed, and a grid is printed as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SpecfunArgs {
    #[arg(value_enum)]
    function: SpecialFunction,
    /// Wright order: φ(-β, μ; z).
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    /// ₀F₁(ν; z) parameter.
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
    /// Mittag-Leffler order.
    #[arg(long)]
    alpha: Option<f64>,
    /// Argument (`x` for the gamma functions).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "z_range")]
    z: Option<f64>,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    z_range: Option<Range>,
    #[arg(long, default_value_t = 101)]
    n: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpecialFunction {
    Wright,
    F01,
    Mittag,
    Gamma,
    Rgamma,
}

#[derive(Args)]
struct GammaArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Spatial derivative order.
    #[arg(long, default_value_t = 0)]
    m: usize,
    /// Riemann–Liouville order in y (negative for integrals).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    nu: f64,
    /// Relative tolerance of the τ quadrature.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum GreenKind {
    Half,
    Rect,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum GreenDeriv {
    Value,
    Dx,
    Dt,
}

#[derive(Args)]
struct GreenArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum)]
    kind: GreenKind,
    /// Condition at a1: 0 prescribes the value, 1 the x-derivative.
    #[arg(long, default_value_t = 0)]
    i: u8,
    /// Condition at a2 (rectangles).
    #[arg(long, default_value_t = 0)]
    j: u8,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a1: f64,
    #[arg(long, allow_hyphen_values = true)]
    a2: Option<f64>,
    /// Source point.
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long, value_enum, default_value_t = GreenDeriv::Value)]
    deriv: GreenDeriv,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    tol: Option<f64>,
    /// Bound on the discarded image-series tail.
    #[arg(long)]
    image_tol: Option<f64>,
    #[arg(long)]
    max_images: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Method {
    Analytic,
    Fd,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Method::Analytic)]
    method: Method,
    /// Level weight of the finite-difference scheme (`--method fd`).
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Relative tolerance of the outer quadratures.
    #[arg(long)]
    tol: Option<f64>,
    /// Relative tolerance of the kernel τ quadratures.
    #[arg(long)]
    kernel_tol: Option<f64>,
    #[arg(long)]
    image_tol: Option<f64>,
    #[command(flatten)]
    out: OutArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().collect();
    match run(cli, &argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli, argv: &[String]) -> Result<ExitCode, CliError> {
    output::init_threads()?;
    let start = Instant::now();
    let manifest = RunManifest::new(argv);
    match cli.command {
        Command::Specfun(a) => cmd_specfun(a, manifest, start),
        Command::Gamma(a) => cmd_gamma(a, manifest, start),
        Command::Green(a) => cmd_green(a, manifest, start),
        Command::Solve(a) => cmd_solve(a, manifest, start),
        Command::Verify(a) => verify::cmd_verify(a, manifest, start),
    }
}

/// Evaluate `f` at every grid point in parallel; the first failure in grid
/// order is reported with its location.
fn eval_grid<F>(grid: &GridSpec, f: F) -> Result<Vec<f64>, fractel::Error>
where
    F: Fn(f64, f64) -> fractel::Result<f64> + Sync,
{
    let results: Vec<fractel::Result<f64>> =
        (0..grid.len()).into_par_iter().map(|n| f(grid.x(n % grid.nx), grid.y(n / grid.nx))).collect();
    if grid.len() == 1 {
        return results.into_iter().collect();
    }
    let completed = results.iter().filter(|r| r.is_ok()).count();
    results
        .into_iter()
        .enumerate()
        .map(|(n, r)| {
            r.map_err(|e| fractel::Error::AtPoint {
                x: grid.x(n % grid.nx),
                y: grid.y(n / grid.nx),
                completed,
                total: grid.len(),
                source: Box::new(e),
            })
        })
        .collect()
}

/// Print a single value, print a grid as CSV, or write the field and its
/// manifest to `--out`.
fn emit(field: ScalarField, out: &OutArgs, mut manifest: RunManifest, start: Instant) -> Result<ExitCode, CliError> {
    manifest.field = json!({"source": field.meta.source, "settings": field.meta.settings});
    manifest.warnings.extend(field.meta.warnings.iter().cloned());
    for w in &field.meta.warnings {
        eprintln!("warning: {w}");
    }
    match &out.out {
        None if field.values.len() == 1 => println!("{}", fmt17(field.values[0])),
        None => match out.format {
            Format::Csv => print!("{}", field.to_csv()),
            Format::Json => println!("{}", field.to_json()),
        },
        Some(path) => {
            let body = match out.format {
                Format::Csv => field.to_csv(),
                Format::Json => field.to_json(),
            };
            manifest.outputs.push(path.display().to_string());
            output::write_file(path, &body)?;
            manifest.finish(start);
            output::write_file(&output::manifest_path(path), &manifest.to_json())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_specfun(a: SpecfunArgs, mut manifest: RunManifest, start: Instant) -> Result<ExitCode, CliError> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::config(format!("this function needs --{name}")));
    let eval: Box<dyn Fn(f64) -> fractel::Result<f64> + Sync> = match a.function {
        SpecialFunction::Wright => {
            let w = WrightEval::new(need(a.beta, "beta")?)?;
            let mu = need(a.mu, "mu")?;
            Box::new(move |z| w.phi(mu, z))
        }
        SpecialFunction::F01 => {
            let nu = need(a.nu, "nu")?;
            Box::new(move |z| f01(nu, z))
        }
        SpecialFunction::Mittag => {
            let alpha = need(a.alpha, "alpha")?;
            Box::new(move |z| mittag_leffler(alpha, z))
        }
        SpecialFunction::Gamma => Box::new(|x| Ok(gamma(x))),
        SpecialFunction::Rgamma => Box::new(|x| Ok(recip_gamma(x))),
    };
    let (lo, hi, n) = match (a.z, a.z_range) {
        (Some(z), _) => (z, z, 1),
        (None, Some(r)) => (r.lo, r.hi, a.n),
        (None, None) => return Err(CliError::config("give --z or --z-range")),
    };
    let name = a.function.to_possible_value().map(|v| v.get_name().to_string());
    manifest.params = json!({"function": name, "beta": a.beta, "mu": a.mu, "nu": a.nu, "alpha": a.alpha, "z": [lo, hi, n]});
    // Reuse the field layout with y fixed at 0; the CSV column `x` is the argument.
    let grid = GridSpec::new(lo, hi, n, 0.0, 0.0, 1)?;
    let values = eval_grid(&grid, |z, _| eval(z))?;
    let meta = FieldMeta {
        source: "specfun".into(),
        settings: manifest.params.as_object().cloned().unwrap_or_default(),
        warnings: vec![],
    };
    emit(ScalarField::new(grid, values, meta)?, &a.out, manifest, start)
}

fn quad_config(tol: Option<f64>) -> Result<QuadratureConfig, CliError> {
    let q = QuadratureConfig::default();
    Ok(match tol {
        Some(t) => q.with_rel_tol(t).validated()?,
        None => q,
    })
}

fn cmd_gamma(a: GammaArgs, mut manifest: RunManifest, start: Instant) -> Result<ExitCode, CliError> {
    let p = a.params.params()?;
    let q = quad_config(a.tol)?;
    let grid = a.grid.grid()?;
    let k = Kernel::new(p, q)?;
    manifest.params = json!({"params": p, "m": a.m, "nu": a.nu, "grid": grid});
    manifest.tolerances = json!({"quadrature": q});
    let values = eval_grid(&grid, |x, y| if a.m == 0 && a.nu == 0.0 { k.gamma_fs(x, y) } else { k.gamma_deriv(a.m, a.nu, x, y) })?;
    let meta = FieldMeta {
        source: "gamma".into(),
        settings: manifest.params.as_object().cloned().unwrap_or_default(),
        warnings: vec![],
    };
    emit(ScalarField::new(grid, values, meta)?, &a.out, manifest, start)
}

fn cmd_green(a: GreenArgs, mut manifest: RunManifest, start: Instant) -> Result<ExitCode, CliError> {
    let p = a.params.params()?;
    let q = quad_config(a.tol)?;
    let mut images = ImageSeriesConfig::default();
    if let Some(t) = a.image_tol {
        images.tol = t;
    }
    if let Some(m) = a.max_images {
        images.max_images = m;
    }
    let g = Green::new(Kernel::new(p, q)?, images)?;
    let grid = a.grid.grid()?;
    let a2 = match (a.kind, a.a2) {
        (GreenKind::Rect, Some(a2)) => a2,
        (GreenKind::Rect, None) => return Err(CliError::config("rectangle Green functions need --a2")),
        (GreenKind::Half, Some(_)) => return Err(CliError::config("--a2 only applies to --kind rect")),
        (GreenKind::Half, None) => f64::INFINITY,
    };
    manifest.params = json!({
        "params": p,
        "kind": a.kind.to_possible_value().map(|v| v.get_name().to_string()),
        "deriv": a.deriv.to_possible_value().map(|v| v.get_name().to_string()),
        "i": a.i, "j": a.j, "a1": a.a1, "a2": a.a2, "t": a.t, "s": a.s, "grid": grid,
    });
    manifest.tolerances = json!({"quadrature": q, "images": images});
    let capped = std::sync::atomic::AtomicUsize::new(0);
    let max_images = std::sync::atomic::AtomicUsize::new(0);
    let values = eval_grid(&grid, |x, y| {
        let (t, s) = (a.t, a.s);
        match a.kind {
            GreenKind::Half => match a.deriv {
                GreenDeriv::Value => g.half(a.i, a.a1, x, y, t, s),
                GreenDeriv::Dx => g.half_dx(a.i, a.a1, x, y, t, s),
                GreenDeriv::Dt => g.half_dt(a.i, a.a1, x, y, t, s),
            },
            GreenKind::Rect => {
                let v = match a.deriv {
                    GreenDeriv::Value => g.rect(a.i, a.j, a.a1, a2, x, y, t, s),
                    GreenDeriv::Dx => g.rect_dx(a.i, a.j, a.a1, a2, x, y, t, s),
                    GreenDeriv::Dt => g.rect_dt(a.i, a.j, a.a1, a2, x, y, t, s),
                }?;
                use std::sync::atomic::Ordering::Relaxed;
                max_images.fetch_max(v.truncation.images, Relaxed);
                capped.fetch_add(usize::from(v.truncation.capped), Relaxed);
                Ok(v.value)
            }
        }
    })?;
    let mut meta = FieldMeta {
        source: "green".into(),
        settings: manifest.params.as_object().cloned().unwrap_or_default(),
        warnings: vec![],
    };
    if a.kind == GreenKind::Rect {
        meta.settings.insert("max_images".into(), json!(max_images.into_inner()));
        let capped = capped.into_inner();
        if capped > 0 {
            meta.warnings.push(format!("image series capped at {} images at {capped} points", images.max_images));
        }
    }
    emit(ScalarField::new(grid, values, meta)?, &a.out, manifest, start)
}

fn cmd_solve(a: SolveArgs, mut manifest: RunManifest, start: Instant) -> Result<ExitCode, CliError> {
    let built = a.problem.build()?;
    let (p, spec) = (built.params, built.spec);
    manifest.params = built.description;
    let field = match a.method {
        Method::Analytic => {
            let mut cfg = SolverConfig::default();
            if let Some(t) = a.tol {
                cfg.outer.rel_tol = t;
            }
            if let Some(t) = a.kernel_tol {
                cfg.kernel.rel_tol = t;
            }
            if let Some(t) = a.image_tol {
                cfg.images.tol = t;
            }
            let cfg = cfg.validated()?;
            manifest.tolerances = serde_json::to_value(cfg).expect("config serializes");
            let grid = a.grid.grid()?;
            Solver::new(p, cfg)?.eval_field(&spec, &grid)?
        }
        Method::Fd => {
            if a.grid.x.is_some() || a.grid.y.is_some() || a.grid.y_range.is_some() {
                return Err(CliError::config(
                    "--method fd solves on its own grid: give --nx, --ny and optionally --x-range as the window",
                ));
            }
            let mut cfg = FDConfig::new(&p, a.grid.nx, a.grid.ny).with_theta(a.theta);
            if let Some(r) = a.grid.x_range {
                cfg = cfg.with_window(r.lo, r.hi);
            }
            manifest.tolerances = json!({"fd": {"nx": cfg.nx, "ny": cfg.ny, "theta": cfg.theta, "window": cfg.window}});
            fd_solve(&p, &spec, &cfg)?
        }
    };
    emit(field, &a.out, manifest, start)
}
