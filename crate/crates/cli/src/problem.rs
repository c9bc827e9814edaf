//! Problem specification from flags and/or a JSON spec file.
//!
//! A spec file is a flat JSON object with the same keys as the flags
//! (`alpha`, `b`, `c`, `variant`, `i`, `j`, `a1`, `a2`, `t_max`, `tau1`,
//! `tau2`, `phi1`, `phi2`, `f`, `growth_k`, `growth_rho`). Flags override
//! file values. Data are expressions, or `@path.csv` for sampled
//! one-variable data interpolated linearly.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fractel::exprparse::{parse, Var};
use fractel::kernel::TelegraphParams;
use fractel::solver::{Data1, Data2, GrowthEnvelope, ProblemSpec, Variant};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::output::CliError;

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Cauchy,
    Half,
    Rect,
}

/// Every field optional so flags and a spec file can be merged.
#[derive(Args, Debug, Default, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemArgs {
    /// JSON spec file; flags override its entries.
    #[arg(long)]
    #[serde(skip)]
    pub spec: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantKind>,
    /// Condition at a1: 0 prescribes u, 1 prescribes u_x.
    #[arg(long)]
    pub i: Option<u8>,
    /// Condition at a2.
    #[arg(long)]
    pub j: Option<u8>,
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a2: Option<f64>,
    /// Time horizon T.
    #[arg(long, visible_alias = "T")]
    pub t_max: Option<f64>,
    /// u(x, 0), an expression in x or `@file.csv`.
    #[arg(long, allow_hyphen_values = true)]
    pub tau1: Option<String>,
    /// u_y(x, 0) (required iff alpha > 1).
    #[arg(long, allow_hyphen_values = true)]
    pub tau2: Option<String>,
    /// Wall datum at a1, an expression in y or `@file.csv`.
    #[arg(long, allow_hyphen_values = true)]
    pub phi1: Option<String>,
    /// Wall datum at a2.
    #[arg(long, allow_hyphen_values = true)]
    pub phi2: Option<String>,
    /// Source f(x, y), an expression.
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Growth envelope constant K in |data| <= K exp(rho |x|^{1/(1-beta)}).
    #[arg(long)]
    pub growth_k: Option<f64>,
    #[arg(long)]
    pub growth_rho: Option<f64>,
}

pub struct Built {
    pub params: TelegraphParams,
    pub spec: ProblemSpec,
    /// The merged specification, for manifests.
    pub description: Value,
}

macro_rules! merge {
    ($flags:ident, $file:ident, $($field:ident),*) => {
        ProblemArgs { spec: None, $($field: $flags.$field.clone().or($file.$field.clone()),)* }
    };
}

impl ProblemArgs {
    fn merged(&self) -> Result<ProblemArgs, CliError> {
        let file = match &self.spec {
            Some(path) => read_spec_file(path)?,
            None => ProblemArgs::default(),
        };
        let flags = self;
        Ok(merge!(flags, file, alpha, b, c, variant, i, j, a1, a2, t_max, tau1, tau2, phi1, phi2, f, growth_k, growth_rho))
    }

    pub fn build(&self) -> Result<Built, CliError> {
        let m = self.merged()?;
        let alpha = m.alpha.ok_or_else(|| CliError::config("missing alpha (flag --alpha or spec key `alpha`)"))?;
        let params = TelegraphParams::new(alpha, m.b.unwrap_or(0.0), m.c.unwrap_or(0.0))?;
        let t_max = m.t_max.unwrap_or(1.0);
        let index = |v: Option<u8>, name: &str| v.ok_or_else(|| CliError::config(format!("this variant needs --{name}")));
        let variant = match m.variant.unwrap_or(VariantKind::Cauchy) {
            VariantKind::Cauchy => {
                if m.i.is_some() || m.j.is_some() || m.a1.is_some() || m.a2.is_some() {
                    return Err(CliError::config("the Cauchy problem takes no i, j, a1 or a2"));
                }
                Variant::Cauchy
            }
            VariantKind::Half => {
                if m.j.is_some() || m.a2.is_some() {
                    return Err(CliError::config("the half-strip problem takes no j or a2"));
                }
                Variant::HalfStrip {
                    i: index(m.i, "i")?,
                    a1: m.a1.unwrap_or(0.0),
                }
            }
            VariantKind::Rect => Variant::Rect {
                i: index(m.i, "i")?,
                j: index(m.j, "j")?,
                a1: m.a1.unwrap_or(0.0),
                a2: m.a2.ok_or_else(|| CliError::config("the rectangle problem needs --a2"))?,
            },
        };
        let tau1 = m.tau1.as_deref().ok_or_else(|| CliError::config("missing initial datum --tau1"))?;
        let mut spec = ProblemSpec::new(variant, t_max, data1("tau1", tau1, Var::X)?);
        if let Some(src) = &m.tau2 {
            spec = spec.with_tau2(data1("tau2", src, Var::X)?);
        }
        if let Some(src) = &m.phi1 {
            spec = spec.with_phi1(data1("phi1", src, Var::Y)?);
        }
        if let Some(src) = &m.phi2 {
            spec = spec.with_phi2(data1("phi2", src, Var::Y)?);
        }
        if let Some(src) = &m.f {
            spec = spec.with_source(data2(src)?);
        }
        let mut growth = GrowthEnvelope::default();
        if let Some(k) = m.growth_k {
            growth.constant = k;
        }
        if let Some(r) = m.growth_rho {
            growth.rho = r;
        }
        spec = spec.with_growth(growth);
        spec.validate(&params)?;
        let description = json!({
            "params": params,
            "variant": variant,
            "t_max": t_max,
            "tau1": m.tau1, "tau2": m.tau2, "phi1": m.phi1, "phi2": m.phi2, "f": m.f,
            "growth": growth,
        });
        Ok(Built {
            params,
            spec,
            description,
        })
    }
}

fn read_spec_file(path: &Path) -> Result<ProblemArgs, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("spec file {}: {e}", path.display())))
}

fn parse_expr(name: &str, src: &str) -> Result<fractel::exprparse::Expr, CliError> {
    parse(src).map_err(|e| CliError::config(format!("{name}: {e}\n{}", e.caret(src))))
}

/// One-variable datum: an expression in `var`, or `@file.csv`.
pub fn data1(name: &str, src: &str, var: Var) -> Result<Data1, CliError> {
    if let Some(path) = src.strip_prefix('@') {
        let (xs, vs) = read_samples(Path::new(path))?;
        return Ok(Data1::sampled(src, xs, vs)?);
    }
    let e = parse_expr(name, src)?;
    for other in [Var::X, Var::Y, Var::T, Var::S] {
        if other != var && e.uses(other) {
            return Err(CliError::config(format!(
                "{name} may only use the variable {}, found {}",
                var.name(),
                other.name()
            )));
        }
    }
    Ok(Data1::from_expr(e, var))
}

fn data2(src: &str) -> Result<Data2, CliError> {
    if src.starts_with('@') {
        return Err(CliError::config("the source f must be an expression; sampled files hold one-variable data only"));
    }
    let e = parse_expr("f", src)?;
    if e.uses(Var::T) || e.uses(Var::S) {
        return Err(CliError::config("f may only use the variables x and y"));
    }
    Ok(Data2::from_expr(e))
}

/// Two numeric columns, comma separated; a non-numeric first line is a header.
fn read_samples(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = cols.iter().map(|c| c.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => {
                xs.push(v[0]);
                vs.push(v[1]);
            }
            None if n == 0 => continue,
            _ => {
                return Err(CliError::config(format!(
                    "{} line {}: expected two numbers, got `{line}`",
                    path.display(),
                    n + 1
                )))
            }
        }
    }
    Ok((xs, vs))
}
