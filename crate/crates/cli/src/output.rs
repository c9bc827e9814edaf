//! Errors with exit codes, run manifests, and file output.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

/// A failure with its exit code: 2 for configuration and input problems,
/// 3 for numerical failure.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<fractel::Error> for CliError {
    fn from(e: fractel::Error) -> Self {
        CliError {
            code: if e.is_config() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

/// What produced an output file, with enough detail to rerun it: `argv`
/// replays the run exactly.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema: u32,
    pub command: String,
    pub argv: Vec<String>,
    pub params: Value,
    pub tolerances: Value,
    /// Producer and settings reported by the field itself.
    pub field: Value,
    pub version: &'static str,
    pub threads: usize,
    pub wall_time_s: f64,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(argv: &[String]) -> Self {
        RunManifest {
            schema: 1,
            command: argv.get(1).cloned().unwrap_or_default(),
            argv: argv.iter().skip(1).cloned().collect(),
            params: Value::Null,
            tolerances: Value::Null,
            field: Value::Null,
            version: env!("CARGO_PKG_VERSION"),
            threads: rayon::current_num_threads(),
            wall_time_s: 0.0,
            warnings: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn finish(&mut self, start: Instant) {
        self.wall_time_s = start.elapsed().as_secs_f64();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }
}

/// `out.csv` -> `out.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

pub fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

/// Cap rayon's pool at `FRACTEL_THREADS` when set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("FRACTEL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("FRACTEL_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot configure threads: {e}")))
}

/// 17 significant digits, in plain notation for moderate magnitudes.
pub fn fmt17(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        format!("{v:.16}")
    } else if (1e-4..1e16).contains(&a) {
        let digits = 16 - a.log10().floor() as i32;
        format!("{v:.*}", digits.max(0) as usize)
    } else {
        format!("{v:.16e}")
    }
}
