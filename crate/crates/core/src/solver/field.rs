//! Values sampled on a uniform `(x, y)` grid, with CSV and JSON forms that
//! round-trip bit-exactly.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid: `nx` points on `[x_min, x_max]` and `ny` on `[y_min, y_max]`.
/// A single point along an axis requires equal end points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

fn axis(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        lo
    } else if i == n - 1 {
        hi
    } else {
        lo + (hi - lo) * (i as f64 / (n - 1) as f64)
    }
}

fn check_axis(name: &str, lo: f64, hi: f64, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::config(format!("grid needs at least one {name} point")));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::config(format!("{name} range must be finite")));
    }
    if (n == 1 && lo != hi) || (n > 1 && !(hi > lo)) {
        return Err(Error::config(format!(
            "{name} range [{lo}, {hi}] with {n} points is not strictly increasing"
        )));
    }
    Ok(())
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, nx: usize, y_min: f64, y_max: f64, ny: usize) -> Result<Self> {
        let g = GridSpec {
            x_min,
            x_max,
            nx,
            y_min,
            y_max,
            ny,
        };
        g.validated()
    }

    pub fn point(x: f64, y: f64) -> Result<Self> {
        Self::new(x, x, 1, y, y, 1)
    }

    pub fn validated(self) -> Result<Self> {
        check_axis("x", self.x_min, self.x_max, self.nx)?;
        check_axis("y", self.y_min, self.y_max, self.ny)?;
        Ok(self)
    }

    pub fn x(&self, i: usize) -> f64 {
        axis(self.x_min, self.x_max, self.nx, i)
    }

    pub fn y(&self, j: usize) -> f64 {
        axis(self.y_min, self.y_max, self.ny, j)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Linear index of `(ix, iy)`: rows of constant `y`, `x` fastest.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }
}

/// Provenance carried with a field into its JSON form.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    /// What produced the values (e.g. `solve`, `fd_solve`, `residual`).
    pub source: String,
    /// Free-form description of parameters and tolerances.
    #[serde(default)]
    pub settings: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub meta: FieldMeta,
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    schema: u32,
    #[serde(flatten)]
    field: ScalarField,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>, meta: FieldMeta) -> Result<Self> {
        let grid = grid.validated()?;
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.nx,
                grid.ny
            )));
        }
        Ok(ScalarField { grid, values, meta })
    }

    pub fn from_fn<F: FnMut(f64, f64) -> Result<f64>>(grid: GridSpec, meta: FieldMeta, mut f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                values.push(f(grid.x(ix), grid.y(iy))?);
            }
        }
        Self::new(grid, values, meta)
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.grid.index(ix, iy)]
    }

    /// Largest absolute value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `x,y,u` rows in grid order with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,u\n");
        for iy in 0..self.grid.ny {
            let y = self.grid.y(iy);
            for ix in 0..self.grid.nx {
                let _ = writeln!(s, "{:.16e},{:.16e},{:.16e}", self.grid.x(ix), y, self.at(ix, iy));
            }
        }
        s
    }

    /// Parse the CSV form. The grid is recovered from the first and last
    /// coordinates; every row must match it exactly.
    pub fn from_csv(src: &str) -> Result<Self> {
        let mut lines = src.lines();
        if lines.next().map(str::trim) != Some("x,y,u") {
            return Err(Error::config("field CSV must start with the header `x,y,u`"));
        }
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::config(format!("field CSV row {} has {} columns", n + 2, cols.len())));
            }
            let mut v = [0.0; 3];
            for (slot, c) in v.iter_mut().zip(&cols) {
                *slot = c
                    .trim()
                    .parse()
                    .map_err(|_| Error::config(format!("field CSV row {}: bad number `{c}`", n + 2)))?;
            }
            rows.push(v);
        }
        if rows.is_empty() {
            return Err(Error::config("field CSV has no rows"));
        }
        let y0 = rows[0][1];
        let nx = rows.iter().take_while(|r| r[1] == y0).count();
        if rows.len() % nx != 0 {
            return Err(Error::GridMismatch(format!("{} rows do not form rows of {nx}", rows.len())));
        }
        let ny = rows.len() / nx;
        let last = rows[rows.len() - 1];
        let grid = GridSpec::new(rows[0][0], last[0], nx, y0, last[1], ny)?;
        for (k, r) in rows.iter().enumerate() {
            let (ix, iy) = (k % nx, k / nx);
            if r[0] != grid.x(ix) || r[1] != grid.y(iy) {
                return Err(Error::GridMismatch(format!("row {} is not on the uniform grid", k + 2)));
            }
        }
        let values = rows.iter().map(|r| r[2]).collect();
        Self::new(grid, values, FieldMeta::default())
    }

    /// JSON envelope with `schema: 1`, grid, metadata and values.
    pub fn to_json(&self) -> String {
        let env = Envelope {
            schema: 1,
            field: self.clone(),
        };
        serde_json::to_string_pretty(&env).expect("fields serialize")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let env: Envelope =
            serde_json::from_str(src).map_err(|e| Error::config(format!("field JSON: {e}")))?;
        if env.schema != 1 {
            return Err(Error::config(format!("unsupported field schema {}", env.schema)));
        }
        let f = env.field;
        Self::new(f.grid, f.values, f.meta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ScalarField {
        let g = GridSpec::new(-1.0, 0.7, 4, 0.1, 0.3, 3).unwrap();
        ScalarField::from_fn(g, FieldMeta::default(), |x, y| Ok((x * 3.1).sin() / y + 1e-300 * x)).unwrap()
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let f = sample();
        let csv = f.to_csv();
        assert!(csv.starts_with("x,y,u\n"));
        assert!(!csv.contains('\r'));
        let g = ScalarField::from_csv(&csv).unwrap();
        assert_eq!(g.grid, f.grid);
        for (a, b) in f.values.iter().zip(&g.values) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mut f = sample();
        f.meta.warnings.push("w".into());
        f.meta.settings.insert("alpha".into(), 0.8.into());
        let j = f.to_json();
        assert!(j.contains("\"schema\": 1"));
        assert_eq!(ScalarField::from_json(&j).unwrap(), f);
    }

    #[test]
    fn rows_are_y_major() {
        let f = sample();
        let csv = f.to_csv();
        let second: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
        assert_eq!(second[1].parse::<f64>().unwrap(), 0.1);
        assert_eq!(second[0].parse::<f64>().unwrap(), f.grid.x(1));
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0.0, 1.0, 1, 0.0, 1.0, 2).is_err());
        assert!(GridSpec::new(1.0, 0.0, 3, 0.0, 1.0, 2).is_err());
        assert!(GridSpec::point(0.5, 1.0).is_ok());
        let g = GridSpec::new(0.0, 1.0, 3, 0.0, 1.0, 2).unwrap();
        assert!(matches!(ScalarField::new(g, vec![0.0; 5], FieldMeta::default()), Err(Error::GridMismatch(_))));
    }
}
