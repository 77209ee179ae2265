use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::omega_from_wavelength;
use crate::error::{Error, Result};

/// One tabulated point of a complex refractive index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionSample {
    /// Angular frequency [rad/s].
    pub omega: f64,
    pub n_real: f64,
    pub n_imag: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Table {
    Vacuum,
    Sampled(Vec<DispersionSample>),
}

/// Complex refractive index n(ω) = n' + i n'', linearly interpolated in ω.
///
/// Samples are kept in strictly increasing frequency order. The imaginary
/// part is either carried per sample or replaced by a frequency-independent
/// value with [`MaterialDispersion::with_uniform_n_imag`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialDispersion {
    name: String,
    table: Table,
}

/// Ordinary-ray indices of beta barium borate at 1064, 532 and 266 nm.
const BBO_ORDINARY: [(f64, f64); 3] = [(1064.0, 1.65), (532.0, 1.67), (266.0, 1.75)];

impl MaterialDispersion {
    pub fn vacuum() -> Self {
        MaterialDispersion {
            name: "vacuum".into(),
            table: Table::Vacuum,
        }
    }

    /// Ordinary index of BBO, lossless unless overridden.
    pub fn bbo_ordinary() -> Self {
        let samples = BBO_ORDINARY.iter().map(|&(nm, n)| (nm, n, 0.0)).collect::<Vec<_>>();
        Self::from_wavelength_samples("bbo_ordinary", &samples).expect("builtin table is well formed")
    }

    /// Looks up a builtin material by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "vacuum" => Some(Self::vacuum()),
            "bbo_ordinary" => Some(Self::bbo_ordinary()),
            _ => None,
        }
    }

    /// Builds a table from `(lambda_nm, n_real, n_imag)` triples in any order.
    pub fn from_wavelength_samples(name: &str, rows: &[(f64, f64, f64)]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::validation(name, "material table has no samples"));
        }
        let mut samples = Vec::with_capacity(rows.len());
        for &(nm, n_real, n_imag) in rows {
            if !(nm.is_finite() && nm > 0.0) {
                return Err(Error::validation(name, format!("wavelength {nm} nm must be positive")));
            }
            if !(n_real.is_finite() && n_imag.is_finite()) {
                return Err(Error::validation(name, "refractive index must be finite"));
            }
            if n_imag < 0.0 {
                return Err(Error::validation(
                    name,
                    format!("n_imag = {n_imag} at {nm} nm describes gain, not absorption"),
                ));
            }
            samples.push(DispersionSample {
                omega: omega_from_wavelength(nm * 1e-9),
                n_real,
                n_imag,
            });
        }
        samples.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        if samples.windows(2).any(|w| w[0].omega >= w[1].omega) {
            return Err(Error::validation(name, "duplicate wavelength in material table"));
        }
        Ok(MaterialDispersion {
            name: name.to_string(),
            table: Table::Sampled(samples),
        })
    }

    /// Parses the plain-text table format: one `lambda_nm n_real n_imag`
    /// triple per line, `#` starts a comment.
    pub fn parse_table(name: &str, text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            let mut values = [0.0; 3];
            let mut count = 0;
            for (col, field) in split_fields(line) {
                if count == 3 {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        column: col,
                        message: "expected exactly three columns: lambda_nm n_real n_imag".into(),
                    });
                }
                values[count] = field.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    column: col,
                    message: format!("`{field}` is not a number"),
                })?;
                count += 1;
            }
            if count != 3 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    column: 1,
                    message: "expected exactly three columns: lambda_nm n_real n_imag".into(),
                });
            }
            rows.push((values[0], values[1], values[2]));
        }
        Self::from_wavelength_samples(name, &rows)
    }

    pub fn load_table(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read material table {}: {e}", path.display())))?;
        Self::parse_table(&path.display().to_string(), &text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_vacuum(&self) -> bool {
        matches!(self.table, Table::Vacuum)
    }

    pub fn samples(&self) -> &[DispersionSample] {
        match &self.table {
            Table::Vacuum => &[],
            Table::Sampled(s) => s,
        }
    }

    /// Valid frequency interval, `None` for vacuum (valid everywhere).
    pub fn omega_range(&self) -> Option<(f64, f64)> {
        match &self.table {
            Table::Vacuum => None,
            Table::Sampled(s) => Some((s[0].omega, s[s.len() - 1].omega)),
        }
    }

    /// Copy of this material with every sample's n'' replaced by `n_imag`.
    pub fn with_uniform_n_imag(&self, n_imag: f64) -> Result<Self> {
        if !(n_imag.is_finite() && n_imag >= 0.0) {
            return Err(Error::validation(
                "n_imag",
                format!("{n_imag} must be finite and non-negative"),
            ));
        }
        let table = match &self.table {
            Table::Vacuum => {
                if n_imag != 0.0 {
                    return Err(Error::validation("n_imag", "vacuum cannot absorb"));
                }
                Table::Vacuum
            }
            Table::Sampled(s) => Table::Sampled(s.iter().map(|p| DispersionSample { n_imag, ..*p }).collect()),
        };
        Ok(MaterialDispersion {
            name: self.name.clone(),
            table,
        })
    }
}

fn split_fields(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace() || ch == ',', start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out.into_iter()
}

/// Complex refractive index at angular frequency `omega`.
pub fn dispersion_eval(material: &MaterialDispersion, omega: f64) -> Result<Complex64> {
    let samples = match &material.table {
        Table::Vacuum => return Ok(Complex64::new(1.0, 0.0)),
        Table::Sampled(s) => s,
    };
    let (min, max) = (samples[0].omega, samples[samples.len() - 1].omega);
    // wavelength-to-frequency conversions may land an ulp outside the table
    let slack = 1e-14;
    if !(omega >= min * (1.0 - slack) && omega <= max * (1.0 + slack)) {
        return Err(Error::OutOfRange { omega, min, max });
    }
    let omega = omega.clamp(min, max);
    // first sample with frequency >= omega
    let hi = samples.partition_point(|s| s.omega < omega);
    let upper = samples[hi];
    if upper.omega == omega || hi == 0 {
        return Ok(Complex64::new(upper.n_real, upper.n_imag));
    }
    let lower = samples[hi - 1];
    let t = (omega - lower.omega) / (upper.omega - lower.omega);
    let lerp = |a: f64, b: f64| a * (1.0 - t) + b * t;
    Ok(Complex64::new(
        lerp(lower.n_real, upper.n_real),
        lerp(lower.n_imag, upper.n_imag),
    ))
}
