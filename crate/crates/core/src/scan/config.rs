use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::green::Chi2Type;
use crate::optics::{n_imag_from_loss, LossConvention, MaterialDispersion};
use crate::pdc::{ExperimentConfig, Method};

use super::{Axis, Observable, ScanRange, ScanRequest};

/// One `key = value` line.
#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
    /// 1-based column of the first character of the value.
    column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    Length,
    Frequency,
    Field,
    Coupling,
    Plain,
}

const CONFIG_KEYS: &[&str] = &[
    "material",
    "material_file",
    "crystal_length",
    "omega",
    "omega_signal",
    "omega_idler",
    "n_imag",
    "n_imag_pump",
    "loss_per_cm",
    "loss_convention",
    "pump_amplitude",
    "pump_distance",
    "chi2_type",
    "d_eff",
    "z_detectors",
    "z_signal",
    "z_idler",
    "offset_x",
    "offset_y",
];

const SCAN_KEYS: &[&str] = &["axis", "start", "stop", "count", "observables", "method", "tol"];

fn parse_entries(text: &str) -> Result<BTreeMap<String, Entry>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let Some(eq) = body.find('=') else {
            let column = body.len() - body.trim_start().len() + 1;
            return Err(Error::Parse {
                line,
                column,
                message: "expected `key = value`".into(),
            });
        };
        let key = body[..eq].trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::Parse {
                line,
                column: body.len() - body.trim_start().len() + 1,
                message: format!("invalid key `{key}`"),
            });
        }
        let after = &body[eq + 1..];
        let value = after.trim();
        let column = eq + 2 + (after.len() - after.trim_start().len());
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                column,
                message: format!("missing value for `{key}`"),
            });
        }
        if !CONFIG_KEYS.contains(&key) && !SCAN_KEYS.contains(&key) {
            return Err(Error::validation(key, "unknown key"));
        }
        let entry = Entry {
            value: value.to_string(),
            line,
            column,
        };
        if out.insert(key.to_string(), entry).is_some() {
            return Err(Error::validation(key, format!("set more than once (line {line})")));
        }
    }
    Ok(out)
}

fn unit_scale(unit: Unit, suffix: &str) -> Option<f64> {
    let scale = match (unit, suffix) {
        (_, "") => 1.0,
        (Unit::Length, "m") => 1.0,
        (Unit::Length, "cm") => 1e-2,
        (Unit::Length, "mm") => 1e-3,
        (Unit::Length, "um" | "µm") => 1e-6,
        (Unit::Length, "nm") => 1e-9,
        (Unit::Frequency, "rad/s") => 1.0,
        (Unit::Field, "V/m") => 1.0,
        (Unit::Coupling, "m/V") => 1.0,
        (Unit::Coupling, "pm/V") => 1e-12,
        _ => return None,
    };
    Some(scale)
}

fn number(key: &str, entry: &Entry, unit: Unit) -> Result<f64> {
    let text = entry.value.as_str();
    let split = text
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit()
                || c == '.'
                || c == '+'
                || c == '-'
                || ((c == 'e' || c == 'E')
                    && text[i + 1..].starts_with(|n: char| n.is_ascii_digit() || n == '-' || n == '+')))
        })
        .map_or(text.len(), |(i, _)| i);
    let (num, suffix) = text.split_at(split);
    let value: f64 = num.parse().map_err(|_| Error::Parse {
        line: entry.line,
        column: entry.column,
        message: format!("`{text}` is not a number"),
    })?;
    let suffix = suffix.trim();
    let scale = unit_scale(unit, suffix).ok_or_else(|| Error::Parse {
        line: entry.line,
        column: entry.column + split + (text[split..].len() - suffix.len()),
        message: format!("unit `{suffix}` does not apply to `{key}`"),
    })?;
    Ok(value * scale)
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.0.get(key)
    }

    fn number(&self, key: &str, unit: Unit) -> Result<Option<f64>> {
        self.get(key).map(|e| number(key, e, unit)).transpose()
    }

    fn required(&self, key: &str, unit: Unit) -> Result<f64> {
        self.number(key, unit)?
            .ok_or_else(|| Error::validation(key, "required"))
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.get(key).map(|e| e.value.as_str())
    }
}

fn material(entries: &Entries) -> Result<MaterialDispersion> {
    match (entries.text("material"), entries.text("material_file")) {
        (Some(_), Some(_)) => Err(Error::validation("material_file", "conflicts with `material`")),
        (Some(name), None) => MaterialDispersion::builtin(name)
            .ok_or_else(|| Error::validation("material", format!("no built-in material named `{name}`"))),
        (None, Some(path)) => MaterialDispersion::load_table(Path::new(path)),
        (None, None) => Err(Error::validation("material", "required")),
    }
}

fn config_from(entries: &Entries) -> Result<ExperimentConfig> {
    let material = material(entries)?;
    let length = entries.required("crystal_length", Unit::Length)?;
    let omega = entries.number("omega", Unit::Frequency)?;
    let signal = entries.number("omega_signal", Unit::Frequency)?;
    let idler = entries.number("omega_idler", Unit::Frequency)?;
    let (ws, wi) = match (omega, signal, idler) {
        (Some(w), None, None) => (w, w),
        (None, Some(s), Some(i)) => (s, i),
        (Some(_), _, _) => {
            return Err(Error::validation(
                "omega",
                "give either `omega` or both `omega_signal` and `omega_idler`",
            ))
        }
        (None, None, _) => return Err(Error::validation("omega_signal", "required")),
        (None, Some(_), None) => return Err(Error::validation("omega_idler", "required")),
    };
    let mut cfg = ExperimentConfig::degenerate(material, length, ws);
    cfg.omega_idler = wi;

    cfg.n_imag = entries.number("n_imag", Unit::Plain)?;
    cfg.n_imag_pump = entries.number("n_imag_pump", Unit::Plain)?;
    let convention = match entries.text("loss_convention") {
        None | Some("intensity") => LossConvention::Intensity,
        Some("amplitude") => LossConvention::Amplitude,
        Some(other) => {
            return Err(Error::validation(
                "loss_convention",
                format!("`{other}` is neither `intensity` nor `amplitude`"),
            ))
        }
    };
    if let Some(loss) = entries.number("loss_per_cm", Unit::Plain)? {
        if cfg.n_imag.is_some() {
            return Err(Error::validation("loss_per_cm", "conflicts with `n_imag`"));
        }
        cfg.n_imag = Some(n_imag_from_loss(loss, ws, convention)?);
    } else if entries.get("loss_convention").is_some() {
        return Err(Error::validation(
            "loss_convention",
            "only meaningful with `loss_per_cm`",
        ));
    }

    if let Some(e) = entries.number("pump_amplitude", Unit::Field)? {
        cfg.pump.amplitude = e;
    }
    if let Some(z) = entries.number("pump_distance", Unit::Length)? {
        cfg.pump.distance = z;
    }
    cfg.chi2.kind = match entries.text("chi2_type") {
        None | Some("I") | Some("1") => Chi2Type::I,
        Some("II") | Some("2") => Chi2Type::II,
        Some(other) => return Err(Error::validation("chi2_type", format!("`{other}` is neither I nor II"))),
    };
    if let Some(d) = entries.number("d_eff", Unit::Coupling)? {
        cfg.chi2.strength = d;
    }
    if let Some(z) = entries.number("z_detectors", Unit::Length)? {
        if entries.get("z_signal").is_some() || entries.get("z_idler").is_some() {
            return Err(Error::validation("z_detectors", "conflicts with `z_signal`/`z_idler`"));
        }
        cfg.detectors.z_signal = z;
        cfg.detectors.z_idler = z;
    }
    if let Some(z) = entries.number("z_signal", Unit::Length)? {
        cfg.detectors.z_signal = z;
    }
    if let Some(z) = entries.number("z_idler", Unit::Length)? {
        cfg.detectors.z_idler = z;
    }
    cfg.detectors.offset = [
        entries.number("offset_x", Unit::Length)?.unwrap_or(0.0),
        entries.number("offset_y", Unit::Length)?.unwrap_or(0.0),
    ];
    cfg.validate()?;
    Ok(cfg)
}

/// Parses an experiment description.
///
/// Scan keys are accepted and ignored so that one file can drive both
/// single evaluations and sweeps.
pub fn load_config(text: &str) -> Result<ExperimentConfig> {
    config_from(&Entries(parse_entries(text)?))
}

/// Parses an experiment description together with its scan section.
pub fn load_scan_request(text: &str) -> Result<ScanRequest> {
    let entries = Entries(parse_entries(text)?);
    let base = config_from(&entries)?;
    let axis_name = entries
        .text("axis")
        .ok_or_else(|| Error::validation("axis", "required"))?;
    let axis: Axis = axis_name.parse()?;
    let unit = match axis {
        Axis::CrystalLength => Unit::Length,
        Axis::Frequency => Unit::Frequency,
        Axis::NImag | Axis::DeltaK => Unit::Plain,
    };
    let count_text = entries
        .text("count")
        .ok_or_else(|| Error::validation("count", "required"))?;
    let count: usize = count_text
        .parse()
        .map_err(|_| Error::validation("count", format!("`{count_text}` is not a whole number")))?;
    let observables = entries
        .text("observables")
        .ok_or_else(|| Error::validation("observables", "required"))?
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<Vec<Observable>>>()?;
    let method = match entries.text("method") {
        None | Some("farfield") => Method::FarField,
        Some("numeric") => Method::Numeric,
        Some(other) => {
            return Err(Error::validation(
                "method",
                format!("`{other}` is neither farfield nor numeric"),
            ))
        }
    };
    let request = ScanRequest {
        base,
        axis,
        range: ScanRange {
            start: entries.required("start", unit)?,
            stop: entries.required("stop", unit)?,
            count,
        },
        observables,
        method,
        tol: entries.number("tol", Unit::Plain)?.unwrap_or(super::DEFAULT_TOL),
    };
    request.validate()?;
    Ok(request)
}
