use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::ScanResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::validation(
                "format",
                format!("`{other}` is neither csv nor json"),
            )),
        }
    }
}

/// Serializes a scan. Numbers are written in shortest round-trip form.
pub fn emit(res: &ScanResult, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&res.columns).expect("writing to memory");
            for row in &res.rows {
                w.write_record(row.iter().map(|v| format!("{v:e}")))
                    .expect("writing to memory");
            }
            w.into_inner().expect("writing to memory")
        }
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(res).expect("scan results contain only finite numbers");
            out.push(b'\n');
            out
        }
    }
}
