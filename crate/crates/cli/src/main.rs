use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biphoton::pdc::{amplitude, Method};
use biphoton::scan::{self, emit, load_config, load_scan_request, preset, Format, ScanRequest};
use biphoton::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Biphoton amplitudes and coincidence rates for PDC in absorbing crystals.
#[derive(Parser)]
#[command(name = "biphoton", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Amplitude matrix and coincidence rate of one configuration.
    Rate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep described by the scan keys of a config file.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Built-in figure reproduction.
    Preset {
        #[arg(value_parser = scan::PRESETS)]
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Relative quadrature tolerance for the numeric method.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Farfield,
    Numeric,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Farfield => Method::FarField,
            MethodArg::Numeric => Method::Numeric,
        }
    }
}

#[derive(Serialize)]
struct RateReport {
    schema_version: u32,
    tool_version: &'static str,
    config: biphoton::pdc::ExperimentConfig,
    method: Method,
    rate: f64,
    error: f64,
    /// Rows of [re, im] pairs.
    amplitude: [[[f64; 2]; 2]; 2],
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_out(bytes: &[u8], out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(bytes).map_err(|e| Error::Io(e.to_string())),
    }
}

fn apply(req: &mut ScanRequest, common: &Common) -> Result<(), Error> {
    if let Some(m) = common.method {
        req.method = m.into();
    }
    if let Some(t) = common.tol {
        req.tol = t;
    }
    req.validate()
}

fn rate(config: &Path, common: &Common) -> Result<Vec<u8>, Error> {
    let cfg = load_config(&read(config)?)?;
    let method = common.method.map_or(Method::FarField, Method::from);
    let tol = common.tol.unwrap_or(scan::DEFAULT_TOL);
    let amp = amplitude(&cfg, method, tol)?;
    let m = amp.matrix;
    let pair = |i, j| [m[(i, j)].re, m[(i, j)].im];
    let report = RateReport {
        schema_version: scan::SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        method,
        rate: amp.rate,
        error: amp.error,
        amplitude: [[pair(0, 0), pair(0, 1)], [pair(1, 0), pair(1, 1)]],
    };
    Ok(match Format::from(common.format) {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["rate".to_string(), "error".to_string()];
            let mut row = vec![format!("{:e}", amp.rate), format!("{:e}", amp.error)];
            for (ij, (i, j)) in ["xx", "xy", "yx", "yy"].iter().zip([(0, 0), (0, 1), (1, 0), (1, 1)]) {
                header.push(format!("a_{ij}_re"));
                header.push(format!("a_{ij}_im"));
                row.push(format!("{:e}", m[(i, j)].re));
                row.push(format!("{:e}", m[(i, j)].im));
            }
            w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
            w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
            w.into_inner().map_err(|e| Error::Io(e.to_string()))?
        }
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    let (bytes, common) = match &cli.command {
        Command::Rate { config, common } => (rate(config, common)?, common),
        Command::Scan { config, common } => {
            let mut req = load_scan_request(&read(config)?)?;
            apply(&mut req, common)?;
            (emit(&scan::run_scan(&req)?, common.format.into()), common)
        }
        Command::Preset { name, common } => {
            let mut req = preset(name)?;
            apply(&mut req, common)?;
            let mut res = scan::run_scan(&req)?;
            res.metadata.preset = Some(name.clone());
            (emit(&res, common.format.into()), common)
        }
    };
    write_out(&bytes, common.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
