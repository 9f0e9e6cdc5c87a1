use std::ffi::OsString;
use std::path::PathBuf;

use central_spin::protocol::{DEFAULT_M_WINDOW, DEFAULT_O_WINDOW};
use central_spin::{BackendChoice, Quantity};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::parse::{self, AngleList, AngleRange, IntRange};

pub const THREADS_ENV: &str = "CSPIN_THREADS";

/// Stroboscopic simulation of the kicked central spin model.
#[derive(Debug, Parser, Serialize)]
#[command(name = "central-spin", version)]
pub struct Cli {
    /// key = value file; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for sweep cells and QFI stencils
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Trajectory from the x-polarized state
    #[command(args_override_self = true)]
    Evolve(EvolveArgs),
    /// Order parameter or G over a (λ, g) grid
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// QFI matrix and G over a range of periods, optionally fitted
    #[command(args_override_self = true)]
    Qfi(QfiArgs),
    /// G along λ at fixed g, with Z̄ regime labels
    #[command(args_override_self = true)]
    QfiScan(QfiScanArgs),
    /// G against the number of satellites at fixed time, fitted
    #[command(args_override_self = true)]
    Scaling(ScalingArgs),
    /// Simulated cat states against closed forms
    #[command(args_override_self = true)]
    OracleCheck(OracleArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Evolve(_) => "evolve",
            Command::Sweep(_) => "sweep",
            Command::Qfi(_) => "qfi",
            Command::QfiScan(_) => "qfi-scan",
            Command::Scaling(_) => "scaling",
            Command::OracleCheck(_) => "oracle-check",
        }
    }

    pub fn output(&self) -> &Output {
        match self {
            Command::Evolve(a) => &a.output,
            Command::Sweep(a) => &a.output,
            Command::Qfi(a) => &a.output,
            Command::QfiScan(a) => &a.output,
            Command::Scaling(a) => &a.output,
            Command::OracleCheck(a) => &a.output,
        }
    }
}

pub const NAMES: [&str; 6] = ["evolve", "sweep", "qfi", "qfi-scan", "scaling", "oracle-check"];

#[derive(Debug, Args, Serialize)]
pub struct Output {
    /// CSV path; the JSON sidecar goes next to it with a .json extension
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

fn backend(s: &str) -> Result<BackendChoice, String> {
    s.parse().map_err(|e: central_spin::SpinError| e.to_string())
}

fn quantity(s: &str) -> Result<Quantity, String> {
    s.parse().map_err(|e: central_spin::SpinError| e.to_string())
}

#[derive(Debug, Args, Serialize)]
pub struct EvolveArgs {
    #[arg(long)]
    pub n_sat: usize,
    #[arg(long, value_parser = parse::angle)]
    pub lambda: f64,
    /// Uniform satellite field; also the central field unless --g-c is given
    #[arg(long, value_parser = parse::angle, required_unless_present = "g_sat")]
    pub g: Option<f64>,
    #[arg(long, value_parser = parse::angle)]
    pub g_c: Option<f64>,
    /// Per-satellite fields, comma separated
    #[arg(long, value_parser = parse::angle_list)]
    pub g_sat: Option<AngleList>,
    #[arg(long)]
    pub periods: usize,
    /// Also record right after each kick
    #[arg(long)]
    pub half_periods: bool,
    #[arg(long, default_value = "auto", value_parser = backend)]
    pub backend: BackendChoice,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub n_sat: usize,
    #[arg(long, default_value = "M_bar", value_parser = quantity)]
    pub quantity: Quantity,
    #[arg(long, default_value = "0..4pi", value_parser = parse::angle_range)]
    pub lambda: AngleRange,
    #[arg(long, default_value_t = 101)]
    pub lambda_points: usize,
    #[arg(long, default_value = "0..2pi", value_parser = parse::angle_range)]
    pub g: AngleRange,
    #[arg(long, default_value_t = 101)]
    pub g_points: usize,
    #[arg(long, default_value_t = DEFAULT_M_WINDOW)]
    pub m_window: usize,
    #[arg(long, default_value_t = DEFAULT_O_WINDOW)]
    pub o_window: usize,
    /// Evolution time for G cells
    #[arg(long, default_value_t = 100)]
    pub qfi_periods: usize,
    #[arg(long, default_value_t = central_spin::metrology::DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value = "auto", value_parser = backend)]
    pub backend: BackendChoice,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct QfiArgs {
    #[arg(long)]
    pub n_sat: usize,
    #[arg(long, value_parser = parse::angle)]
    pub lambda: f64,
    #[arg(long, value_parser = parse::angle)]
    pub g: f64,
    /// Single count or inclusive range such as 10..100
    #[arg(long, value_parser = parse::int_range)]
    pub periods: IntRange,
    #[arg(long, default_value_t = 1)]
    pub period_step: usize,
    #[arg(long, default_value_t = central_spin::metrology::DEFAULT_DELTA)]
    pub delta: f64,
    /// Fit G = a n^alpha over the periods
    #[arg(long)]
    pub fit: bool,
    #[arg(long, default_value = "auto", value_parser = backend)]
    pub backend: BackendChoice,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct QfiScanArgs {
    #[arg(long)]
    pub n_sat: usize,
    #[arg(long, default_value = "0.2pi..1.8pi", value_parser = parse::angle_range)]
    pub lambda: AngleRange,
    #[arg(long, default_value_t = 81)]
    pub points: usize,
    #[arg(long, default_value = "pi/2", value_parser = parse::angle)]
    pub g: f64,
    #[arg(long, default_value_t = 100)]
    pub periods: usize,
    #[arg(long, default_value_t = central_spin::metrology::DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value = "auto", value_parser = backend)]
    pub backend: BackendChoice,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct ScalingArgs {
    /// Inclusive range of satellite counts
    #[arg(long, value_parser = parse::int_range)]
    pub n_sat: IntRange,
    /// Stride through --n-sat; 2 keeps one parity
    #[arg(long, default_value_t = 2)]
    pub n_step: usize,
    #[arg(long, default_value = "pi", value_parser = parse::angle)]
    pub lambda: f64,
    #[arg(long, default_value = "pi/2", value_parser = parse::angle)]
    pub g: f64,
    #[arg(long, default_value_t = 100)]
    pub periods: usize,
    #[arg(long, default_value_t = central_spin::metrology::DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value = "symmetric", value_parser = backend)]
    pub backend: BackendChoice,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long, value_parser = parse::int_range)]
    pub n_sat: IntRange,
    /// Fidelity tolerance for a row to pass
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

/// Splices config-file entries into `argv` right after the subcommand so
/// that later command-line occurrences override them.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        let a = a.to_string_lossy();
        if a == "--config" {
            path = argv.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let mut subcommand = None;
    let mut flags: Vec<OsString> = Vec::new();
    for (key, value) in parse::config_file(&path)? {
        match key.as_str() {
            "subcommand" | "command" => subcommand = Some(value),
            "config" => return Err("config files cannot include other config files".into()),
            _ => match value.as_str() {
                "true" => flags.push(format!("--{key}").into()),
                "false" => {}
                _ => {
                    flags.push(format!("--{key}").into());
                    flags.push(value.into());
                }
            },
        }
    }
    let position = argv
        .iter()
        .position(|a| NAMES.contains(&a.to_string_lossy().as_ref()));
    let mut out = argv;
    match (position, subcommand) {
        (Some(i), _) => {
            out.splice(i + 1..i + 1, flags);
        }
        (None, Some(sub)) => {
            let rest = out.split_off(1);
            out.push(sub.into());
            out.extend(flags);
            out.extend(rest);
        }
        (None, None) => return Err("no subcommand on the command line or in the config file".into()),
    }
    Ok(out)
}
