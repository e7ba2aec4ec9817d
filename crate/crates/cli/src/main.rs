//! `laxforge`: Lax pairs and quadratic integrals of `Γẋ = −Px` from the
//! command line.

mod commands;
mod input;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use laxforge_core::groebner::Rational;
use laxforge_core::matrix::real_matrix_from_json;
use laxforge_core::spectral::{DEFAULT_GAP_TOL, DEFAULT_PAIRING_TOL};
use num_bigint::BigInt;

use commands::{Config, DEFAULT_GROEBNER_P};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Spectrum, quadruple pairing, V_lambda dimensions and admissible pairs.
    Analyze,
    /// The n quadratic integrals with involution and independence tables.
    Integrals,
    /// Lax equations, involution, independence, Poisson maps, conservation.
    Verify,
    /// Exact trajectory with integral values and drift.
    Simulate,
    /// Exact checks of the planar ansatz (input optional, only "p" is read).
    GroebnerCheck,
}

#[derive(Debug, Parser)]
#[command(name = "laxforge", version, about)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// JSON file with "gamma", "p" and optional "pairs".
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Bound used by every residual check instead of its default.
    #[arg(long, global = true, value_parser = positive)]
    tol: Option<f64>,
    /// Time grid as T0:T1:COUNT.
    #[arg(long, global = true, default_value = "0:10:101", value_parser = parse_times)]
    times: (f64, f64, usize),
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Proceed when the spectrum is not simple.
    #[arg(long, global = true)]
    force: bool,
    #[arg(long, global = true, default_value_t = DEFAULT_PAIRING_TOL, value_parser = positive)]
    pairing_tol: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_GAP_TOL, value_parser = positive)]
    gap_tol: f64,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_times(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [t0, t1, count] = parts.as_slice() else {
        return Err("expected T0:T1:COUNT".into());
    };
    let t0: f64 = t0.parse().map_err(|e| format!("T0: {e}"))?;
    let t1: f64 = t1.parse().map_err(|e| format!("T1: {e}"))?;
    let count: usize = count.parse().map_err(|e| format!("COUNT: {e}"))?;
    if count == 0 || !t0.is_finite() || !t1.is_finite() || (count > 1 && t1 <= t0) {
        return Err("need COUNT >= 1 and T1 > T0".into());
    }
    Ok((t0, t1, count))
}

/// `p` of a groebner-check input, converted exactly from the JSON doubles.
fn groebner_p(path: Option<&Path>) -> Result<[Rational; 4], CliError> {
    let Some(path) = path else {
        return Ok(DEFAULT_GROEBNER_P.map(|v| Rational::from_integer(BigInt::from(v))));
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))?;
    let p = v.get("p").ok_or_else(|| CliError::Parse("missing \"p\"".into()))?;
    let m = real_matrix_from_json(p).map_err(|e| CliError::Parse(format!("\"p\": {e}")))?;
    if m.shape() != (2, 2) {
        return Err(CliError::Validation("groebner-check needs a 2x2 P".into()));
    }
    let exact = |x: f64| Rational::from_float(x).ok_or_else(|| CliError::Validation(format!("{x} is not finite")));
    Ok([exact(m[(0, 0)])?, exact(m[(0, 1)])?, exact(m[(1, 0)])?, exact(m[(1, 1)])?])
}

fn run(args: &Args) -> Result<report::Report, CliError> {
    let cfg = Config {
        seed: args.seed,
        tol: args.tol,
        times: args.times,
        force: args.force,
        pairing_tol: args.pairing_tol,
        gap_tol: args.gap_tol,
    };
    if let Command::GroebnerCheck = args.command {
        return commands::groebner_check(&groebner_p(args.input.as_deref())?, &cfg);
    }
    let path = args.input.as_deref().ok_or_else(|| CliError::Parse("--input FILE is required".into()))?;
    let input = input::load(path)?;
    match args.command {
        Command::Analyze => commands::analyze(&input, &cfg),
        Command::Integrals => commands::integrals(&input, &cfg),
        Command::Verify => commands::verify(&input, &cfg),
        Command::Simulate => commands::simulate(&input, &cfg),
        Command::GroebnerCheck => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(report) => {
            print!("{}", report.render(args.format));
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("laxforge: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
