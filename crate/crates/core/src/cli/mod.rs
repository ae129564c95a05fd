//! Command-line front end. Every command prints a JSON summary on stdout
//! (floats with 17 significant digits) and writes its files under `--out`.
//!
//! Exit codes: 0 pass, 1 invalid input, 2 infeasible window, 3 verification
//! failure.

mod commands;
mod summary;

pub use commands::{check_material, selftest, simulate, sweep_lambda, verify_decay, SweepRow, VerifyOutcome};
pub use summary::*;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

/// λ grid used when none is given.
pub const DEFAULT_LAMBDAS: [f64; 7] = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0];

#[derive(Parser, Debug)]
#[command(name = "thermovoid", version, about = "Spatial decay estimates for backward-in-time porous thermoelasticity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a material file: symmetry, positivity, spectrum.
    CheckMaterial(RunConfig),
    /// Spectrum and decay constants of a material over a λ grid.
    Spectrum(RunConfig),
    /// Run a scenario and write the trajectory.
    Simulate(RunConfig),
    /// Full pipeline: simulate, measure, check the identity, the
    /// differential inequality and the decay estimate.
    VerifyDecay(RunConfig),
    /// Decay constants and measured slopes over a λ grid.
    SweepLambda(RunConfig),
    /// Seeded property suites on random materials.
    Selftest(RunConfig),
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Material file (TOML).
    #[arg(long)]
    pub material: Option<PathBuf>,
    /// Scenario file (TOML).
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Comma-separated λ values, or `auto` for the default grid.
    #[arg(long, default_value = "auto", value_parser = parse_lambdas)]
    pub lambda: LambdaSpec,
    /// Characteristic offset r₀ (default 0).
    #[arg(long)]
    pub r0: Option<f64>,
    /// Characteristic time t₀ (default: latest admissible).
    #[arg(long)]
    pub t0: Option<f64>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of refinement levels (h and dt halved per level).
    #[arg(long, default_value_t = 0)]
    pub refine: u32,
    /// Seed for the property suites.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run independent pieces (refinement levels, λ rows) on threads.
    #[arg(long)]
    pub parallel: bool,
    /// Trajectory dump format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            material: None,
            scenario: None,
            lambda: LambdaSpec::Auto,
            r0: None,
            t0: None,
            out: None,
            refine: 0,
            seed: 0,
            parallel: false,
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaSpec {
    Auto,
    List(Vec<f64>),
}

impl LambdaSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            LambdaSpec::Auto => DEFAULT_LAMBDAS.to_vec(),
            LambdaSpec::List(v) => v.clone(),
        }
    }
}

fn parse_lambdas(s: &str) -> Result<LambdaSpec, String> {
    if s.trim() == "auto" {
        return Ok(LambdaSpec::Auto);
    }
    let mut v = Vec::new();
    for part in s.split(',') {
        let x: f64 = part.trim().parse().map_err(|e| format!("bad lambda '{part}': {e}"))?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(format!("lambda must be positive and finite, got {x}"));
        }
        v.push(x);
    }
    if v.is_empty() {
        return Err("empty lambda list".into());
    }
    Ok(LambdaSpec::List(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Bin,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{stage}: {message}")]
    Invalid { stage: &'static str, message: String },
    #[error("{stage}: {message}")]
    Infeasible { stage: &'static str, message: String },
    #[error("{stage}: {message}")]
    Failed { stage: &'static str, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => 1,
            CliError::Infeasible { .. } => 2,
            CliError::Failed { .. } => 3,
        }
    }

    pub(crate) fn invalid(stage: &'static str, message: impl ToString) -> Self {
        CliError::Invalid {
            stage,
            message: message.to_string(),
        }
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    /// JSON summary, as printed.
    pub summary: String,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            3
        }
    }
}

pub fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::CheckMaterial(c) => check_material(c),
        Command::Spectrum(c) => commands::spectrum_table(c),
        Command::Simulate(c) => simulate(c),
        Command::VerifyDecay(c) => verify_decay(c).map(|o| o.outcome),
        Command::SweepLambda(c) => sweep_lambda(c).map(|(o, _)| o),
        Command::Selftest(c) => selftest(c),
    }
}

/// Parses `args` (program name first), runs, prints, and returns the exit
/// code.
pub fn main_with(args: impl IntoIterator<Item = OsString>, stdout: &mut impl Write, stderr: &mut impl Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // Help and version are not errors; everything else is bad input.
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 1;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match run(&cli.command) {
        Ok(o) => {
            for w in &o.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            let _ = writeln!(stdout, "{}", o.summary);
            if !o.passed {
                let _ = writeln!(stderr, "verification failed");
            }
            o.exit_code()
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
