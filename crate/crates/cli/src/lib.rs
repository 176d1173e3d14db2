//! Command-line front end: moment tables by several methods, identity
//! suites, and Monte Carlo runs, reported as JSON or CSV.

mod commands;
pub mod report;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fubm_core::mcsim::{SimError, DEFAULT_STEPS};
use fubm_core::moments::{MomentsError, DEFAULT_STEP};
use fubm_core::noncrossing::NcError;
use fubm_core::series::SeriesError;

pub use report::RunReport;

/// Exit code for malformed or out-of-range arguments.
pub const EXIT_USAGE: i32 = 2;
/// Exit code when a requested check fails or a computation breaks down.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "fubm",
    version,
    about = "Moments of a projected free unitary Brownian motion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// tau[(P Y_t)^n] for n = 1..=N.
    Moments(MomentsArgs),
    /// Mixed moments R_{m,n}.
    Mixed(MixedArgs),
    /// Even alternating moments r_n.
    Even(EvenArgs),
    /// Odd alternating moments s_{n,1}.
    Odd(OddArgs),
    /// Coefficient grid c_{j,k}.
    Coeffs(CoeffsArgs),
    /// Identity and cross-method suites.
    Verify(VerifyArgs),
    /// Monte Carlo estimates of word traces.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Model {
    /// Trace of the projection, in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// RK4 step for ODE methods.
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub step: f64,
}

#[derive(Debug, Clone, Args)]
pub struct MonteCarlo {
    #[arg(long, default_value_t = 256)]
    pub dim: usize,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Path steps on [0, t].
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "mean-matched")]
    pub increment: IncrementArg,
    /// Brackets pass when |estimate - reference| <= k * stderr + slack.
    #[arg(long, default_value_t = 3.0)]
    pub k: f64,
    #[arg(long, default_value_t = 0.02)]
    pub slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IncrementArg {
    /// Entry variance h/N.
    Plain,
    /// Variance chosen so that E exp(iH) = exp(-h/2) I.
    MeanMatched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PyMethod {
    Closed,
    Cumulant,
    Ode,
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    /// Largest power.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "closed")]
    pub method: Vec<PyMethod>,
    /// Tolerance for deterministic method agreement (default 1e-10 for
    /// cumulant, 1e-6 for ode).
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub mc: MonteCarlo,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MixedMethod {
    Closed,
    Ode,
    /// Only the n = 1 column.
    Combinatorial,
}

#[derive(Debug, Clone, Args)]
pub struct MixedArgs {
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "closed")]
    pub method: Vec<MixedMethod>,
    /// Agreement tolerance (default 1e-6 absolute for ode, 1e-8 relative
    /// for combinatorial).
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvenMethod {
    Ode,
    /// alpha = 1/2 only.
    HalfSeries,
}

#[derive(Debug, Clone, Args)]
pub struct EvenArgs {
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ode")]
    pub method: Vec<EvenMethod>,
    /// Agreement tolerance (default 1e-7).
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OddMethod {
    Ode,
    /// alpha = 1/2 only.
    HalfSeries,
    /// alpha = 1/2 only.
    Convolution,
}

#[derive(Debug, Clone, Args)]
pub struct OddArgs {
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ode")]
    pub method: Vec<OddMethod>,
    /// Agreement tolerance (default 1e-6).
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct CoeffsArgs {
    #[arg(long, default_value_t = 4)]
    pub j: usize,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Symmetry tolerance (default 1e-10).
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Binom,
    Kreweras,
    WSquare,
    Oddeven,
    Stationary,
    Constancy,
    CrossMethod,
    Inverse,
    Discrepancy,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub suite: Vec<Suite>,
    /// Times for time-dependent suites.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2")]
    pub t: Vec<f64>,
    /// Trace values for cross-method and discrepancy suites.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.9,1")]
    pub alpha: Vec<f64>,
    /// Series truncation degree.
    #[arg(long, default_value_t = 12)]
    pub degree: usize,
    /// Largest ground set / moment order.
    #[arg(long, default_value_t = 9)]
    pub nmax: usize,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub step: f64,
    /// Override every suite's default tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Word in A = PY and A* = PY^*, e.g. AA*A; repeat for several words.
    #[arg(long, required = true)]
    pub word: Vec<String>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Use Haar unitaries instead of paths at time t.
    #[arg(long)]
    pub haar: bool,
    /// Skip the reference values and bracket checks.
    #[arg(long)]
    pub no_reference: bool,
    #[command(flatten)]
    pub mc: MonteCarlo,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<MomentsError> for CliError {
    fn from(e: MomentsError) -> Self {
        match e {
            MomentsError::Param(_)
            | MomentsError::InvalidStep(_)
            | MomentsError::GridTooSmall { .. }
            | MomentsError::DegreeTooSmall { .. } => CliError::Usage(e.to_string()),
            MomentsError::Nc(nc) => nc.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<NcError> for CliError {
    fn from(e: NcError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(_) | SimError::EmptyWord | SimError::Parse(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

/// Result of one invocation: what goes to stdout and stderr, and the exit
/// code.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<RunReport>,
}

/// Builds the report for a parsed command line.
pub fn execute(command: &Command) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut report = match command {
        Command::Moments(a) => commands::moments(a)?,
        Command::Mixed(a) => commands::mixed(a)?,
        Command::Even(a) => commands::even(a)?,
        Command::Odd(a) => commands::odd(a)?,
        Command::Coeffs(a) => commands::coeffs(a)?,
        Command::Verify(a) => verify::run(a)?,
        Command::Simulate(a) => return commands::simulate(a),
    };
    report.elapsed_s = Some(report::Real(start.elapsed().as_secs_f64()));
    Ok(report)
}

fn output_of(command: &Command) -> &Output {
    match command {
        Command::Moments(a) => &a.output,
        Command::Mixed(a) => &a.output,
        Command::Even(a) => &a.output,
        Command::Odd(a) => &a.output,
        Command::Coeffs(a) => &a.output,
        Command::Verify(a) => &a.output,
        Command::Simulate(a) => &a.output,
    }
}

/// Parses `argv` (program name first), runs the command, and renders the
/// report. Exit code 0 iff every check in the report passes.
pub fn run_command<I, T>(argv: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return Execution {
                code,
                stdout,
                stderr,
                report: None,
            };
        }
    };
    let failed = |e: CliError| Execution {
        code: e.exit_code(),
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
        report: None,
    };
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => return failed(e),
    };
    let output = output_of(&cli.command);
    let rendered = match output.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    let stdout = match &output.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &rendered) {
                return failed(CliError::Usage(format!(
                    "cannot write {}: {e}",
                    path.display()
                )));
            }
            String::new()
        }
        None => rendered,
    };
    let failures: Vec<String> = report
        .checks()
        .filter(|c| !c.pass)
        .map(|c| {
            format!(
                "check failed: {} [{}] residual {} > tolerance {}\n",
                c.check,
                c.method,
                c.residual.text(),
                c.tolerance.text()
            )
        })
        .collect();
    Execution {
        code: if failures.is_empty() {
            0
        } else {
            EXIT_NUMERICAL
        },
        stdout,
        stderr: failures.concat(),
        report: Some(report),
    }
}
