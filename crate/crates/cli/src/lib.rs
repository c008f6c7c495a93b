//! Command-line front end: exact values, parameter sweeps and Monte Carlo
//! comparisons, rendered as tables, CSV or JSON.

mod render;

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use annulus_core::analysis::compare;
use annulus_core::exact::{
    crossing_probability, distribution, mean_spanning_clusters, o1_crossing_probability,
    odd_hull_probability, rho_grid, sweep, z_plus_minus, CrossingForm, MAX_DISTRIBUTION_ORDER,
};
use annulus_core::{geometry_for, make_modulus, run_trials, Error, Truncation};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use render::{ExactOutput, McOutput, SweepOutput, SCHEMA_VERSION};

pub const WORKERS_ENV: &str = "ANNULUS_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "annulus",
    version,
    about = "Spanning clusters of critical percolation in an annulus"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact crossing probabilities, P(N_c) and related quantities.
    Exact(ExactArgs),
    /// Crossing probability, P(N_c) and mean N_c over a grid of aspect ratios.
    Sweep(SweepArgs),
    /// Simulate the lattice and compare with the exact values.
    Mc(McArgs),
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Largest N_c reported.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=MAX_DISTRIBUTION_ORDER as i64))]
    pub n_max: u32,

    /// Absolute truncation tolerance for every series.
    #[arg(long, default_value_t = 1e-15, value_parser = tolerance)]
    pub tol: f64,

    /// Cap on terms per series or product.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_terms: u64,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    /// Aspect ratio L/ℓ.
    #[arg(long, allow_negative_numbers = true, value_parser = positive)]
    pub rho: f64,

    /// x1, x2, x3a, x3b, loopgas, auto or all.
    #[arg(long, default_value = "auto", value_parser = form_choice)]
    pub form: FormChoice,

    #[command(flatten)]
    pub series: SeriesArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, allow_negative_numbers = true, value_parser = positive)]
    pub rho_min: f64,

    #[arg(long, allow_negative_numbers = true, value_parser = positive)]
    pub rho_max: f64,

    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    pub points: u64,

    /// Space the grid evenly in ln ρ.
    #[arg(long)]
    pub log: bool,

    #[command(flatten)]
    pub series: SeriesArgs,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Requested aspect ratio; the lattice realises the nearest one it can.
    #[arg(long, allow_negative_numbers = true, value_parser = positive)]
    pub rho: f64,

    /// Columns 2ℓ/a of the staggered lattice; even, at least 4.
    #[arg(long, default_value_t = 64, value_parser = columns)]
    pub cols: usize,

    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; results do not depend on this.
    #[arg(long, env = WORKERS_ENV, value_parser = clap::value_parser!(u64).range(1..=1024))]
    pub workers: Option<u64>,

    /// Record the wall-clock time of the run in the output.
    #[arg(long)]
    pub timestamp: bool,

    #[command(flatten)]
    pub series: SeriesArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormChoice {
    One(CrossingForm),
    All,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("must be positive and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn tolerance(s: &str) -> Result<f64, String> {
    let v = positive(s)?;
    if v >= 1.0 {
        return Err(format!("must be below 1, got {v}"));
    }
    Ok(v)
}

fn columns(s: &str) -> Result<usize, String> {
    let v: usize = s
        .parse()
        .map_err(|e: std::num::ParseIntError| e.to_string())?;
    if v < 4 || !v.is_multiple_of(2) {
        return Err(format!("must be even and at least 4, got {v}"));
    }
    Ok(v)
}

fn form_choice(s: &str) -> Result<FormChoice, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(FormChoice::All);
    }
    s.parse()
        .map(FormChoice::One)
        .map_err(|_| format!("expected one of x1, x2, x3a, x3b, loopgas, auto, all; got '{s}'"))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 when a series fails to converge, 4 for resource
    /// and I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(Error::Domain(_) | Error::Overflow { .. }) => 2,
            CliError::Core(Error::TruncationExceeded { .. }) => 3,
            CliError::Core(Error::Resource(_)) | CliError::Io(_) => 4,
        }
    }
}

fn flag_error(flag: &str, e: Error) -> CliError {
    match e {
        Error::Domain(msg) => CliError::Usage(format!("invalid {flag}: {msg}")),
        other => other.into(),
    }
}

impl SeriesArgs {
    fn truncation(&self) -> Result<Truncation, CliError> {
        Truncation::new(self.tol, self.max_terms as usize).map_err(|e| flag_error("--tol", e))
    }
}

/// Runs one parsed command and returns the rendered output.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Exact(args) => exact(args).map(|out| out.render(cli.format)),
        Command::Sweep(args) => run_sweep(args).map(|out| out.render(cli.format)),
        Command::Mc(args) => mc(args).map(|out| out.render(cli.format)),
    }
}

pub fn exact(args: &ExactArgs) -> Result<ExactOutput, CliError> {
    let trunc = args.series.truncation()?;
    let m = make_modulus(args.rho).map_err(|e| flag_error("--rho", e))?;
    let forms: Vec<CrossingForm> = match args.form {
        FormChoice::All => CrossingForm::EXPLICIT.to_vec(),
        FormChoice::One(f) => vec![f],
    };
    let crossing = forms
        .into_iter()
        .map(|f| Ok((f, crossing_probability(&m, f, &trunc)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(ExactOutput {
        nome: m.nome_summary(),
        abs_tol: trunc.abs_tol,
        crossing,
        distribution: distribution(&m, args.series.n_max, &trunc)?,
        mean_nc: mean_spanning_clusters(&m, &trunc)?,
        o1_crossing: o1_crossing_probability(&m, &trunc)?,
        z_plus_minus: z_plus_minus(&m, &trunc)?,
        odd_hull: odd_hull_probability(&m, &trunc)?,
    })
}

pub fn run_sweep(args: &SweepArgs) -> Result<SweepOutput, CliError> {
    let trunc = args.series.truncation()?;
    let grid = rho_grid(args.rho_min, args.rho_max, args.points as usize, args.log)
        .map_err(|e| flag_error("--rho-max", e))?;
    let first = make_modulus(args.rho_min).map_err(|e| flag_error("--rho-min", e))?;
    let last = make_modulus(args.rho_max).map_err(|e| flag_error("--rho-max", e))?;
    Ok(SweepOutput {
        n_max: args.series.n_max,
        abs_tol: trunc.abs_tol,
        log_spacing: args.log,
        endpoints: [first.nome_summary(), last.nome_summary()],
        points: sweep(&grid, args.series.n_max, &trunc)?,
    })
}

pub fn mc(args: &McArgs) -> Result<McOutput, CliError> {
    let trunc = args.series.truncation()?;
    let geometry = geometry_for(args.rho, args.cols).map_err(|e| flag_error("--rho/--cols", e))?;
    let workers = match args.workers {
        Some(w) => w as usize,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let stats = run_trials(geometry, args.trials, args.seed, workers)?;
    let report = compare(&stats, args.series.n_max, &trunc)?;
    let timestamp = args.timestamp.then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs())
    });
    Ok(McOutput {
        rho_requested: args.rho,
        stats,
        report,
        timestamp,
    })
}

/// Parses `argv`, runs the command and writes the result. Returns the
/// process exit code; diagnostics go to stderr as a single line.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            // clap spreads one diagnostic over several lines before the usage
            let rendered = e.to_string();
            let message: Vec<&str> = rendered
                .lines()
                .take_while(|l| !l.trim().is_empty())
                .map(str::trim)
                .collect();
            eprintln!("{}", message.join(" "));
            return 2;
        }
    };
    let result = execute(&cli).and_then(|text| match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(CliError::from),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
