//! newton-dual: command-line front end.
//!
//! Exit codes: 0 ok, 2 input error, 3 partial (warnings), 4 verification
//! failure, 5 numerical failure.

mod commands;
mod input;
mod output;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use commands::{Fail, Settings, Status};
use input::Job;
use newton_dual::heunfn::SeriesControl;
use newton_dual::quad::QuadratureControl;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "newton-dual", version, about = "Newton duality, biconfluent Heun functions and radial spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// relative truncation tolerance of the regular series
    #[arg(long, global = true, default_value_t = SeriesControl::default().rel_tol)]
    series_tol: f64,

    /// relative tolerance of the connection-coefficient quadrature
    #[arg(long, global = true, default_value_t = QuadratureControl::default().rel_tol)]
    quad_tol: f64,

    /// cells of the finite-volume oracle grid (and steps of the phase integrator)
    #[arg(long, global = true, default_value_t = 4000)]
    grid_points: usize,

    /// outer radius for the oracle, overriding the potential-based choice
    #[arg(long, global = true)]
    rmax: Option<f64>,

    /// write here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full dual set of a potential with each member's map
    Dualize { input: Option<PathBuf> },
    /// Bound states from K2 = 0 cross-checked by the finite-volume oracle
    Spectrum { input: Option<PathBuf> },
    /// Duality invariants over the worked dual pairs
    Verify { input: Option<PathBuf> },
    /// Classical orbit, its dual image and residuals
    Orbit { input: Option<PathBuf> },
    /// A single Heun-function or connection-coefficient value
    Heun { input: Option<PathBuf> },
    /// Phase shifts over a k grid with the oracle cross-check
    Phase { input: Option<PathBuf> },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dualize { .. } => "dualize",
            Command::Spectrum { .. } => "spectrum",
            Command::Verify { .. } => "verify",
            Command::Orbit { .. } => "orbit",
            Command::Heun { .. } => "heun",
            Command::Phase { .. } => "phase",
        }
    }

    fn input(&self) -> Option<&PathBuf> {
        match self {
            Command::Dualize { input }
            | Command::Spectrum { input }
            | Command::Verify { input }
            | Command::Orbit { input }
            | Command::Heun { input }
            | Command::Phase { input } => input.as_ref(),
        }
    }
}

fn read_job(cmd: &Command) -> Result<Job, Fail> {
    let text = match cmd.input() {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| Fail::Input(format!("cannot read {}: {e}", p.display())))?
        }
        // verify runs its built-in suite without input
        None if matches!(cmd, Command::Verify { .. }) => String::new(),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Fail::Input(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    Job::parse(&text).map_err(Fail::Input)
}

fn settings(cli: &Cli) -> Result<Settings, Fail> {
    let series = SeriesControl { rel_tol: cli.series_tol, ..SeriesControl::default() };
    let quad = QuadratureControl { rel_tol: cli.quad_tol, ..QuadratureControl::default() };
    series.validate()?;
    quad.validate()?;
    if cli.grid_points < 200 {
        return Err(Fail::Input("--grid-points must be at least 200".into()));
    }
    if let Some(r) = cli.rmax {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Fail::Input("--rmax must be positive".into()));
        }
    }
    Ok(Settings { series, quad, grid_points: cli.grid_points, r_max: cli.rmax })
}

fn run(cli: &Cli) -> Result<Status, Fail> {
    let s = settings(cli)?;
    let job = read_job(&cli.command)?;
    let report = match cli.command {
        Command::Dualize { .. } => commands::dualize(&job)?,
        Command::Spectrum { .. } => commands::spectrum(&job, &s)?,
        Command::Verify { .. } => verify::verify(&job, &s)?,
        Command::Orbit { .. } => commands::orbit(&job)?,
        Command::Heun { .. } => commands::heun(&job, &s)?,
        Command::Phase { .. } => commands::phase(&job, &s)?,
    };
    let text = match cli.format {
        Format::Json => output::to_json(&report.json(cli.command.name())),
        Format::Csv => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            report.table.to_csv().map_err(|e| Fail::Numerical(format!("csv: {e}")))?
        }
    };
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Fail::Input(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(report.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Partial) => ExitCode::from(3),
        Ok(Status::VerificationFailed) => ExitCode::from(4),
        Err(Fail::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(5)
        }
    }
}
