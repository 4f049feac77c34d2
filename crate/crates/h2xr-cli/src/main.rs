//! Command-line front end. Every subcommand prints one JSON envelope on
//! stdout — command, config echo, results, timing, version — and optionally
//! writes the same envelope to a report file. Identical configs produce
//! byte-identical output outside the timing block.
//!
//! Exit codes: 0 success, 1 usage (bad flags or input files), 2 domain
//! errors (inputs outside what the mathematics admits), 3 numerics (a
//! solver or scan that refused to certify its result).

mod commands;
mod input;

use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use h2xr::par::Exec;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(h2xr::Error),
    Write(PathBuf, std::io::Error),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Lib(e) if e.is_numerics() => 3,
            CliError::Lib(_) | CliError::Write(..) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Write(path, e) => write!(f, "cannot write {}: {e}", path.display()),
        }
    }
}

impl From<h2xr::Error> for CliError {
    fn from(e: h2xr::Error) -> Self {
        CliError::Lib(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// A finished run: everything the envelope needs except the timing.
pub struct Completed {
    pub command: &'static str,
    pub config: Value,
    pub results: Value,
    /// Resolved report path, if the envelope should also land in a file.
    pub out: Option<PathBuf>,
}

#[derive(Parser)]
#[command(
    name = "h2xr",
    version,
    about = "Minimal graphs and minimal annuli in H²×R: catenoid family, spectra, fluxes, solvers, obstruction gates, tall-rectangle witnesses",
    after_help = "Relative output paths are placed under $H2XR_OUT_DIR when that variable is set."
)]
struct Cli {
    /// Run internally parallel sweeps sequentially (results are identical).
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Catenoid profile: closed-form invariants, CSV trace, mesh export.
    Catenoid(commands::CatenoidArgs),
    /// Stability-operator kernel census across angular modes.
    Jacobi(commands::JacobiArgs),
    /// Minimal graph over the disk or a concentric annulus.
    Graph(commands::GraphArgs),
    /// Minimal annulus near a catenoid with prescribed boundary curves.
    Annulus(commands::AnnulusArgs),
    /// End fluxes and conservation residuals of the exact catenoid.
    Flux(commands::FluxArgs),
    /// Center map of a translated rotationally invariant annulus.
    Center(commands::CenterArgs),
    /// Tall-rectangle geometry and certified area-comparison witnesses.
    Tallrect(commands::TallrectArgs),
    /// Obstruction gates for a boundary curve pair.
    Gate(commands::GateArgs),
    /// Run the structured self-verification battery.
    VerifyAll(commands::VerifyArgs),
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help/--version arrive here too; they are not usage errors.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };

    let started = Instant::now();
    let outcome = match &cli.command {
        Command::Catenoid(args) => commands::catenoid(args),
        Command::Jacobi(args) => commands::jacobi(args, exec),
        Command::Graph(args) => commands::graph(args),
        Command::Annulus(args) => commands::annulus(args),
        Command::Flux(args) => commands::flux(args),
        Command::Center(args) => commands::center(args),
        Command::Tallrect(args) => commands::tallrect(args, exec),
        Command::Gate(args) => commands::gate(args),
        Command::VerifyAll(args) => return commands::verify_all(args, exec),
    };

    match outcome {
        Ok(done) => {
            let envelope = json!({
                "command": done.command,
                "config": done.config,
                "results": done.results,
                "timing": {"seconds": started.elapsed().as_secs_f64()},
                "version": env!("CARGO_PKG_VERSION"),
            });
            let text = serde_json::to_string_pretty(&envelope).expect("envelope serializes");
            println!("{text}");
            if let Some(path) = done.out {
                if let Err(e) = std::fs::write(&path, text + "\n") {
                    let err = CliError::Write(path, e);
                    eprintln!("error: {err}");
                    return err.code();
                }
            }
            0
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.code()
        }
    }
}
