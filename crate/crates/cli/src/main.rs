mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mixsyn::Error;

use commands::Status;
use config::{Overrides, RunConfig};

/// Optimal H-infinity mixed-sensitivity controllers for delayed-feedback plants.
///
/// Exit codes: 0 success, 1 invalid parameters, 2 no admissible controller or
/// verification tolerance exceeded, 3 I/O or unreadable file, 4 pole hit on
/// the verification grid.
#[derive(Parser)]
#[command(name = "mixsyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute gamma_opt and the optimal controller.
    Synthesize {
        #[command(flatten)]
        params: ParamArgs,
        /// Output directory for controller.json, gamma_scan.csv, summary.txt.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate the closed loop of a stored controller on a frequency grid.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "controller.json")]
        controller: PathBuf,
        /// Allowed relative gap between the achieved norm and gamma_opt.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Output directory for report.json and magnitude.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Sample the impulse response of the finite-memory block.
    Impulse {
        #[arg(long, default_value = "controller.json")]
        controller: PathBuf,
        #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
        t_max: f64,
        #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
        dt: f64,
        /// Output CSV path.
        #[arg(long, default_value = "impulse.csv")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Flat `key = value` file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    h: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    rho: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    omega_min: Option<f64>,
    #[arg(long)]
    omega_max: Option<f64>,
    /// Base log-spaced points before refinement around peaks.
    #[arg(long)]
    grid_points: Option<usize>,
}

fn resolve(
    params: &ParamArgs,
    grid: Option<&GridArgs>,
    tolerance: Option<f64>,
) -> mixsyn::Result<RunConfig> {
    let file = match &params.config {
        Some(path) => Overrides::load(path)?,
        None => Overrides::default(),
    };
    let flags = Overrides {
        k: params.k,
        a: params.a,
        b: params.b,
        h: params.h,
        rho: params.rho,
        alpha: params.alpha,
        beta: params.beta,
        omega_min: grid.and_then(|g| g.omega_min),
        omega_max: grid.and_then(|g| g.omega_max),
        grid_points: grid.and_then(|g| g.grid_points),
        tolerance,
    };
    RunConfig::resolve(&file.layered(flags))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParams(_)
        | Error::OutOfInterval { .. }
        | Error::RepeatedZeros
        | Error::Format(_) => 1,
        Error::NoSingularGamma { .. }
        | Error::DegenerateM { .. }
        | Error::DegenerateL
        | Error::DegenerateDenominator { .. }
        | Error::RepeatedDenominatorRoots(..) => 2,
        Error::Io(_) | Error::Json(_) => 3,
        Error::PoleHit { .. } => 4,
    }
}

fn run(cli: Cli) -> mixsyn::Result<Status> {
    match cli.command {
        Command::Synthesize { params, out } => {
            commands::synthesize(&resolve(&params, None, None)?, &out)
        }
        Command::Verify {
            params,
            grid,
            controller,
            tolerance,
            out,
        } => commands::verify_controller(
            &resolve(&params, Some(&grid), tolerance)?,
            &controller,
            &out,
        ),
        Command::Impulse {
            controller,
            t_max,
            dt,
            out,
        } => commands::impulse(&controller, t_max, dt, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::ToleranceExceeded(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
