//! `fbsolve` - solver for a one-phase free boundary problem of the
//! diffusion-convection equation u_t = u^2 (D u_xx - u_x), via its
//! heat-equation boundary-integral formulation.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 hypothesis
//! failure in `certify`, 3 solver non-convergence.

mod config;
mod run;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fbsolve", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the existence certificate and the admissible horizon.
    Certify(CommonArgs),
    /// Solve the free boundary problem and emit the solution series.
    Solve(CommonArgs),
    /// Solve, then append the full residual report to the manifest.
    Verify(CommonArgs),
    /// Run the manufactured-solution and jump-relation checks.
    Mms(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the flat key-value configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV series and manifest.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also emit the heat field samples (field.csv); large.
    #[arg(long)]
    emit_field: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, runner): (
        &CommonArgs,
        fn(&config::RunConfig, &std::path::Path) -> Result<(), run::RunError>,
    ) = match &cli.command {
        Command::Certify(a) => (a, run::run_certify),
        Command::Solve(a) => (a, |c, o| run::run_solve(c, o, false)),
        Command::Verify(a) => (a, |c, o| run::run_solve(c, o, true)),
        Command::Mms(a) => (a, run::run_mms),
    };

    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return ExitCode::from(1);
        }
    };
    let mut parsed = match config::parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    parsed.emit_field |= args.emit_field;

    match runner(&parsed, &args.out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
