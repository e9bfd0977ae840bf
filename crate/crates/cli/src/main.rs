use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pwf_cli::config::{RunConfig, SCHEMA};
use pwf_cli::{commands, driver, CliError};
use pwf_core::diagnostics::cylinder_modulus;
use pwf_core::grid::FlatModulus;

/// Parametric Willmore flow of tori.
#[derive(Parser)]
#[command(name = "pwf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModulusArgs {
    /// Real part of tau.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a: f64,
    /// Imaginary part of tau.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Use the rectangle matched to the cylinder of this half-length instead.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    cylinder: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the flow described by a config file.
    Run {
        config: PathBuf,
        /// Output directory (overrides `[output] dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Willmore energy and curvature identities of a snapshot or config.
    Energy { input: PathBuf },
    /// Compare the first variation with finite differences of W.
    GradientCheck {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// L1 norms of the flat-torus Green function.
    Green {
        #[command(flatten)]
        modulus: ModulusArgs,
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
    /// L1 norms of the tent field on the rectangular torus tau = i b.
    DbarCheck {
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 512)]
        n: usize,
    },
    /// Admissible radius and heuristic existence time.
    Existence {
        input: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long = "c-hat", default_value_t = 1.0)]
        c_hat: f64,
    },
}

fn execute(cmd: Command) -> Result<String, CliError> {
    match cmd {
        Command::Run { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            let m = driver::run_to_dir(&cfg, &dir)?;
            Ok(format!(
                "{} after {} steps at t = {}; artifacts in {}\n",
                m.status,
                m.steps,
                m.final_t,
                dir.display()
            ))
        }
        Command::Energy { input } => commands::energy(&commands::load_input(&input)?),
        Command::GradientCheck { input, seed, tol } => {
            commands::gradient_check(&commands::load_input(&input)?, seed, tol)
        }
        Command::Green { modulus, n } => {
            let m = match modulus.cylinder {
                Some(l) => cylinder_modulus(l)?,
                None => FlatModulus::new(modulus.a, modulus.b)?,
            };
            commands::green(m, n)
        }
        Command::DbarCheck { b, n } => commands::dbar_check(b, n),
        Command::Existence {
            input,
            beta,
            lambda,
            c_hat,
        } => commands::existence(&commands::load_input(&input)?, beta, lambda, c_hat),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            eprintln!("\nconfig schema:\n{SCHEMA}");
            return ExitCode::from(2);
        }
    };
    match execute(cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == 2 {
                eprintln!("\nconfig schema:\n{SCHEMA}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
