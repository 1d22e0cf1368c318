use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cuspbend_cli::commands::{run_bend, run_classify, run_hilbert};
use cuspbend_cli::{init_threads, run_sweep, run_verify, write_file, CliError, Grid, RunConfig};

/// Generalized cusps, Hilbert metrics and bending of projective structures.
#[derive(Parser)]
#[command(name = "cuspbend", version)]
struct Cli {
    /// Dimension n.
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true, default_value_t = cuspbend::DEFAULT_TOL)]
    tol: f64,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Parse JSON numbers as exact rationals.
    #[arg(long, global = true)]
    exact: bool,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the property suites and print a JSON report.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, hide = true)]
        perturb: bool,
    },
    /// Tabulate a_i and 1/a_i over a grid of bending parameters.
    Sweep {
        #[arg(long, default_value = "0:2:21")]
        grid: Grid,
        /// Shape constant shared by every slot.
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Also write an SVG chart of 1/a against s.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Bend a marked representation: {"rep", "moves", "verify_order_seed"?}.
    Bend { input: PathBuf },
    /// Classify cusp data or a list of generators.
    Classify { input: PathBuf },
    /// Hilbert distances: {"domain", "pairs"}, CSV out.
    Hilbert { input: PathBuf },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let mut config =
        RunConfig { n: cli.n, tol: cli.tol, seed: cli.seed, exact: cli.exact, out: cli.out, ..RunConfig::default() };
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", config.tol)));
    }
    let (text, ok) = match cli.command {
        Command::Verify { suite, perturb } => {
            config.suite = suite;
            config.perturb = perturb;
            let report = run_verify(&config)?;
            (report.to_json(), report.passed)
        }
        Command::Sweep { grid, b, svg } => {
            config.grid = grid;
            config.b = b;
            config.svg = svg;
            let out = run_sweep(&config)?;
            if let (Some(path), Some(svg)) = (&config.svg, &out.svg) {
                write_file(path, svg)?;
            }
            (out.csv, true)
        }
        Command::Bend { input } => {
            config.input = Some(input);
            (run_bend(&config)?, true)
        }
        Command::Classify { input } => {
            config.input = Some(input);
            (run_classify(&config)?, true)
        }
        Command::Hilbert { input } => {
            config.input = Some(input);
            (run_hilbert(&config)?, true)
        }
    };
    match &config.out {
        Some(path) => write_file(path, &text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|source| CliError::Write { path: "<stdout>".into(), source })?;
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    init_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
