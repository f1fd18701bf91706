use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use e3lab_cli::commands::{self, Output, Run, Suite};
use e3lab_cli::config::{Config, ConfigError};

#[derive(Parser)]
#[command(name = "e3lab", version, about = "Integrable flows on e(3)*: simulate and verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file for CSV data. Without it the CSV goes to stdout and the report to stderr.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for all random draws. Overrides `[run] seed`.
    #[arg(long, global = true, env = "E3LAB_SEED")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configured case and write the trajectory CSV.
    Simulate,
    /// Run verification suites on seeded samples.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
    /// Elliptic reduction and reconstruction of the configured trajectory.
    Reduce,
    /// Separation variables at the initial state and along the flow.
    Separate,
    /// Curve invariants and the closed-form solution for u.
    Curves,
    /// The Hess-Appel'rot top on its invariant hypersurface.
    Hess,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Poisson,
    Measure,
    Hamiltonian,
    Lax,
    Rmatrix,
    Spectral,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Poisson => Suite::Poisson,
            SuiteArg::Measure => Suite::Measure,
            SuiteArg::Hamiltonian => Suite::Hamiltonian,
            SuiteArg::Lax => Suite::Lax,
            SuiteArg::Rmatrix => Suite::Rmatrix,
            SuiteArg::Spectral => Suite::Spectral,
            SuiteArg::All => Suite::All,
        }
    }
}

fn load(path: Option<&PathBuf>) -> Result<Config, String> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Config::parse(&text).map_err(|e: ConfigError| format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load(cli.config.as_ref()) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(2);
        }
    };
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    let out = cli.out.clone().or_else(|| config.output.clone());
    let run = Run { config, seed };
    let result = match cli.command {
        Command::Simulate => commands::simulate(&run),
        Command::Verify { suite } => commands::verify(&run, suite.into()),
        Command::Reduce => commands::reduce(&run),
        Command::Separate => commands::separate(&run),
        Command::Curves => commands::curves(&run),
        Command::Hess => commands::hess(&run),
    };
    let Output { report, csv } = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match (csv, out) {
        (Some(csv), Some(path)) => {
            if let Err(e) = std::fs::write(&path, csv) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
            print!("{report}");
        }
        (Some(csv), None) => {
            print!("{csv}");
            eprint!("{report}");
        }
        (None, _) => print!("{report}"),
    }
    if report.failures() > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
