use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mlk::commands::{self, VerifySource};
use mlk::document::Input;
use mlk::suites::Suite;
use mlk::CliError;

/// Effective lower bounds for the Faltings height from period matrices.
#[derive(Debug, Parser)]
#[command(name = "mlk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the height lower bounds for an input document.
    Bound {
        file: String,
        /// Parameter of the simplified bound, in (0, 1).
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run invariant suites on an input document or on random matrices.
    Verify {
        /// Input document; omit with --random, or for the oracle suite.
        file: Option<String>,
        #[arg(long, value_enum)]
        suite: SuiteArg,
        /// Number of random matrices instead of an input file.
        #[arg(long, conflicts_with = "file")]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dimension of the random matrices.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Gauss nodes per axis, or QMC points per shift.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Injectivity diameters and clamped minima per embedding.
    Rho { file: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Lattice,
    Integrals,
    Chain,
    Oracle,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Lattice => vec![Suite::Lattice],
            SuiteArg::Integrals => vec![Suite::Integrals],
            SuiteArg::Chain => vec![Suite::Chain],
            SuiteArg::Oracle => vec![Suite::Oracle],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (doc, code) = match cli.command {
        Command::Bound { file, epsilon } => commands::bound(&Input::from_path(&file)?, epsilon)?,
        Command::Rho { file } => commands::rho(&Input::from_path(&file)?)?,
        Command::Verify {
            file,
            suite,
            random,
            seed,
            dim,
            budget,
        } => {
            let source = match (file, random) {
                (Some(f), _) => VerifySource::File(Input::from_path(&f)?),
                (None, Some(count)) => VerifySource::Random { count, dim },
                (None, None) => VerifySource::Builtin,
            };
            commands::verify(&source, &suite.suites(), seed, budget)?
        }
    };
    println!("{}", doc.to_json());
    if let Some(s) = &doc.summary {
        if !s.pass {
            eprintln!("{} of {} checks failed", s.failed, s.checks);
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("mlk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
