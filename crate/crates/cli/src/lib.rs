//! Command-line front end of `robust-ancova`: runs the F, White and wild
//! bootstrap tests on CSV data and drives type-I-error and power studies from
//! TOML configurations.
//!
//! Exit status is 0 on success, 2 for malformed input, configuration or flags,
//! and 3 when the data are numerically unsuitable (rank deficiency, leverage
//! one, singular Wald core).

use std::io::Write;
use std::num::NonZeroUsize;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use robust_ancova::{HcFlavor, Scale};

pub mod commands;
pub mod config;
pub mod ingest;
pub mod output;

pub use commands::{cmd_power, cmd_simulate, cmd_test, CliError, HypothesisChoice, Settings};
pub use ingest::{ingest_csv, read_csv, write_csv, IngestError, Ingested};
pub use output::{format_real, Cell, Format, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Threads {
    #[default]
    Auto,
    Count(NonZeroUsize),
}

impl std::str::FromStr for Threads {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Threads::Auto);
        }
        s.parse::<NonZeroUsize>()
            .map(Threads::Count)
            .map_err(|_| format!("expected `auto` or a positive thread count, got `{s}`"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "robust-ancova", version, about = "Heteroskedasticity-robust ANCOVA tests and simulation studies")]
pub struct Cli {
    /// Master seed for bootstrap multipliers and simulated errors.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads: `auto` or a positive count.
    #[arg(long, global = true, default_value = "auto")]
    pub threads: Threads,
    /// Replicate counts: desk (2000 datasets x 1000 draws) or paper (5000 x 5000).
    #[arg(long, global = true)]
    pub scale: Option<Scale>,
    /// Significance level.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Sandwich flavor: hc0 or hc2 (default hc2).
    #[arg(long, global = true)]
    pub flavor: Option<HcFlavor>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    pub output: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a hypothesis about the adjusted group means of a CSV dataset.
    Test {
        /// CSV file with `group`, `y` and covariate columns.
        input: PathBuf,
        /// oneway | twoway:BxC:{main_b,main_c,interaction} | nested:C1,C2,...:{category,subcategory}
        #[arg(long, default_value = "oneway")]
        hypothesis: HypothesisChoice,
        /// Bootstrap replications (default from --scale).
        #[arg(long)]
        boot: Option<usize>,
    },
    /// Empirical type I error rates for the scenarios of a config file.
    Simulate {
        /// TOML configuration.
        config: Option<PathBuf>,
        /// Built-in scenario set: paper_table1, paper_table2 or paper_table3.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Empirical power over a grid of mean differences.
    Power {
        /// TOML configuration.
        config: Option<PathBuf>,
        /// Built-in study: paper_figure1.
        #[arg(long)]
        preset: Option<String>,
    },
}

fn execute(cli: &Cli) -> Result<Table, CliError> {
    let settings = Settings { seed: cli.seed, scale: cli.scale, alpha: cli.alpha, flavor: cli.flavor };
    match &cli.command {
        Command::Test { input, hypothesis, boot } => cmd_test(input, hypothesis, *boot, &settings),
        Command::Simulate { config, preset } => cmd_simulate(config.as_deref(), preset.as_deref(), &settings),
        Command::Power { config, preset } => cmd_power(config.as_deref(), preset.as_deref(), &settings),
    }
}

/// Runs a parsed command line, writing results to `out` and diagnostics to
/// `err`. Returns the process exit status.
pub fn run<W: Write, E: Write>(cli: &Cli, out: &mut W, err: &mut E) -> u8 {
    let result = match cli.threads {
        Threads::Auto => execute(cli),
        Threads::Count(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.get()).build() {
            Ok(pool) => pool.install(|| execute(cli)),
            Err(e) => Err(CliError::Input(format!("cannot start {n} worker threads: {e}"))),
        },
    };
    match result {
        Ok(table) => match table.write(cli.output, &mut *out) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write output: {e}");
                2
            }
        },
        Err(e) => {
            let kind = match e {
                CliError::Input(_) => "error",
                CliError::Numerical(_) => "numerical failure",
            };
            let _ = writeln!(err, "{kind}: {e}");
            e.exit_code()
        }
    }
}
