//! Command line for exact relative-growth counting and transfer-matrix
//! spectral analysis of strongly Markov automata.

mod commands;
mod config;
mod output;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "relgrowth",
    version,
    about = "Exact relative-growth counting and spectral analysis for strongly Markov automata",
    after_help = "Exit codes: 0 ok (skips warn), 1 input/validation failure, 2 budget exceeded, 3 check failed."
)]
struct Cli {
    /// Config file with `key = value` lines; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Automaton file (see README for the format).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Built-in group: f2 or f3 (reduced-word graph).
    #[arg(long, global = true)]
    group: Option<String>,
    /// Generator images for built-in groups, e.g. "a:1,0;b:0,1".
    #[arg(long, global = true)]
    hom: Option<String>,
    /// Largest path length to compute.
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Torus grid resolution per coordinate.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Largest recurrence order to search.
    #[arg(long, global = true)]
    max_order: Option<usize>,
    /// Fit window "start:end".
    #[arg(long, global = true)]
    window: Option<String>,
    /// Weight target "w1,w2,..." for counting.
    #[arg(long, global = true)]
    target: Option<String>,
    /// Output directory for data files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Seed for sampled torus points.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Extra random torus samples during scans.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Cap on enumerated words (oracle).
    #[arg(long, global = true)]
    word_budget: Option<u64>,
    /// Cap on stored weight-table entries.
    #[arg(long, global = true)]
    table_budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and structurally validate the input.
    Validate,
    /// Component, lattice and dual-point analysis with spectral cross-check.
    Analyze,
    /// Exact counts by length: totals, zero-weight (or target) counts, ratios.
    Count {
        /// Also write the full per-weight table.
        #[arg(long)]
        by_weight: bool,
    },
    /// Spectral radii of the twisted matrices over a torus grid.
    Scan,
    /// Recover zero-weight counts by exact quadrature and compare.
    Fourier {
        /// Largest length to invert (default 16).
        #[arg(long)]
        upto: Option<usize>,
    },
    /// Fit the power-corrected exponential to the relative growth sequence.
    Fit,
    /// Exact minimal-recurrence search: totals control and relative-growth evidence.
    Rationality,
    /// Brute-force enumeration counts and path/word bijection check (built-in groups).
    Oracle,
    /// Run every check and print one verdict per line.
    Report,
}

fn build_config(cli: &Cli) -> Result<RunConfig, config::ConfigError> {
    let mut run = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config::ConfigError(format!("cannot read {}: {e}", path.display())))?;
        run.apply_file(&text)?;
    }
    if let Some(v) = &cli.input {
        run.input = Some(v.clone());
    }
    if let Some(v) = &cli.group {
        run.group = Some(v.clone());
    }
    if let Some(v) = &cli.hom {
        run.hom = Some(v.clone());
    }
    if let Some(v) = cli.n_max {
        run.n_max = v;
    }
    if let Some(v) = cli.grid {
        run.grid = v;
    }
    if let Some(v) = cli.max_order {
        run.max_order = v;
    }
    if let Some(v) = &cli.window {
        run.window = Some(config::parse_window(v)?);
    }
    if let Some(v) = &cli.target {
        run.target = Some(config::parse_target(v)?);
    }
    if let Some(v) = &cli.out_dir {
        run.out_dir = v.clone();
    }
    if let Some(v) = cli.seed {
        run.seed = v;
    }
    if let Some(v) = cli.samples {
        run.samples = v;
    }
    if let Some(v) = cli.word_budget {
        run.word_budget = v;
    }
    if let Some(v) = cli.table_budget {
        run.table_budget = v;
    }
    run.validate()?;
    Ok(run)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match build_config(&cli) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match &cli.command {
        Command::Validate => commands::cmd_validate(&run),
        Command::Analyze => commands::cmd_analyze(&run),
        Command::Count { by_weight } => commands::cmd_count(&run, *by_weight),
        Command::Scan => commands::cmd_scan(&run),
        Command::Fourier { upto } => commands::cmd_fourier(&run, *upto),
        Command::Fit => commands::cmd_fit(&run),
        Command::Rationality => commands::cmd_rationality(&run),
        Command::Oracle => commands::cmd_oracle(&run),
        Command::Report => commands::cmd_report(&run),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
