//! `fifogap` command line: pack a single instance, run block-size
//! sweeps, and plot sweep results.
//!
//! Exit codes: 0 on success, 2 on input or validation errors, 3 on
//! output I/O errors.

mod config;
mod error;
mod instance;
mod plot;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fifogap::experiment::write_csv;
use fifogap::{run_sweep, BlockSummary, TrialRecord};

use crate::error::CliError;

/// Environment variable supplying the default sweep thread count;
/// `--threads` overrides it.
const THREADS_ENV: &str = "FIFOGAP_THREADS";

#[derive(Parser)]
#[command(
    name = "fifogap",
    version,
    about = "Welfare gap between FIFO inclusion and optimal block packing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file with every packing procedure.
    Pack {
        /// Instance file: header `gas_limit gas_price min_tx_gas
        /// max_tx_gas`, then one `gross_utility gas` line per
        /// transaction in arrival order.
        instance: PathBuf,
        /// Largest instance the exact solver will attempt.
        #[arg(long, default_value_t = fifogap::packing::DEFAULT_EXACT_LIMIT)]
        exact_limit: usize,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run a Monte Carlo sweep over block sizes and write a CSV.
    Sweep {
        /// Key-value configuration file.
        config: PathBuf,
        /// Override the configured master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the configured output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: FIFOGAP_THREADS or all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Render sweep CSV results as SVG figures, one per distribution.
    Plot {
        /// CSV produced by `sweep`.
        csv: PathBuf,
        /// Directory to write `gap-<distribution>.svg` files into.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Pack {
            instance,
            exact_limit,
            json,
        } => {
            let parsed = instance::parse_instance(&read_input(&instance)?)?;
            let report = report::build_report(parsed, exact_limit);
            if json {
                println!("{:#}", report.json());
            } else {
                print!("{}", report.human());
            }
            Ok(())
        }
        Command::Sweep {
            config,
            seed,
            out,
            threads,
        } => {
            let mut cfg = config::parse_config(&read_input(&config)?)?;
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            let out_path = out.unwrap_or_else(|| cfg.output.clone());
            let records = run_sweep_all(&cfg, resolve_threads(threads)?)?;

            let mut bytes = Vec::new();
            write_csv(&records, &mut bytes)
                .map_err(|e| CliError::io(format!("cannot serialize records: {e}")))?;
            fs::write(&out_path, &bytes)
                .map_err(|e| CliError::io(format!("cannot write {}: {e}", out_path.display())))?;

            for line in summary_lines(&records)? {
                println!("{line}");
            }
            println!("wrote {} records to {}", records.len(), out_path.display());
            Ok(())
        }
        Command::Plot { csv, out } => {
            let file = fs::File::open(&csv)
                .map_err(|e| CliError::input(format!("cannot read {}: {e}", csv.display())))?;
            let records = plot::read_csv(file)?;
            fs::create_dir_all(&out)
                .map_err(|e| CliError::io(format!("cannot create {}: {e}", out.display())))?;
            for (slug, svg) in plot::render_figures(&records)? {
                let path = out.join(format!("gap-{slug}.svg"));
                fs::write(&path, svg)
                    .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .map_err(|_| CliError::input(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        Err(_) => Ok(0), // rayon default: one thread per core
    }
}

/// Runs the sweep for every configured distribution on a dedicated
/// thread pool, concatenating records in configuration order.
fn run_sweep_all(cfg: &config::CliConfig, threads: usize) -> Result<Vec<TrialRecord>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::input(format!("cannot build thread pool: {e}")))?;
    let mut records = Vec::new();
    for &dist in &cfg.distributions {
        let experiment = cfg.experiment(dist);
        let batch = pool
            .install(|| run_sweep(&experiment))
            .map_err(|e| CliError::input(e.to_string()))?;
        records.extend(batch);
    }
    Ok(records)
}

fn summary_lines(records: &[TrialRecord]) -> Result<Vec<String>, CliError> {
    let summaries = fifogap::aggregate(records).map_err(|e| CliError::input(e.to_string()))?;
    Ok(summaries.iter().map(summary_line).collect())
}

fn summary_line(s: &BlockSummary) -> String {
    let stat = |v: &Option<fifogap::experiment::SummaryStat>| match v {
        Some(st) => format!("{:.4} (sd {:.4})", st.mean, st.std_dev),
        None => "undefined".to_string(),
    };
    format!(
        "{} block {}: ratio_lb {} ratio_ub {} bound_ratio {} gap_lower {}{}",
        s.distribution,
        s.block_size,
        stat(&s.ratio_lb),
        stat(&s.ratio_ub),
        stat(&s.bound_ratio),
        stat(&s.gap_lower),
        if s.undefined_ratios > 0 {
            format!(" [{} of {} ratios undefined]", s.undefined_ratios, s.trials)
        } else {
            String::new()
        }
    )
}
