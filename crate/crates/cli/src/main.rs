use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mgs_sim::{parse_config, presets_text, run, CliError, Overrides};

#[derive(Debug, Parser)]
#[command(
    name = "mgs-sim",
    version,
    about = "Monte-Carlo BER and complexity sweeps for Gibbs-sampling MIMO detectors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the sweep described by a TOML config and write results.csv.
    Simulate {
        config: PathBuf,
        /// Master seed, overriding the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory, overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write plot.py next to the CSV.
        #[arg(long)]
        plot: bool,
    },
    /// List the named detector presets.
    Presets,
}

fn simulate(config: PathBuf, overrides: Overrides) -> Result<(), CliError> {
    let mut cfg = parse_config(&config)?;
    cfg.apply(&overrides);
    let report = run(&cfg, overrides.threads)?;
    for w in report.warnings() {
        eprintln!("{w}");
    }
    println!("{}", report.csv_path.display());
    if let Some(p) = report.plot_path {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            config,
            seed,
            threads,
            out,
            plot,
        } => simulate(
            config,
            Overrides {
                seed,
                threads,
                out_dir: out,
                plot,
            },
        ),
        Command::Presets => {
            print!("{}", presets_text());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
