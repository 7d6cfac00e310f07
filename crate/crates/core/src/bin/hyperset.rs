use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hyperset::pipeline::{run_pipeline, ConfigError, Outputs, RunConfig, Stage};

#[derive(Parser)]
#[command(
    name = "hyperset",
    version,
    about = "QST vs SET simulation and reconstruction for hyperentangled photon pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline described by a JSON config.
    Run {
        config: PathBuf,
        /// Override protocol.rng_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the stage list, e.g. `simulate-qst,reconstruct,report`.
        #[arg(long, value_delimiter = ',')]
        stages: Option<Vec<String>>,
        /// Write report.json, records.csv and matrices/ under this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            seed,
            stages,
            out,
        } => run(config, seed, stages, out),
    }
}

fn run(
    config: PathBuf,
    seed: Option<u64>,
    stages: Option<Vec<String>>,
    out: Option<PathBuf>,
) -> ExitCode {
    let mut cfg = match RunConfig::load(&config) {
        Ok(c) => c,
        Err(e @ ConfigError::Parse { .. }) => {
            eprintln!("{}: {e}", config.display());
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = seed {
        cfg.protocol.rng_seed = seed;
    }
    if let Some(list) = stages {
        let parsed: Result<Vec<Stage>, _> = list
            .iter()
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.parse::<Stage>())
            .collect();
        match parsed {
            Ok(p) => cfg.pipeline = p,
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
        }
    }
    if let Some(dir) = out {
        cfg.outputs = Outputs::in_dir(&dir);
    }
    match run_pipeline(&cfg) {
        Ok(output) => {
            if let Some(report) = output.report {
                for col in &report.table.columns {
                    let rows: Vec<String> = col
                        .metrics
                        .rows()
                        .iter()
                        .map(|(name, e)| match e.std {
                            Some(s) => format!("{name}={:.3}±{:.3}", e.value, s),
                            None => format!("{name}={:.3}", e.value),
                        })
                        .collect();
                    println!("{:<18} {}", col.label, rows.join("  "));
                }
                if let Some(vis) = &report.visibility {
                    for b in &vis.bounds {
                        println!(
                            "bound {:?}: V = {:.6}, max purity = {:.5}",
                            b.polarization, b.visibility, b.max_purity
                        );
                    }
                }
                println!("report written to {}", cfg.outputs.report_path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
