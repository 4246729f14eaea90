use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use active_gsp::harness::{self, Scenario};
use active_gsp::Error;

#[derive(Parser)]
#[command(name = "active-gsp", version, about = "Active sampling of approximately bandlimited graph signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write traces plus the aggregate table.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: out/<scenario name>).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        /// Overrides master_seed from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the built-in scenarios or print one as a config file.
    Presets {
        #[arg(long)]
        list: bool,
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
    /// Recompute the aggregate table from a directory of trace files.
    Aggregate {
        #[arg(long)]
        traces: PathBuf,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn fail(e: &Error, config_stage: bool) -> ExitCode {
    eprintln!("error: {e}");
    if config_stage || e.is_config_error() {
        ExitCode::from(EXIT_CONFIG)
    } else {
        ExitCode::from(EXIT_RUNTIME)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            workers,
            seed,
        } => {
            let mut scenario = match Scenario::load(&config) {
                Ok(s) => s,
                Err(e) => return fail(&e, true),
            };
            if let Some(seed) = seed {
                scenario.master_seed = seed;
            }
            let workers = workers
                .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
            let out = out.unwrap_or_else(|| PathBuf::from("out").join(&scenario.name));
            let run = match harness::run_scenario(&scenario, workers) {
                Ok(r) => r,
                Err(e) => return fail(&e, false),
            };
            if let Err(e) = harness::write_run(&run, &out) {
                return fail(&e, false);
            }
            eprintln!(
                "wrote {} traces and aggregate.csv to {}",
                run.results.len(),
                out.display()
            );
            ExitCode::SUCCESS
        }
        Command::Presets { list, show } => {
            if let Some(name) = show {
                match harness::preset(&name) {
                    Some(s) => print!("{}", s.to_toml()),
                    None => {
                        eprintln!("error: unknown preset `{name}`");
                        return ExitCode::from(EXIT_CONFIG);
                    }
                }
            } else if list {
                for s in harness::presets() {
                    println!(
                        "{}\talpha={}\tsnr_db={}\ttrials={}\tm_max={}",
                        s.name, s.alpha_true, s.snr_db, s.trials, s.sampler.m_max
                    );
                }
            } else {
                eprintln!("error: pass --list or --show <NAME>");
                return ExitCode::from(EXIT_CONFIG);
            }
            ExitCode::SUCCESS
        }
        Command::Aggregate { traces, out } => {
            let table = match harness::aggregate_dir(&traces) {
                Ok(t) => t,
                Err(e) => return fail(&e, false),
            };
            let csv = table.to_csv();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, csv) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(EXIT_RUNTIME);
                    }
                }
                None => print!("{csv}"),
            }
            ExitCode::SUCCESS
        }
    }
}
