use std::path::PathBuf;
use std::process::ExitCode;

use atlab_core::lab::{self, ExperimentConfig, OUT_DIR_ENV};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "atlab", version, about = "Numerical lab for alpha-time processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the experiment catalog.
    List {
        /// Emit the catalog as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run one experiment and write `<id>.json` and `<id>.csv`.
    Run {
        #[arg(long)]
        experiment: String,
        /// Flat TOML config; omitted keys take the experiment defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory [default: $ATLAB_OUT_DIR, else ./atlab-out].
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List { json } => {
            if json {
                println!("{}", serde_json::to_string_pretty(lab::list_experiments()).expect("static data"));
            } else {
                for e in lab::list_experiments() {
                    println!("{:<10} {}  [{}]", e.id, e.description, e.anchor);
                }
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            experiment,
            config,
            seed,
            workers,
            out,
        } => run(experiment, config, seed, workers, out),
    }
}

fn run(
    experiment: String,
    config: Option<PathBuf>,
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
) -> ExitCode {
    let mut cfg = match config {
        Some(path) => match ExperimentConfig::from_file(&path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::default(),
    };
    if !cfg.experiment.is_empty() && cfg.experiment != experiment {
        eprintln!(
            "error: config names experiment `{}` but --experiment is `{experiment}`",
            cfg.experiment
        );
        return ExitCode::from(2);
    }
    cfg.experiment = experiment;
    cfg.seed = seed.or(cfg.seed);
    cfg.workers = workers.or(cfg.workers);
    cfg.out_dir = out.or(cfg.out_dir);
    if cfg.out_dir.is_none() && std::env::var_os(OUT_DIR_ENV).is_none() {
        eprintln!("note: writing to ./atlab-out (set --out or {OUT_DIR_ENV})");
    }

    match lab::run_experiment(&cfg) {
        Ok((report, json, csv)) => {
            for line in report.summary_lines() {
                println!("{line}");
            }
            println!("report: {}", json.display());
            println!("records: {}", csv.display());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, atlab_core::Error::UnknownExperiment { .. }) {
                eprintln!("run `atlab list` for the catalog");
            }
            ExitCode::from(2)
        }
    }
}
