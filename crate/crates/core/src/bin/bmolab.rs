//! Experiment runner CLI: one subcommand per task, a TOML config with
//! command-line overrides, CSV/JSON artifacts, and stable exit codes
//! (0 success, 2 config error, 3 numerical failure).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bmolab::config::{example_config, ExperimentConfig};
use bmolab::runner;

#[derive(Parser)]
#[command(
    name = "bmolab",
    about = "Numerical laboratory for Musielak-Orlicz BMO-type spaces on the discrete torus"
)]
struct Cli {
    /// Path to the TOML experiment config; a built-in default is used
    /// when omitted.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Override a config entry, e.g. --set grid.points_per_side=1024
    /// (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,

    /// Override the output directory.
    #[arg(short, long, global = true)]
    out: Option<String>,

    /// Print the effective config and exit.
    #[arg(long, global = true)]
    print_config: bool,

    #[command(subcommand)]
    task: Task,
}

#[derive(Subcommand)]
enum Task {
    /// Luxembourg norm of a single function (ad-hoc query).
    Norm,
    /// Luxembourg norms of the whole corpus.
    Norms,
    /// Muckenhoupt / reverse Holder constants, type probes, nested-ball
    /// diagnostics.
    Weights,
    /// All BMO-type seminorms over the corpus.
    Bmo,
    /// Level-set distribution curves and decay fits.
    Jn,
    /// Carleson tent norms and square functions.
    Carleson,
    /// Full equivalence ratio table across the corpus.
    Equiv,
    /// Semigroup, mass, lower-bound and decay diagnostics for the kernel.
    #[command(name = "kernel-check")]
    KernelCheck,
}

impl Task {
    fn kind(&self) -> &'static str {
        match self {
            Task::Norm => "norm",
            Task::Norms => "norms",
            Task::Weights => "weights",
            Task::Bmo => "bmo",
            Task::Jn => "jn",
            Task::Carleson => "carleson",
            Task::Equiv => "equiv",
            Task::KernelCheck => "kernel-check",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(threads) = std::env::var("BMOLAB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    let mut overrides: Vec<(String, String)> = Vec::new();
    for s in &cli.sets {
        match s.split_once('=') {
            Some((k, v)) => overrides.push((k.trim().to_string(), v.trim().to_string())),
            None => {
                eprintln!("config error: --set expects KEY=VALUE, got {s}");
                return ExitCode::from(2);
            }
        }
    }
    overrides.push((
        "task.kind".to_string(),
        format!("\"{}\"", cli.task.kind()),
    ));
    if let Some(out) = &cli.out {
        overrides.push(("output.directory".to_string(), format!("\"{out}\"")));
    }

    let config = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path, &overrides),
        None => ExperimentConfig::from_toml_str(example_config(), &overrides),
    };
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };

    if cli.print_config {
        match toml::to_string_pretty(&config) {
            Ok(text) => {
                println!("{text}");
                return ExitCode::SUCCESS;
            }
            Err(e) => {
                eprintln!("config error: {e}");
                return ExitCode::from(2);
            }
        }
    }

    match runner::run(&config) {
        Ok(output) => {
            println!(
                "{}",
                serde_json::json!({
                    "task": config.task.kind,
                    "config_hash": config.hash(),
                    "files": output.files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
                    "summary": output.summary,
                })
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(runner::exit_code_for(&e) as u8)
        }
    }
}
