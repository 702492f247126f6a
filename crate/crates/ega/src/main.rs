use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ega::chart::emit_chart_data;
use ega::io::{read_importance_csv, write_csv, write_dataset};
use ega::pipeline::{rank, run_experiment, write_rankings};
use ega::synth::{generate_synthetic, SynthSpec};
use ega::{EgaError, ExperimentConfig};
use ega_core::TaskKind;

/// Feature ranking for DBN autoencoders with the extended Garson algorithm.
#[derive(Parser)]
#[command(name = "ega", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full experiment and write the report.
    Run(ExperimentArgs),
    /// Compute the EGA and Wald rankings only.
    Rank(ExperimentArgs),
    /// Generate a synthetic dataset with known informative features.
    Synth(SynthArgs),
    /// Write top-k chart data from an importance CSV.
    Chart(ChartArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Classification,
    Regression,
}

#[derive(Args)]
struct SynthArgs {
    /// Generator spec (JSON); flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    informative: Option<usize>,
    #[arg(long)]
    noise: Option<usize>,
    #[arg(long, value_enum)]
    task: Option<TaskArg>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for `data.csv` and `mask.csv`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ChartArgs {
    /// Importance CSV as written by `run` or `rank`.
    #[arg(long)]
    importance: PathBuf,
    #[arg(long)]
    k: usize,
    /// Output CSV file.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Rank(a) => cmd_rank(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Chart(a) => emit_chart_from_file(&a.importance, a.k, &a.out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_config(a: &ExperimentArgs) -> Result<ExperimentConfig, EgaError> {
    let mut config = ExperimentConfig::load(&a.config)?;
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    if let Some(out) = &a.out {
        // Command-line paths are relative to the working directory.
        config.output_dir = std::path::absolute(out).map_err(|e| EgaError::io(out, e))?;
    }
    Ok(config)
}

fn cmd_run(a: &ExperimentArgs) -> Result<(), EgaError> {
    let config = load_config(a)?;
    let report = run_experiment(&config)?;
    for d in &report.decisions {
        println!("k={}: {}", d.k, d.decision.rationale);
    }
    println!("wrote {}", config.output_path().display());
    Ok(())
}

fn cmd_rank(a: &ExperimentArgs) -> Result<(), EgaError> {
    let config = load_config(a)?;
    let (prepared, artifacts) = rank(&config)?;
    write_rankings(&prepared, &artifacts, &config.output_path())?;
    println!("wrote {}", config.output_path().display());
    Ok(())
}

fn cmd_synth(a: &SynthArgs) -> Result<(), EgaError> {
    let mut spec = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| EgaError::io(p, e))?;
            serde_json::from_str(&text).map_err(|e| EgaError::Json {
                path: p.clone(),
                source: e,
            })?
        }
        None => SynthSpec {
            n_samples: 1000,
            n_informative: 3,
            n_noise: 3,
            task: TaskKind::Classification,
            seed: 0,
        },
    };
    spec.n_samples = a.samples.unwrap_or(spec.n_samples);
    spec.n_informative = a.informative.unwrap_or(spec.n_informative);
    spec.n_noise = a.noise.unwrap_or(spec.n_noise);
    spec.seed = a.seed.unwrap_or(spec.seed);
    if let Some(t) = a.task {
        spec.task = match t {
            TaskArg::Classification => TaskKind::Classification,
            TaskArg::Regression => TaskKind::Regression,
        };
    }
    let synth = generate_synthetic(&spec)?;
    std::fs::create_dir_all(&a.out).map_err(|e| EgaError::io(&a.out, e))?;
    write_dataset(&a.out.join("data.csv"), &synth.dataset)?;
    let rows: Vec<Vec<String>> = synth
        .dataset
        .feature_names()
        .into_iter()
        .zip(&synth.mask)
        .map(|(n, m)| vec![n, m.to_string()])
        .collect();
    write_csv(&a.out.join("mask.csv"), &["feature", "informative"], &rows)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn emit_chart_from_file(importance: &Path, k: usize, out: &Path) -> Result<(), EgaError> {
    let (names, imp) = read_importance_csv(importance)?;
    emit_chart_data(&names, &imp, k, out)
}
