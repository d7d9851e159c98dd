use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use ccs_core::harness::{run_experiment, AlgorithmKind, ExperimentConfig};
use clap::{Args, Parser, Subcommand};

/// Top-m subcarrier identification experiments.
#[derive(Debug, Parser)]
#[command(name = "bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write results.csv and summary.json.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    /// ccs, lingape, linugape, lingifa or all.
    #[arg(long, value_parser = parse_algo)]
    algo: Option<Selection>,
    /// Number of subcarriers (arms).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    challenger_size: Option<usize>,
    /// Base seed; trial t uses seed + t.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone)]
struct Selection(Vec<AlgorithmKind>);

fn parse_algo(s: &str) -> Result<Selection, String> {
    AlgorithmKind::parse_selection(s)
        .map(Selection)
        .map_err(|e| e.to_string())
}

impl RunArgs {
    fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        let mut config = ExperimentConfig::load(&self.config)
            .with_context(|| format!("reading config {}", self.config.display()))?;
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        if let Some(trials) = self.trials {
            config.trials = trials;
        }
        if let Some(Selection(algos)) = &self.algo {
            config.algorithms = algos.clone();
        }
        if let Some(k) = self.k {
            config.channel.num_tones = k;
        }
        if let Some(size) = self.challenger_size {
            config.challenger_size = size;
        }
        if let Some(seed) = self.seed {
            config.seed_base = seed;
        }
        config.validate()?;
        Ok(config)
    }
}

fn run(args: &RunArgs) -> anyhow::Result<()> {
    let config = args.resolve()?;
    log::info!(
        "K={} m={} d={} challenger_size={} trials={} algorithms={:?}",
        config.num_arms(),
        config.m,
        config.d,
        config.challenger_size,
        config.trials,
        config.algorithms
    );
    let out = run_experiment(&config)?;
    for g in &out.stats.groups {
        let fmt = |s: Option<ccs_core::harness::MeanStd>| {
            s.map_or("n/a".to_string(), |s| {
                format!("{:.1} ± {:.1}", s.mean, s.std)
            })
        };
        println!(
            "{:<9} K={:<4} comparisons {:>24}  pulls {:>16}  wall ms {:>16}  correct {:.2}  unconverged {}",
            g.algo.name(),
            g.num_arms,
            fmt(g.comparisons),
            fmt(g.pulls),
            fmt(g.wall_time_ms),
            g.correctness,
            g.non_converged
        );
    }
    println!("results: {}", out.results_path.display());
    println!("summary: {}", out.summary_path.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
