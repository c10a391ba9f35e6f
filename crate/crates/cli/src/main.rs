//! `msd`: batch front end for clip curation, keyframe sampling, motion
//! synergetic decoding, caption scoring and the disagreement simulator.
//!
//! Exit codes: 0 on success, 1 when data or configuration violates an
//! invariant, 2 on I/O, parse or schema errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use msd_core::msd::ScoreMode;
use msd_core::sim::ScenarioSpec;

use commands::{DecodeOptions, ScoreInputs, Status};
use config::CliConfig;
use output::Sink;

#[derive(Parser)]
#[command(name = "msd", version, about = "Pose curation, keyframes, synergy decoding and caption metrics")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML file with [filter], [synergy], [decode] and [metrics] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Omit run metadata so reruns are byte-identical.
    #[arg(long, global = true)]
    canonical: bool,
    /// Write here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScoreModeArg {
    Basic,
    Five,
}

#[derive(Subcommand)]
enum Command {
    /// Split pose tracks into segments and write a quality manifest.
    Filter {
        inputs: Vec<PathBuf>,
        /// JSONL of {"source_id", "caption"} for the keyword gate.
        #[arg(long)]
        captions: Option<PathBuf>,
        /// Movement threshold in bbox-normalized units.
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Pick one keyframe per second of each pose track.
    Keyframes { inputs: Vec<PathBuf> },
    /// Decode a dual-pathway logit stream.
    Decode {
        input: PathBuf,
        #[arg(long, value_enum)]
        score_mode: Option<ScoreModeArg>,
        /// Emit the visual-only greedy baseline instead.
        #[arg(long)]
        no_msd: bool,
        /// Sample with this seed instead of taking the argmax.
        #[arg(long)]
        sample_seed: Option<u64>,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        stop_token: Option<String>,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Caption metrics, judge aggregates and True/False metrics.
    #[command(group = clap::ArgGroup::new("inputs").required(true).multiple(true))]
    Score {
        #[arg(long, group = "inputs")]
        captions: Option<PathBuf>,
        #[arg(long, group = "inputs")]
        judge: Option<PathBuf>,
        #[arg(long, group = "inputs")]
        qa: Option<PathBuf>,
    },
    /// Compare visual-only and synergy decoding on synthetic disagreement.
    Simulate {
        #[arg(long, default_value_t = 32)]
        vocab_size: usize,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        visual_margin: f64,
        #[arg(long, default_value_t = 3.0)]
        motion_margin: f64,
        #[arg(long, default_value_t = 0.0)]
        noise_sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
    },
}

fn run(cli: Cli) -> Result<Status> {
    let mut cfg = CliConfig::load(cli.common.config.as_deref())?;
    match &cli.command {
        Command::Filter { tau: Some(tau), .. } => cfg.filter.movement_threshold_tau = *tau,
        Command::Decode { score_mode, sample_seed, max_steps, stop_token, beta, .. } => {
            if let Some(m) = score_mode {
                cfg.decode.score_mode = match m {
                    ScoreModeArg::Basic => ScoreMode::Basic,
                    ScoreModeArg::Five => ScoreMode::FiveComponent,
                };
            }
            cfg.decode.sample_seed = sample_seed.or(cfg.decode.sample_seed);
            cfg.decode.max_steps = max_steps.or(cfg.decode.max_steps);
            cfg.decode.stop_token = stop_token.clone().or(cfg.decode.stop_token.take());
            cfg.synergy.beta = beta.unwrap_or(cfg.synergy.beta);
        }
        _ => {}
    }
    cfg.validate()?;

    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.common.jobs).build()?;
    let mut sink = Sink::open(cli.common.output.as_deref())?;
    let canonical = cli.common.canonical;
    let status = pool.install(|| match &cli.command {
        Command::Filter { inputs, captions, .. } => commands::filter(inputs, captions.as_deref(), &cfg, &mut sink),
        Command::Keyframes { inputs } => commands::keyframes(inputs, &mut sink),
        Command::Decode { input, no_msd, .. } => {
            commands::decode(input, &cfg, &DecodeOptions { no_msd: *no_msd }, &mut sink)
        }
        Command::Score { captions, judge, qa } => {
            let inputs = ScoreInputs { captions: captions.as_deref(), judge: judge.as_deref(), qa: qa.as_deref() };
            commands::score(&inputs, &cfg, canonical, &mut sink)
        }
        Command::Simulate { vocab_size, steps, visual_margin, motion_margin, noise_sigma, seed, trials } => {
            let spec = ScenarioSpec::rotating(*vocab_size, *steps, *visual_margin, *motion_margin, *noise_sigma, *seed);
            commands::simulate(spec, *trials, &cfg, canonical, &mut sink)
        }
    })?;
    sink.finish()?;
    Ok(status)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
