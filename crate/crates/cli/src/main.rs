use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use composite_coherence::experiments::{self, ExperimentConfig, ExperimentError};
use composite_coherence::simulator::SimulationConfig;
use composite_coherence::{Graph, StubbornnessProfile};

#[derive(Parser)]
#[command(name = "netcoh", version, about = "Coherence analysis and edge selection for composite networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coherence, total resistance and resistance centralities of a graph.
    Coherence {
        #[command(flatten)]
        input: GraphInput,
    },
    /// Mean H_S after k greedy edges, between versus within two subgraphs.
    BetweenVsWithin(ExperimentArgs),
    /// Ratio of greedy to exhaustive-optimal H_S for small instances.
    GreedyVsOptimal(ExperimentArgs),
    /// Reproduce the seven-node worked example and its edge-selection table.
    WorkedExample {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower and upper coherence bounds for n subgraphs of m nodes.
    Bounds {
        #[arg(short, long)]
        n: usize,
        #[arg(short, long)]
        m: usize,
        /// Random composites checked against the bounds.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate H_C (or H_S with --profile) by Euler-Maruyama simulation.
    Simulate {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        burn_in: Option<f64>,
        #[arg(long)]
        sample_time: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GraphInput {
    /// Edge-list file (`nodes N` header, then `u v` per line).
    #[arg(required_unless_present = "composite", conflicts_with = "composite")]
    graph: Option<PathBuf>,
    /// Composite description (subgraphs, bridges, connecting edges).
    #[arg(long)]
    composite: Option<PathBuf>,
    /// Stubbornness profile; adds H_S to the report.
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// identity, random, or both.
    #[arg(long)]
    d_mode: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    er_p: Option<f64>,
}

impl ExperimentArgs {
    /// Defaults, then the config file, then flags.
    fn resolve(&self, base: ExperimentConfig) -> Result<ExperimentConfig, ExperimentError> {
        let name = base.experiment.clone();
        let mut cfg = match &self.config {
            Some(path) => experiments::load_config(path, base)?,
            None => base,
        };
        if cfg.experiment != name {
            return Err(ExperimentError::Config {
                line: 0,
                message: format!("config is for `{}`, not `{name}`", cfg.experiment),
            });
        }
        let flags = [
            ("seed", self.seed.map(|v| v.to_string())),
            ("d-mode", self.d_mode.clone()),
            ("trials", self.trials.map(|v| v.to_string())),
            ("k-max", self.k_max.map(|v| v.to_string())),
            ("er-p", self.er_p.map(|v| v.to_string())),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                cfg.set(key, &value).map_err(|message| ExperimentError::Config { line: 0, message })?;
            }
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_input(input: &GraphInput) -> Result<(Graph, Option<StubbornnessProfile>), ExperimentError> {
    let graph = match (&input.graph, &input.composite) {
        (Some(path), _) => experiments::load_graph(path)?,
        (None, Some(path)) => composite_coherence::assemble(&experiments::load_composite(path)?)?.graph,
        (None, None) => unreachable!("clap requires one input"),
    };
    let profile = input.profile.as_deref().map(experiments::load_profile).transpose()?;
    Ok((graph, profile))
}

/// Writes CSV to `out/name` when an output directory is given, else stdout.
fn emit_csv(out: Option<&Path>, name: &str, csv: &str) -> Result<(), ExperimentError> {
    match out {
        Some(dir) => {
            experiments::write_output(dir, name, csv)?;
            log::info!("wrote {}", dir.join(name).display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::Coherence { input } => {
            let report = match &input.composite {
                Some(path) => {
                    let spec = experiments::load_composite(path)?;
                    let profile = input.profile.as_deref().map(experiments::load_profile).transpose()?;
                    experiments::cmd_coherence_composite(&spec, profile.as_ref())?
                }
                None => {
                    let (g, profile) = load_input(&input)?;
                    experiments::cmd_coherence(&g, profile.as_ref())?
                }
            };
            print!("{report}");
        }
        Command::BetweenVsWithin(args) => {
            let cfg = args.resolve(ExperimentConfig::between_vs_within())?;
            let report = experiments::cmd_between_vs_within(&cfg)?;
            for mode in &cfg.d_modes {
                let violations = report.rows_for(*mode).filter(|r| r.mean_between > r.mean_within).count();
                log::info!("{mode}: between curve above within curve at {violations} of {} k", cfg.k_max + 1);
            }
            emit_csv(cfg.out.as_deref(), "between_vs_within.csv", &report.to_csv())?;
        }
        Command::GreedyVsOptimal(args) => {
            let cfg = args.resolve(ExperimentConfig::greedy_vs_optimal())?;
            let report = experiments::cmd_greedy_vs_optimal(&cfg)?;
            if !report.skipped.is_empty() {
                log::warn!("{} (trial, k) pairs skipped over the enumeration budget", report.skipped.len());
            }
            emit_csv(cfg.out.as_deref(), "greedy_vs_optimal.csv", &report.to_csv())?;
        }
        Command::WorkedExample { out } => {
            let report = experiments::cmd_worked_example()?;
            print!("{report}");
            if let Some(dir) = out {
                emit_csv(Some(&dir), "worked_example.csv", &report.table_csv())?;
            }
        }
        Command::Bounds { n, m, samples, seed } => {
            print!("{}", experiments::cmd_bounds(n, m, samples, seed)?);
        }
        Command::Simulate { input, dt, burn_in, sample_time, trials, seed, out } => {
            let (g, profile) = load_input(&input)?;
            let defaults = SimulationConfig::default();
            let cfg = SimulationConfig {
                time_step: dt,
                burn_in_time: burn_in,
                sample_time,
                trial_count: trials.unwrap_or(defaults.trial_count),
                rng_seed: seed,
                ..defaults
            };
            let report = experiments::cmd_simulate(&g, profile.as_ref(), &cfg)?;
            print!("{report}");
            if let Some(dir) = out {
                emit_csv(Some(&dir), "simulate.csv", &report.to_csv())?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
