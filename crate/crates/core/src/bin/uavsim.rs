use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context as _};
use clap::{Args, Parser, Subcommand};

use uavsim_core::experiment::{self, SweepAxis};
use uavsim_core::output;
use uavsim_core::{run_episode, Algorithm, SimConfig};

#[derive(Debug, Parser)]
#[command(name = "uavsim", version, about = "UAV base station placement simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a single episode and write its time series.
    Run(Common),
    /// Run one configuration over several seeds and aggregate.
    Replicate(Common),
    /// Replicate over a range of user or UAV counts for several algorithms.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Quantity to vary.
        #[arg(long, default_value = "users")]
        axis: SweepAxis,
        /// Comma-separated axis values, e.g. `30,60,90`.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
        /// Comma-separated algorithms; defaults to all four.
        #[arg(long, value_delimiter = ',')]
        algos: Vec<Algorithm>,
    },
    /// Print the fully resolved default configuration.
    Config,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for `run` (defaults to the first configured seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated seeds for `replicate` and `sweep`.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long)]
    algo: Option<Algorithm>,
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    uavs: Option<usize>,
    #[arg(long)]
    steps: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn resolve(&self) -> anyhow::Result<SimConfig> {
        let mut cfg = match &self.config {
            Some(path) => SimConfig::from_file(path)?,
            None => SimConfig::default(),
        };
        if let Some(a) = self.algo {
            cfg.run.algorithm = a;
        }
        if let Some(n) = self.users {
            cfg.scenario.n_users = n;
        }
        if let Some(n) = self.uavs {
            cfg.scenario.n_uavs = n;
            if cfg.mobility.initial_positions.as_ref().is_some_and(|p| p.len() != n) {
                cfg.mobility.initial_positions = None;
            }
        }
        if let Some(t) = self.steps {
            cfg.run.steps = t;
        }
        if !self.seeds.is_empty() {
            cfg.run.seeds = self.seeds.clone();
        }
        if let Some(s) = self.seed {
            cfg.run.seeds = vec![s];
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(common) => {
            let cfg = common.resolve()?;
            let seed = cfg.run.seeds[0];
            let result = run_episode(&cfg, seed)?;
            output::write_run(&common.out, &cfg, &result)
                .with_context(|| format!("writing results to {}", common.out.display()))?;
            let s = &result.summary;
            println!(
                "{} seed={} throughput_per_bs={:.0} rate_per_user={:.0} dropped_per_bs={:.3} equilibrium_at={}",
                result.algorithm,
                seed,
                s.mean_throughput_per_bs,
                s.mean_rate_per_user,
                s.mean_dropped_per_bs,
                result.equilibrium_at.map_or("-".to_string(), |t| t.to_string()),
            );
        }
        Command::Replicate(common) => {
            let cfg = common.resolve()?;
            let summary = experiment::run_replications(&cfg, &cfg.run.seeds)?;
            fs::create_dir_all(&common.out)?;
            output::write_json(&summary, fs::File::create(common.out.join(output::SUMMARY_FILE))?)?;
            output::write_manifest(&common.out, &cfg, "replicate", &cfg.run.seeds)?;
            for (metric, stat) in &summary.aggregate {
                println!("{metric:>24} mean={:.6} std={:.6} n={}", stat.mean, stat.std, stat.n);
            }
        }
        Command::Sweep { common, axis, values, algos } => {
            let cfg = common.resolve()?;
            let algos = if algos.is_empty() { Algorithm::ALL.to_vec() } else { algos };
            if values.is_empty() {
                bail!("--values must not be empty");
            }
            let cells = experiment::sweep(&cfg, axis, &values, &algos)?;
            let rows = experiment::long_format(&cells);
            fs::create_dir_all(&common.out)?;
            output::write_sweep(&rows, fs::File::create(common.out.join(output::SWEEP_FILE))?)?;
            output::write_manifest(&common.out, &cfg, "sweep", &cfg.run.seeds)?;
            for cell in &cells {
                let st = |m: &str| cell.summary.stat(m).map_or(f64::NAN, |s| s.mean);
                println!(
                    "{:>12} {}={:<4} throughput_per_bs={:>12.0} rate_per_user={:>12.0} dropped_per_bs={:.3}",
                    cell.algorithm,
                    axis,
                    cell.value,
                    st("mean_throughput_per_bs"),
                    st("mean_rate_per_user"),
                    st("mean_dropped_per_bs"),
                );
            }
        }
        Command::Config => {
            print!("{}", SimConfig::default().to_toml_string());
        }
    }
    Ok(())
}
