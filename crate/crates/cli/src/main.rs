use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use dahsim::config::{Experiment, ExperimentConfig};
use dahsim::error::{HarnessError, Result};
use dahsim::experiments;
use dahsim::output::write_meta;
use dahsim_core::par::ExecPolicy;

#[derive(Parser)]
#[command(name = "dahsim", version, about = "Digital-analog spin-chain experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Adiabatic cluster-state preparation on an open chain.
    ClusterField(RunArgs),
    /// Cluster-state preparation followed by stitching into a ring.
    Stitch(RunArgs),
    /// Stabilizer correlators of the cluster-Ising chain.
    ClusterIsing(RunArgs),
    /// Four-spin ring with a four-body interaction.
    FourBody(RunArgs),
    /// Prethermal edge-mode lifetimes versus the NNN coupling.
    ZmLifetime(RunArgs),
    /// Z- versus X-bulk sampling error of the edge autocorrelator.
    SamplingVariance(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML or JSON config; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn load(args: &RunArgs, experiment: Experiment) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::new(experiment),
    };
    if let Some(s) = args.seed {
        cfg.seed = Some(s);
    }
    let cfg = cfg.resolve(experiment)?;
    Ok(cfg)
}

#[cfg(feature = "parallel")]
fn setup_threads(threads: usize) -> Result<(usize, ExecPolicy)> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads);
    pool.build_global().map_err(|e| HarnessError::config("threads", e.to_string()))?;
    Ok((rayon::current_num_threads(), ExecPolicy::Parallel))
}

#[cfg(not(feature = "parallel"))]
fn setup_threads(_threads: usize) -> Result<(usize, ExecPolicy)> {
    Ok((1, ExecPolicy::Sequential))
}

fn execute(args: &RunArgs, experiment: Experiment) -> Result<PathBuf> {
    let cfg = load(args, experiment)?;
    let (threads, policy) = setup_threads(args.threads)?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(|p| cfg.base_dir.join(p)))
        .unwrap_or_else(|| Path::new("out").join(experiment.file_stem()));
    std::fs::create_dir_all(&out)?;
    let start = Instant::now();
    let (tables, notes) = experiments::run(&cfg, policy)?;
    let wall = start.elapsed();
    for t in &tables {
        t.write(&out)?;
    }
    std::fs::write(out.join("config.json"), serde_json::to_string_pretty(&cfg)?)?;
    write_meta(&out, experiment.file_stem(), &cfg, cfg.seed(), threads, wall, &tables, &notes)?;
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, experiment) = match &cli.command {
        Command::ClusterField(a) => (a, Experiment::ClusterField),
        Command::Stitch(a) => (a, Experiment::Stitch),
        Command::ClusterIsing(a) => (a, Experiment::ClusterIsing),
        Command::FourBody(a) => (a, Experiment::FourBody),
        Command::ZmLifetime(a) => (a, Experiment::ZmLifetime),
        Command::SamplingVariance(a) => (a, Experiment::SamplingVariance),
    };
    match execute(args, experiment) {
        Ok(out) => {
            eprintln!("wrote {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dahsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
