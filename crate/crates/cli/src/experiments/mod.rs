pub mod cluster_field;
pub mod cluster_ising;
pub mod four_body;
pub mod zero_mode;

use dahsim_core::par::ExecPolicy;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::Result;
use crate::output::Table;

/// Runs a resolved config. Returns the tables and notes for the metadata.
pub fn run(cfg: &ExperimentConfig, policy: ExecPolicy) -> Result<(Vec<Table>, Vec<String>)> {
    let mut notes = Vec::new();
    let tables = match cfg.experiment() {
        Experiment::ClusterField => cluster_field::run_cluster_field(cfg)?,
        Experiment::Stitch => cluster_field::run_stitch(cfg)?,
        Experiment::ClusterIsing => {
            let (tables, source) = cluster_ising::run_cluster_ising(cfg, policy)?;
            notes.push(format!("coupling matrix source: {source}"));
            if cfg.l() < 12 {
                notes.push(format!("scaled down: L = {} (hardware chain has 12 ions)", cfg.l()));
            }
            notes.push(format!(
                "scaled down: S = {} sampled initial states per g/J",
                cfg.sampling.samples.unwrap_or(50)
            ));
            tables
        }
        Experiment::FourBody => four_body::run_four_body(cfg)?,
        Experiment::ZmLifetime => {
            notes.push(format!("scaled down: L = {} for the lifetime sweep", cfg.l()));
            zero_mode::run_zm_lifetime(cfg, policy)?
        }
        Experiment::SamplingVariance => zero_mode::run_sampling_variance(cfg, policy)?,
    };
    Ok((tables, notes))
}
