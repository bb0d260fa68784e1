use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sim::config::SimConfig;
use crate::sim::scheduler::{run, RunSummary};
use crate::stats;

/// Consensus-time statistics over replicate seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusStats {
    pub replicates: usize,
    pub converged: usize,
    pub convergence_fraction: f64,
    /// Quartiles of time-to-consensus (micro-steps) over converged runs.
    pub q1: Option<f64>,
    pub median: Option<f64>,
    pub q3: Option<f64>,
    /// Per-seed summaries in the order of the seed list.
    pub runs: Vec<RunSummary>,
}

/// Runs `config` once per seed (in parallel) and aggregates the
/// time-to-consensus of the converged runs.
pub fn time_to_consensus(config: &SimConfig, seeds: &[u64]) -> Result<ConsensusStats> {
    if seeds.is_empty() {
        return Err(Error::Precondition("at least one replicate is required".into()));
    }
    let runs: Vec<RunSummary> = seeds
        .par_iter()
        .map(|&seed| {
            let cfg = SimConfig {
                seed,
                record_snapshots: false,
                ..config.clone()
            };
            run(&cfg).map(|(_, s)| s)
        })
        .collect::<Result<_>>()?;
    let times: Vec<f64> = runs
        .iter()
        .filter_map(|r| r.time_to_consensus.map(|t| t as f64))
        .collect();
    let q = stats::quartiles(&times);
    Ok(ConsensusStats {
        replicates: runs.len(),
        converged: times.len(),
        convergence_fraction: times.len() as f64 / runs.len() as f64,
        q1: q.map(|q| q.q1),
        median: q.map(|q| q.median),
        q3: q.map(|q| q.q3),
        runs,
    })
}
