//! Parameter-grid experiments with replication.
//!
//! A grid is the Cartesian product of two parameter axes times a number of
//! replicates. Each task is seeded with `mix(seed_base, [i1, i2, rep])`
//! (see [`crate::seed::mix`]) so any task can be rerun in isolation and the
//! output does not depend on scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::output::{fmt_opt, CsvHeader};
use crate::seed::mix;
use crate::sim::{run, PhaseLabel, SimConfig};
use crate::stats;

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<String>,
}

impl Axis {
    pub fn new<S: ToString>(name: &str, values: &[S]) -> Self {
        Axis {
            name: name.to_string(),
            values: values.iter().map(ToString::to_string).collect(),
        }
    }

    /// Parses `name=v1,v2,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, values) = spec
            .split_once('=')
            .ok_or_else(|| Error::Precondition(format!("axis `{spec}` must look like name=v1,v2")))?;
        let values: Vec<String> = values
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        Ok(Axis {
            name: name.trim().to_string(),
            values,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axis1: Axis,
    pub axis2: Axis,
    pub base: SimConfig,
    pub replicates: usize,
    pub seed_base: u64,
}

impl GridSpec {
    /// Tolerance-for-the-article against renewal rate at fixed N.
    pub fn eps_a_by_renewal(base: SimConfig, replicates: usize) -> Self {
        let eps_a: Vec<String> = (1..=10).map(|i| format!("{}", i as f64 * 0.05)).collect();
        GridSpec {
            axis1: Axis::new("eps_a", &eps_a),
            axis2: Axis::new("renewal_p", &["0", "0.005", "0.01", "0.015", "0.02"]),
            seed_base: base.seed,
            base,
            replicates,
        }
    }

    /// Editor-pool size against renewal rate.
    pub fn n_by_renewal(base: SimConfig, replicates: usize) -> Self {
        GridSpec {
            axis1: Axis::new("n_agents", &["25", "50", "100", "200"]),
            axis2: Axis::new("renewal_p", &["0", "0.005", "0.01", "0.015", "0.02"]),
            seed_base: base.seed,
            base,
            replicates,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Precondition("replicates must be positive".into()));
        }
        for axis in [&self.axis1, &self.axis2] {
            if !SimConfig::is_key(&axis.name) || axis.name == "seed" {
                return Err(Error::UnknownKey(axis.name.clone()));
            }
            if axis.values.is_empty() {
                return Err(Error::Precondition(format!("axis `{}` has no values", axis.name)));
            }
        }
        if self.axis1.name == self.axis2.name {
            return Err(Error::Precondition(format!(
                "axis names must differ (both `{}`)",
                self.axis1.name
            )));
        }
        Ok(())
    }
}

/// One unit of sweep work.
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub config: SimConfig,
    pub i1: usize,
    pub i2: usize,
    pub replicate: usize,
    pub seed: u64,
}

/// Expands the grid into tasks ordered by (cell, replicate).
pub fn build_grid(spec: &GridSpec) -> Result<Vec<Task>> {
    spec.validate()?;
    let mut tasks = Vec::with_capacity(spec.axis1.values.len() * spec.axis2.values.len() * spec.replicates);
    for (i1, v1) in spec.axis1.values.iter().enumerate() {
        for (i2, v2) in spec.axis2.values.iter().enumerate() {
            let mut cell = spec.base.clone();
            cell.set(&spec.axis1.name, v1)?;
            cell.set(&spec.axis2.name, v2)?;
            cell.record_snapshots = false;
            cell.validate()?;
            for replicate in 0..spec.replicates {
                let seed = mix(spec.seed_base, &[i1 as u64, i2 as u64, replicate as u64]);
                tasks.push(Task {
                    config: SimConfig {
                        seed,
                        ..cell.clone()
                    },
                    i1,
                    i2,
                    replicate,
                    seed,
                });
            }
        }
    }
    Ok(tasks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub i1: usize,
    pub i2: usize,
    pub axis1_value: String,
    pub axis2_value: String,
    pub replicate: usize,
    pub seed: u64,
    pub phase: Option<PhaseLabel>,
    pub time_to_consensus: Option<u64>,
    pub total_edits: u64,
    pub fail_reason: Option<String>,
}

fn execute(spec: &GridSpec, task: &Task) -> SweepRecord {
    let mut rec = SweepRecord {
        i1: task.i1,
        i2: task.i2,
        axis1_value: spec.axis1.values[task.i1].clone(),
        axis2_value: spec.axis2.values[task.i2].clone(),
        replicate: task.replicate,
        seed: task.seed,
        phase: None,
        time_to_consensus: None,
        total_edits: 0,
        fail_reason: None,
    };
    match run(&task.config) {
        Ok((_, summary)) => {
            rec.phase = Some(summary.phase);
            rec.time_to_consensus = summary.time_to_consensus;
            rec.total_edits = summary.total_edits;
        }
        Err(e) => rec.fail_reason = Some(e.to_string()),
    }
    rec
}

/// Runs every task on up to `workers` threads (0 = all cores). Failed runs
/// become records with a reason; output is sorted by (cell, replicate).
pub fn run_sweep(spec: &GridSpec, workers: usize) -> Result<Vec<SweepRecord>> {
    let tasks = build_grid(spec)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
    let mut records: Vec<SweepRecord> =
        pool.install(|| tasks.par_iter().map(|t| execute(spec, t)).collect());
    records.sort_by_key(|r| (r.i1, r.i2, r.replicate));
    Ok(records)
}

/// Majority phase and consensus statistics of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub axis1_value: String,
    pub axis2_value: String,
    pub majority_phase: PhaseLabel,
    pub consensus_fraction: f64,
    pub median_ttc: Option<f64>,
    pub replicates: usize,
    pub failed: usize,
}

/// Majority vote over replicates per cell; ties go to the more severe
/// phase (War > Cyclic > Consensus). Failed records do not vote.
///
/// The grid is the set of distinct axis values seen in `records`; every
/// combination must be present.
pub fn aggregate_phase_diagram(records: &[SweepRecord]) -> Result<Vec<CellSummary>> {
    if records.is_empty() {
        return Err(Error::Precondition("no sweep records to aggregate".into()));
    }
    let mut rows: BTreeMap<usize, &str> = BTreeMap::new();
    let mut cols: BTreeMap<usize, &str> = BTreeMap::new();
    let mut cells: BTreeMap<(usize, usize), Vec<&SweepRecord>> = BTreeMap::new();
    for r in records {
        rows.insert(r.i1, &r.axis1_value);
        cols.insert(r.i2, &r.axis2_value);
        cells.entry((r.i1, r.i2)).or_default().push(r);
    }
    let missing: Vec<String> = rows
        .iter()
        .flat_map(|(&i1, v1)| cols.iter().map(move |(&i2, v2)| (i1, i2, *v1, *v2)))
        .filter(|(i1, i2, _, _)| !cells.contains_key(&(*i1, *i2)))
        .map(|(_, _, v1, v2)| format!("({v1}, {v2})"))
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingCells(missing.join(", ")));
    }

    let mut out = Vec::with_capacity(cells.len());
    for ((_, _), recs) in cells {
        let mut votes: BTreeMap<PhaseLabel, usize> = BTreeMap::new();
        let mut ttc = Vec::new();
        let mut failed = 0;
        for r in &recs {
            match r.phase {
                Some(p) => *votes.entry(p).or_default() += 1,
                None => failed += 1,
            }
            if let Some(t) = r.time_to_consensus {
                ttc.push(t as f64);
            }
        }
        let voters = recs.len() - failed;
        let majority_phase = votes
            .iter()
            .max_by_key(|(p, n)| (**n, p.severity()))
            .map(|(p, _)| *p)
            .ok_or_else(|| {
                Error::Precondition(format!(
                    "every replicate failed in cell ({}, {})",
                    recs[0].axis1_value, recs[0].axis2_value
                ))
            })?;
        let consensus = votes.get(&PhaseLabel::Consensus).copied().unwrap_or(0);
        out.push(CellSummary {
            axis1_value: recs[0].axis1_value.clone(),
            axis2_value: recs[0].axis2_value.clone(),
            majority_phase,
            consensus_fraction: consensus as f64 / voters as f64,
            median_ttc: stats::median(&ttc),
            replicates: recs.len(),
            failed,
        });
    }
    Ok(out)
}

pub fn write_records<W: Write>(
    out: W,
    header: &CsvHeader,
    spec: &GridSpec,
    records: &[SweepRecord],
) -> Result<()> {
    let mut w = header.writer(out)?;
    w.write_record([
        "axis1_name",
        "axis1_value",
        "axis2_name",
        "axis2_value",
        "replicate",
        "seed",
        "phase",
        "time_to_consensus",
        "total_edits",
        "failed",
        "fail_reason",
    ])?;
    for r in records {
        w.write_record([
            spec.axis1.name.clone(),
            r.axis1_value.clone(),
            spec.axis2.name.clone(),
            r.axis2_value.clone(),
            r.replicate.to_string(),
            r.seed.to_string(),
            r.phase.map(|p| p.to_string()).unwrap_or_default(),
            fmt_opt(r.time_to_consensus),
            r.total_edits.to_string(),
            u8::from(r.fail_reason.is_some()).to_string(),
            r.fail_reason.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregate<W: Write>(
    out: W,
    header: &CsvHeader,
    spec: &GridSpec,
    cells: &[CellSummary],
) -> Result<()> {
    let mut w = header.writer(out)?;
    w.write_record([
        spec.axis1.name.as_str(),
        spec.axis2.name.as_str(),
        "majority_phase",
        "consensus_fraction",
        "median_ttc",
    ])?;
    for c in cells {
        w.write_record([
            c.axis1_value.clone(),
            c.axis2_value.clone(),
            c.majority_phase.to_string(),
            c.consensus_fraction.to_string(),
            fmt_opt(c.median_ttc),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Distinct values of one axis present in `records`, in grid order.
pub fn axis_values(records: &[SweepRecord], first: bool) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for r in records {
        let (idx, v) = if first {
            (r.i1, &r.axis1_value)
        } else {
            (r.i2, &r.axis2_value)
        };
        if seen.insert(idx) {
            out.push(v.clone());
        }
    }
    out
}
