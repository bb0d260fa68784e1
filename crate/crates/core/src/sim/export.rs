use std::io::Write;

use crate::error::Result;
use crate::output::{fmt_opt, CsvHeader};
use crate::sim::config::{SimConfig, KEYS};
use crate::sim::scheduler::{RunSummary, Trajectory};

/// Long-format opinions: `step, agent_id, opinion`. The article is written
/// as an extra row per step with `agent_id = article`.
pub fn write_trajectory<W: Write>(out: W, header: &CsvHeader, traj: &Trajectory) -> Result<()> {
    let mut w = header.writer(out)?;
    w.write_record(["step", "agent_id", "opinion"])?;
    for snap in &traj.snapshots {
        let step = snap.step.to_string();
        for (id, op) in &snap.opinions {
            w.write_record([step.as_str(), &id.to_string(), &op.to_string()])?;
        }
        w.write_record([step.as_str(), "article", &snap.article.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Article edits per window: `step_window` is the first micro-step of
/// the window.
pub fn write_windows<W: Write>(out: W, header: &CsvHeader, traj: &Trajectory) -> Result<()> {
    let mut w = header.writer(out)?;
    w.write_record(["step_window", "edits"])?;
    for (i, edits) in traj.edit_counts.iter().enumerate() {
        let start = traj.window_start + i as u64 * traj.window_len;
        w.write_record([start.to_string(), edits.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

const OUTCOME_COLUMNS: &[&str] = &[
    "phase",
    "time_to_consensus",
    "time_to_consensus_sweeps",
    "total_edits",
    "final_cluster_count",
    "steps_run",
    "warmup_end",
    "initial_mean",
    "final_mean",
    "article_opinion",
];

/// One row per run: every resolved configuration field, then outcomes.
pub fn write_summaries<W: Write>(
    out: W,
    header: &CsvHeader,
    runs: &[(SimConfig, RunSummary)],
) -> Result<()> {
    let mut w = header.writer(out)?;
    w.write_record(KEYS.iter().chain(OUTCOME_COLUMNS))?;
    for (cfg, s) in runs {
        let mut row: Vec<String> = cfg.resolved_pairs().into_iter().map(|(_, v)| v).collect();
        let sweeps = s
            .time_to_consensus
            .map(|t| t as f64 / cfg.n_agents as f64);
        row.extend([
            s.phase.to_string(),
            fmt_opt(s.time_to_consensus),
            fmt_opt(sweeps),
            s.total_edits.to_string(),
            s.final_cluster_count.to_string(),
            s.steps_run.to_string(),
            s.warmup_end.to_string(),
            s.initial_mean.to_string(),
            s.final_mean.to_string(),
            s.article_opinion.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
