use std::io::Write;
use std::sync::Arc;

use crate::error::Result;
use crate::motifs::class::MotifClass;
use crate::motifs::enumerate::{max_serial_run, tally, MotifInstance, MotifOptions, Prepared};
use crate::motifs::null::{null_ensemble, ArticleShuffle, NullModel};
use crate::motifs::stats::{pace_stats, prevalence_zscores, structure_stats, ExperienceIndex, Pace, ZScore};
use crate::output::{fmt_opt, CsvHeader};
use crate::revisions::{RevertEvent, RevisionRecord};
use crate::stats::{mean, Quartiles};

pub const REPORT_COLUMNS: [&str; 13] = [
    "class",
    "observed",
    "null_mean",
    "null_sd",
    "z",
    "obs_median_dt",
    "null_median_dt",
    "pace_ratio",
    "delta_median",
    "delta_q1",
    "delta_q3",
    "window_seconds",
    "n_shuffles",
];

#[derive(Clone)]
pub struct AnalysisOptions {
    pub motif: MotifOptions,
    pub n_shuffles: usize,
    pub seed: u64,
    pub null_model: Arc<dyn NullModel>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            motif: MotifOptions::default(),
            n_shuffles: 1000,
            seed: 1,
            null_model: Arc::new(ArticleShuffle),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassRow {
    pub class: MotifClass,
    pub z: ZScore,
    pub pace: Pace,
    pub delta: Option<Quartiles>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotifReport {
    pub rows: Vec<ClassRow>,
    pub window: u64,
    pub n_shuffles: usize,
    pub seed: u64,
    pub null_model: &'static str,
    pub pairing: &'static str,
    pub cross_article: bool,
    pub n_events: usize,
    pub simultaneous: u64,
    pub null_simultaneous_mean: f64,
    pub max_serial_run: Option<(u64, String, String)>,
    pub delta_c: Option<Quartiles>,
    pub missing_editors: Vec<String>,
}

impl MotifReport {
    pub fn row(&self, class: MotifClass) -> &ClassRow {
        &self.rows[class.index()]
    }
}

/// Full motif analysis: counts, null ensemble, z-scores, pace and
/// experience structure. `events` may be in any order; self-reverts are
/// ignored.
pub fn analyze_motifs(
    events: &[RevertEvent],
    revisions: &[RevisionRecord],
    opts: &AnalysisOptions,
) -> Result<MotifReport> {
    let mut sorted = events.to_vec();
    sorted.sort_by(|a, b| (a.time, &a.article_id, a.reverting_rev).cmp(&(b.time, &b.article_id, b.reverting_rev)));
    let prepared = Prepared::new(&sorted)?;

    let observed = tally(&prepared.groups, &opts.motif, true, true);
    let null = null_ensemble(
        &prepared,
        &opts.motif,
        opts.null_model.as_ref(),
        opts.n_shuffles,
        opts.seed,
        true,
    )?;
    let z = prevalence_zscores(&observed.counts, &null.counts)?;
    let pace = pace_stats(
        observed.dts.as_ref().expect("requested"),
        null.dts.as_ref().expect("requested"),
    );

    let instances: Vec<MotifInstance> = observed
        .instances
        .unwrap_or_default()
        .into_iter()
        .map(|(class, i, j, dt)| MotifInstance {
            class,
            first: sorted[i].clone(),
            second: sorted[j].clone(),
            dt,
        })
        .collect();
    let structure = structure_stats(&instances, &ExperienceIndex::new(revisions));

    let null_sim: Vec<f64> = null.simultaneous.iter().map(|&s| s as f64).collect();
    Ok(MotifReport {
        rows: MotifClass::ALL
            .iter()
            .map(|&class| ClassRow {
                class,
                z: z[class.index()],
                pace: pace[class.index()],
                delta: structure.delta[class.index()],
            })
            .collect(),
        window: opts.motif.window,
        n_shuffles: opts.n_shuffles,
        seed: opts.seed,
        null_model: opts.null_model.name(),
        pairing: opts.motif.pairing.name(),
        cross_article: opts.motif.cross_article,
        n_events: prepared.n_events(),
        simultaneous: observed.simultaneous,
        null_simultaneous_mean: mean(&null_sim).unwrap_or(0.0),
        max_serial_run: max_serial_run(&prepared),
        delta_c: structure.delta_c,
        missing_editors: structure.missing_editors,
    })
}

/// Report CSV. Run-level extras (simultaneous pairs, serial run length,
/// third-party Δ_C, degenerate classes) go in the comment header.
pub fn write_motif_report<W: Write>(out: W, header: &CsvHeader, r: &MotifReport) -> Result<()> {
    let mut h = header
        .clone()
        .param("window_seconds", r.window)
        .param("n_shuffles", r.n_shuffles)
        .param("seed", r.seed)
        .param("null_model", r.null_model)
        .param("pairing", r.pairing)
        .param("cross_article", r.cross_article)
        .param("events", r.n_events)
        .param("simultaneous_pairs", r.simultaneous)
        .param("null_simultaneous_mean", r.null_simultaneous_mean);
    h = match &r.max_serial_run {
        Some((n, a, b)) => h.param("max_serial_run", format!("{n} ({a}->{b})")),
        None => h.param("max_serial_run", 0),
    };
    h = match r.delta_c {
        Some(q) => h.param("tpd_delta_c", format!("median={} q1={} q3={}", q.median, q.q1, q.q3)),
        None => h.param("tpd_delta_c", "absent"),
    };
    let degenerate: Vec<&str> = r.rows.iter().filter(|row| row.z.degenerate).map(|row| row.class.as_str()).collect();
    if !degenerate.is_empty() {
        h = h.param("degenerate", degenerate.join(" "));
    }
    if !r.missing_editors.is_empty() {
        h = h.note(format!(
            "warning: {} editors absent from revision log, experience 0",
            r.missing_editors.len()
        ));
    }

    let mut w = h.writer(out)?;
    w.write_record(REPORT_COLUMNS)?;
    for row in &r.rows {
        w.write_record([
            row.class.as_str().to_string(),
            row.z.observed.to_string(),
            row.z.null_mean.to_string(),
            row.z.null_sd.to_string(),
            fmt_opt(row.z.z),
            fmt_opt(row.pace.obs_median),
            fmt_opt(row.pace.null_median),
            fmt_opt(row.pace.ratio),
            fmt_opt(row.delta.map(|q| q.median)),
            fmt_opt(row.delta.map(|q| q.q1)),
            fmt_opt(row.delta.map(|q| q.q3)),
            r.window.to_string(),
            r.n_shuffles.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
