//! Bot/human cohort comparison of reverting pairs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::motifs::ExperienceIndex;
use crate::output::{fmt_opt, CsvHeader};
use crate::revisions::{RevertEvent, RevisionRecord};
use crate::stats::median;

/// Minimum comparable events for an experience-asymmetry estimate.
pub const MIN_STRUCTURE_EVENTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cohort {
    BotBot,
    HumanHuman,
    BotHuman,
}

impl Cohort {
    pub const ALL: [Cohort; 3] = [Cohort::BotBot, Cohort::HumanHuman, Cohort::BotHuman];

    pub fn of(a_bot: bool, b_bot: bool) -> Cohort {
        match (a_bot, b_bot) {
            (true, true) => Cohort::BotBot,
            (false, false) => Cohort::HumanHuman,
            _ => Cohort::BotHuman,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Cohort::BotBot => "BotBot",
            Cohort::HumanHuman => "HumanHuman",
            Cohort::BotHuman => "BotHuman",
        }
    }
}

impl fmt::Display for Cohort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every editor's bot flag; contradictory flags are an error.
pub fn bot_flags(revisions: &[RevisionRecord]) -> Result<HashMap<String, bool>> {
    let mut flags: HashMap<String, bool> = HashMap::new();
    for r in revisions {
        match flags.get(&r.editor_id) {
            Some(&b) if b != r.is_bot => return Err(Error::InconsistentBotFlag(r.editor_id.clone())),
            Some(_) => {}
            None => {
                flags.insert(r.editor_id.clone(), r.is_bot);
            }
        }
    }
    Ok(flags)
}

fn flag(flags: &HashMap<String, bool>, editor: &str) -> Result<bool> {
    flags
        .get(editor)
        .copied()
        .ok_or_else(|| Error::Precondition(format!("editor `{editor}` does not appear in the revision log")))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairHistory {
    /// Lexicographically ordered.
    pub pair: (String, String),
    pub cohort: Cohort,
    /// Time-sorted, both directions.
    pub events: Vec<RevertEvent>,
}

impl PairHistory {
    pub fn gaps(&self) -> impl Iterator<Item = u64> + '_ {
        self.events.windows(2).map(|w| w[1].time - w[0].time)
    }

    pub fn lifetime(&self) -> Option<u64> {
        match (self.events.first(), self.events.last()) {
            (Some(a), Some(b)) if self.events.len() >= 2 => Some(b.time - a.time),
            _ => None,
        }
    }

    pub fn reciprocal(&self) -> bool {
        let first = &self.events[0].reverter;
        self.events.iter().any(|e| &e.reverter != first)
    }
}

/// Groups non-self reverts by unordered editor pair, sorted by pair.
pub fn build_pair_histories(events: &[RevertEvent], revisions: &[RevisionRecord]) -> Result<Vec<PairHistory>> {
    let flags = bot_flags(revisions)?;
    let mut pairs: BTreeMap<(String, String), Vec<RevertEvent>> = BTreeMap::new();
    for e in events.iter().filter(|e| !e.self_revert && e.reverter != e.reverted) {
        let key = if e.reverter < e.reverted {
            (e.reverter.clone(), e.reverted.clone())
        } else {
            (e.reverted.clone(), e.reverter.clone())
        };
        pairs.entry(key).or_default().push(e.clone());
    }
    pairs
        .into_iter()
        .map(|(pair, mut events)| {
            events.sort_by(|a, b| (a.time, &a.article_id, a.reverting_rev).cmp(&(b.time, &b.article_id, b.reverting_rev)));
            let cohort = Cohort::of(flag(&flags, &pair.0)?, flag(&flags, &pair.1)?);
            Ok(PairHistory { pair, cohort, events })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reciprocity {
    pub reciprocal: usize,
    /// Pairs with at least two events.
    pub qualifying: usize,
}

impl Reciprocity {
    pub fn fraction(&self) -> Option<f64> {
        (self.qualifying > 0).then(|| self.reciprocal as f64 / self.qualifying as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CohortSummary {
    pub cohort: Cohort,
    pub n_pairs: usize,
    pub n_events: usize,
    /// Median over all consecutive within-pair gaps of the cohort.
    pub median_gap: Option<f64>,
    /// Median over pairs with two or more events.
    pub median_lifetime: Option<f64>,
    pub median_events_per_pair: Option<f64>,
    pub reciprocity: Reciprocity,
}

/// Pace, persistence and reciprocity per cohort, in `Cohort::ALL` order.
pub fn pace_and_persistence(histories: &[PairHistory]) -> Vec<CohortSummary> {
    Cohort::ALL
        .iter()
        .map(|&cohort| {
            let hs: Vec<&PairHistory> = histories.iter().filter(|h| h.cohort == cohort).collect();
            let gaps: Vec<f64> = hs.iter().flat_map(|h| h.gaps()).map(|g| g as f64).collect();
            let lifetimes: Vec<f64> = hs.iter().filter_map(|h| h.lifetime()).map(|l| l as f64).collect();
            let sizes: Vec<f64> = hs.iter().map(|h| h.events.len() as f64).collect();
            CohortSummary {
                cohort,
                n_pairs: hs.len(),
                n_events: hs.iter().map(|h| h.events.len()).sum(),
                median_gap: median(&gaps),
                median_lifetime: median(&lifetimes),
                median_events_per_pair: median(&sizes),
                reciprocity: reciprocity(&hs),
            }
        })
        .collect()
}

pub fn reciprocity(histories: &[&PairHistory]) -> Reciprocity {
    let qualifying: Vec<&&PairHistory> = histories.iter().filter(|h| h.events.len() >= 2).collect();
    Reciprocity {
        reciprocal: qualifying.iter().filter(|h| h.reciprocal()).count(),
        qualifying: qualifying.len(),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FractionCell {
    pub undone: usize,
    pub total: usize,
}

impl FractionCell {
    pub fn fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.undone as f64 / self.total as f64
        }
    }
}

/// Share of revisions ever undone, by author class and reverter class.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RevertedFraction {
    pub bot_by_human: FractionCell,
    pub bot_by_bot: FractionCell,
    pub human_by_human: FractionCell,
    pub human_by_bot: FractionCell,
}

/// A revision counts as undone by a class when at least one revert by an
/// editor of that class, other than its own author, restores a revision
/// before it and is itself after it. Each revision counts at most once per
/// reverter class, however many times it was undone.
pub fn reverted_fraction(revisions: &[RevisionRecord], events: &[RevertEvent]) -> Result<RevertedFraction> {
    let flags = bot_flags(revisions)?;
    let mut by_article: HashMap<&str, BTreeMap<u64, &RevisionRecord>> = HashMap::new();
    for r in revisions {
        by_article.entry(&r.article_id).or_default().insert(r.rev_index, r);
    }
    // (article, rev_index) -> (undone by human, undone by bot)
    let mut undone: HashMap<(&str, u64), (bool, bool)> = HashMap::new();
    let mut seen_ranges: BTreeSet<(&str, u64, u64, &str)> = BTreeSet::new();
    for e in events {
        if !seen_ranges.insert((&e.article_id, e.restored_rev, e.reverting_rev, &e.reverter)) {
            continue;
        }
        let Some(revs) = by_article.get(e.article_id.as_str()) else {
            continue;
        };
        let reverter_bot = flag(&flags, &e.reverter)?;
        if e.restored_rev + 1 >= e.reverting_rev {
            continue;
        }
        for (&idx, r) in revs.range(e.restored_rev + 1..e.reverting_rev) {
            if r.editor_id == e.reverter {
                continue;
            }
            let slot = undone.entry((&r.article_id, idx)).or_default();
            if reverter_bot {
                slot.1 = true;
            } else {
                slot.0 = true;
            }
        }
    }
    let mut out = RevertedFraction::default();
    for r in revisions {
        let (h, b) = undone.get(&(r.article_id.as_str(), r.rev_index)).copied().unwrap_or_default();
        let (by_human, by_bot) = if r.is_bot {
            (&mut out.bot_by_human, &mut out.bot_by_bot)
        } else {
            (&mut out.human_by_human, &mut out.human_by_bot)
        };
        by_human.total += 1;
        by_bot.total += 1;
        by_human.undone += usize::from(h);
        by_bot.undone += usize::from(b);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperienceAsymmetry {
    pub cohort: Cohort,
    /// Events whose two parties had different experience.
    pub comparable: usize,
    /// Of those, events where the more experienced party reverted.
    pub senior_reverter: usize,
    /// `None` when fewer than `MIN_STRUCTURE_EVENTS` events are comparable.
    pub probability: Option<f64>,
}

impl ExperienceAsymmetry {
    pub fn insufficient(&self) -> bool {
        self.probability.is_none()
    }
}

/// Probability that the more experienced party is the reverter, per cohort.
/// Experience is counted as in motif structure statistics.
pub fn structure_absence_check(histories: &[PairHistory], revisions: &[RevisionRecord]) -> Vec<ExperienceAsymmetry> {
    let idx = ExperienceIndex::new(revisions);
    Cohort::ALL
        .iter()
        .map(|&cohort| {
            let mut comparable = 0;
            let mut senior = 0;
            for h in histories.iter().filter(|h| h.cohort == cohort) {
                for e in &h.events {
                    let a = idx.at(&e.reverter, e.time);
                    let b = idx.at(&e.reverted, e.time);
                    if a != b {
                        comparable += 1;
                        senior += usize::from(a > b);
                    }
                }
            }
            ExperienceAsymmetry {
                cohort,
                comparable,
                senior_reverter: senior,
                probability: (comparable >= MIN_STRUCTURE_EVENTS).then(|| senior as f64 / comparable as f64),
            }
        })
        .collect()
}

pub const COHORT_COLUMNS: [&str; 7] = [
    "cohort",
    "n_pairs",
    "n_events",
    "median_gap_seconds",
    "median_lifetime_seconds",
    "median_events_per_pair",
    "reciprocity_fraction",
];

/// Cohort report; absent statistics are empty fields. Exact reciprocity
/// counts are recorded in the comment header.
pub fn write_cohort_report<W: Write>(out: W, header: &CsvHeader, rows: &[CohortSummary]) -> Result<()> {
    let h = header.clone().params(rows.iter().map(|r| {
        (
            format!("reciprocity_{}", r.cohort),
            format!("{}/{}", r.reciprocity.reciprocal, r.reciprocity.qualifying),
        )
    }));
    let mut w = h.writer(out)?;
    w.write_record(COHORT_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.cohort.as_str().to_string(),
            r.n_pairs.to_string(),
            r.n_events.to_string(),
            fmt_opt(r.median_gap),
            fmt_opt(r.median_lifetime),
            fmt_opt(r.median_events_per_pair),
            fmt_opt(r.reciprocity.fraction()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_reverted_fraction<W: Write>(out: W, header: &CsvHeader, t: &RevertedFraction) -> Result<()> {
    let mut w = header.writer(out)?;
    w.write_record(["author_class", "reverter_class", "undone", "total", "fraction"])?;
    for (a, r, c) in [
        ("bot", "human", t.bot_by_human),
        ("bot", "bot", t.bot_by_bot),
        ("human", "human", t.human_by_human),
        ("human", "bot", t.human_by_bot),
    ] {
        w.write_record([a, r, &c.undone.to_string(), &c.total.to_string(), &c.fraction().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_structure<W: Write>(out: W, header: &CsvHeader, rows: &[ExperienceAsymmetry]) -> Result<()> {
    let mut w = header
        .clone()
        .param("min_comparable_events", MIN_STRUCTURE_EVENTS)
        .writer(out)?;
    w.write_record(["cohort", "comparable_events", "senior_reverter_events", "p_senior_reverts", "insufficient"])?;
    for r in rows {
        w.write_record([
            r.cohort.as_str().to_string(),
            r.comparable.to_string(),
            r.senior_reverter.to_string(),
            fmt_opt(r.probability),
            u8::from(r.insufficient()).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
