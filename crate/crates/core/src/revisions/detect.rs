//! Identity-revert detection by digest reuse.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::output::CsvHeader;
use crate::registry::{Named, Registry};
use crate::revisions::record::{RevertEvent, RevisionRecord};

pub const REVERT_COLUMNS: [&str; 8] = [
    "article_id",
    "time",
    "reverter",
    "reverted",
    "restored_rev",
    "reverting_rev",
    "depth",
    "self_revert",
];

/// Decides who is blamed for the revisions a revert undid.
pub trait Attribution: Named + Send + Sync {
    /// `undone` is non-empty and in revision order.
    fn blame<'a>(&self, undone: &'a [RevisionRecord]) -> Vec<&'a str>;
}

/// Blames only the author of the immediately undone revision.
pub struct LatestOnly;

impl Named for LatestOnly {
    fn name(&self) -> &'static str {
        "latest"
    }
}

impl Attribution for LatestOnly {
    fn blame<'a>(&self, undone: &'a [RevisionRecord]) -> Vec<&'a str> {
        undone.last().map(|r| vec![r.editor_id.as_str()]).unwrap_or_default()
    }
}

/// One event per distinct author of the undone range, first-appearance order.
pub struct AllIntermediate;

impl Named for AllIntermediate {
    fn name(&self) -> &'static str {
        "all"
    }
}

impl Attribution for AllIntermediate {
    fn blame<'a>(&self, undone: &'a [RevisionRecord]) -> Vec<&'a str> {
        let mut out: Vec<&str> = Vec::new();
        for r in undone {
            if !out.contains(&r.editor_id.as_str()) {
                out.push(&r.editor_id);
            }
        }
        out
    }
}

pub fn registry() -> &'static Registry<dyn Attribution> {
    static REG: OnceLock<Registry<dyn Attribution>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut reg: Registry<dyn Attribution> = Registry::new("attribution");
        reg.register(Arc::new(LatestOnly), &["latest-only"]);
        reg.register(Arc::new(AllIntermediate), &["all-intermediate"]);
        reg
    })
}

/// Single pass over one article's revisions, keeping the most recent
/// position of each digest. Revision `k` is a revert when its digest was
/// last seen at `j < k - 1`; a repeat at `k - 1` is a null edit.
pub fn detect_reverts(revisions: &[RevisionRecord], attribution: &dyn Attribution) -> Result<Vec<RevertEvent>> {
    let mut events = Vec::new();
    let Some(first) = revisions.first() else {
        return Ok(events);
    };
    let mut last_seen: HashMap<&str, usize> = HashMap::new();
    for (k, rev) in revisions.iter().enumerate() {
        if rev.article_id != first.article_id {
            return Err(Error::Precondition(format!(
                "detect_reverts expects one article, got `{}` and `{}`",
                first.article_id, rev.article_id
            )));
        }
        if k > 0 && revisions[k - 1].rev_index >= rev.rev_index {
            return Err(Error::Unsorted(format!(
                "article `{}`: rev_index {} follows {}",
                rev.article_id,
                rev.rev_index,
                revisions[k - 1].rev_index
            )));
        }
        if let Some(&j) = last_seen.get(rev.digest.as_str()) {
            if j + 1 < k {
                for reverted in attribution.blame(&revisions[j + 1..k]) {
                    events.push(RevertEvent {
                        article_id: rev.article_id.clone(),
                        time: rev.timestamp,
                        reverter: rev.editor_id.clone(),
                        reverted: reverted.to_string(),
                        restored_rev: revisions[j].rev_index,
                        reverting_rev: rev.rev_index,
                        depth: (k - j - 1) as u64,
                        self_revert: reverted == rev.editor_id,
                    });
                }
            }
        }
        last_seen.insert(&rev.digest, k);
    }
    Ok(events)
}

/// Groups a multi-article log by article (first-appearance order), sorts
/// each article by `rev_index` and detects in parallel.
pub fn detect_all(records: &[RevisionRecord], attribution: &dyn Attribution) -> Result<Vec<RevertEvent>> {
    let groups = group_by_article(records);
    let per_article: Vec<Result<Vec<RevertEvent>>> = groups
        .par_iter()
        .map(|revs| detect_reverts(revs, attribution))
        .collect();
    let mut out = Vec::new();
    for r in per_article {
        out.extend(r?);
    }
    Ok(out)
}

/// Article groups in first-appearance order, each sorted by `rev_index`.
pub fn group_by_article(records: &[RevisionRecord]) -> Vec<Vec<RevisionRecord>> {
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut groups: Vec<Vec<RevisionRecord>> = Vec::new();
    for r in records {
        let i = *index.entry(&r.article_id).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[i].push(r.clone());
    }
    for g in &mut groups {
        g.sort_by_key(|r| r.rev_index);
    }
    groups
}

pub fn write_reverts<W: Write>(out: W, header: &CsvHeader, events: &[RevertEvent]) -> Result<()> {
    let mut w = header.writer(out)?;
    w.write_record(REVERT_COLUMNS)?;
    for e in events {
        w.write_record([
            e.article_id.as_str(),
            &e.time.to_string(),
            &e.reverter,
            &e.reverted,
            &e.restored_rev.to_string(),
            &e.reverting_rev.to_string(),
            &e.depth.to_string(),
            if e.self_revert { "1" } else { "0" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_reverts<R: Read>(input: R) -> Result<Vec<RevertEvent>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().ne(REVERT_COLUMNS) {
        return Err(Error::Precondition(format!(
            "revert CSV header must be `{}`",
            REVERT_COLUMNS.join(",")
        )));
    }
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}
