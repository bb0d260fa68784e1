//! Revision-log readers and writer.
//!
//! Input formats are registered strategies (`csv`, `jsonl`). Both yield raw
//! records tagged with their line number; validation is shared.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::output::CsvHeader;
use crate::registry::{Named, Registry};
use crate::revisions::record::RevisionRecord;

pub const COLUMNS: [&str; 6] = ["article_id", "rev_index", "timestamp", "editor_id", "is_bot", "digest"];

/// A line-level problem that caused a record to be skipped or reordered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: u64,
    pub message: String,
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Raw decode result of one input line.
pub type RawLine = (u64, std::result::Result<RevisionRecord, String>);

pub trait RevisionFormat: Named + Send + Sync {
    fn decode(&self, input: &mut dyn BufRead) -> Result<Vec<RawLine>>;
}

pub struct CsvFormat;

impl Named for CsvFormat {
    fn name(&self) -> &'static str {
        "csv"
    }
}

impl RevisionFormat for CsvFormat {
    fn decode(&self, input: &mut dyn BufRead) -> Result<Vec<RawLine>> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers = match reader.headers() {
            Ok(h) => h.clone(),
            Err(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => return Err(e.into()),
            Err(e) => return Err(Error::Precondition(format!("unreadable CSV header: {e}"))),
        };
        if headers.is_empty() || (headers.len() == 1 && &headers[0] == "") {
            return Ok(Vec::new());
        }
        if headers.iter().ne(COLUMNS) {
            return Err(Error::Precondition(format!(
                "CSV header must be `{}`, found `{}`",
                COLUMNS.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut out = Vec::new();
        for rec in reader.records() {
            match rec {
                Ok(r) => {
                    let line = r.position().map_or(0, |p| p.line());
                    out.push((line, r.deserialize::<RevisionRecord>(Some(&headers)).map_err(|e| e.to_string())));
                }
                Err(e) => {
                    if let csv::ErrorKind::Io(_) = e.kind() {
                        return Err(e.into());
                    }
                    let line = e.position().map_or(0, |p| p.line());
                    out.push((line, Err(e.to_string())));
                }
            }
        }
        Ok(out)
    }
}

pub struct JsonLinesFormat;

impl Named for JsonLinesFormat {
    fn name(&self) -> &'static str {
        "jsonl"
    }
}

impl RevisionFormat for JsonLinesFormat {
    fn decode(&self, input: &mut dyn BufRead) -> Result<Vec<RawLine>> {
        let mut out = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            out.push((
                i as u64 + 1,
                serde_json::from_str::<RevisionRecord>(trimmed).map_err(|e| e.to_string()),
            ));
        }
        Ok(out)
    }
}

pub fn registry() -> &'static Registry<dyn RevisionFormat> {
    static REG: OnceLock<Registry<dyn RevisionFormat>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut reg: Registry<dyn RevisionFormat> = Registry::new("input format");
        reg.register(Arc::new(CsvFormat), &[]);
        reg.register(Arc::new(JsonLinesFormat), &["json-lines", "json"]);
        reg
    })
}

fn is_lower_hex(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

/// Reads and validates a revision log.
///
/// Malformed lines, duplicate `(article_id, rev_index)` pairs, digests that
/// are not lowercase hex of the same length as the first accepted digest
/// are skipped with a warning. Articles whose lines arrive out of order are
/// sorted by `(timestamp, rev_index)` with a warning; a revision whose
/// `rev_index` then falls below an earlier-timestamped one contradicts the
/// ordering invariant and is skipped too. Articles keep their
/// first-appearance order.
pub fn parse_revisions(
    input: &mut dyn BufRead,
    format: &str,
) -> Result<(Vec<RevisionRecord>, Vec<Warning>)> {
    let fmt = registry().get(format)?;
    let raw = fmt.decode(input)?;

    let mut warnings = Vec::new();
    let mut digest_len: Option<usize> = None;
    let mut seen: HashSet<(String, u64)> = HashSet::new();
    let mut order: Vec<String> = Vec::new();
    let mut by_article: HashMap<String, Vec<(u64, RevisionRecord)>> = HashMap::new();

    for (line, rec) in raw {
        let rec = match rec {
            Ok(r) => r,
            Err(msg) => {
                warnings.push(Warning { line, message: format!("malformed record: {msg}") });
                continue;
            }
        };
        if rec.article_id.is_empty() || rec.editor_id.is_empty() {
            warnings.push(Warning { line, message: "empty article_id or editor_id".into() });
            continue;
        }
        if !is_lower_hex(&rec.digest) {
            warnings.push(Warning {
                line,
                message: format!("digest `{}` is not lowercase hex", rec.digest),
            });
            continue;
        }
        match digest_len {
            None => digest_len = Some(rec.digest.len()),
            Some(n) if n != rec.digest.len() => {
                warnings.push(Warning {
                    line,
                    message: format!("digest length {} differs from {n}", rec.digest.len()),
                });
                continue;
            }
            _ => {}
        }
        if !seen.insert((rec.article_id.clone(), rec.rev_index)) {
            warnings.push(Warning {
                line,
                message: format!("duplicate revision {} of `{}`", rec.rev_index, rec.article_id),
            });
            continue;
        }
        if !by_article.contains_key(&rec.article_id) {
            order.push(rec.article_id.clone());
        }
        by_article.entry(rec.article_id.clone()).or_default().push((line, rec));
    }

    let mut records = Vec::new();
    for article in order {
        let mut revs = by_article.remove(&article).unwrap_or_default();
        let in_order = revs
            .windows(2)
            .all(|w| (w[0].1.timestamp, w[0].1.rev_index) <= (w[1].1.timestamp, w[1].1.rev_index));
        if !in_order {
            warnings.push(Warning {
                line: revs.first().map_or(0, |r| r.0),
                message: format!("revisions of `{article}` out of order; sorted by (timestamp, rev_index)"),
            });
            revs.sort_by_key(|(_, r)| (r.timestamp, r.rev_index));
        }
        let mut max_rev: Option<u64> = None;
        for (line, rec) in revs {
            if max_rev.is_some_and(|m| rec.rev_index < m) {
                warnings.push(Warning {
                    line,
                    message: format!(
                        "revision {} of `{article}` is timestamped before an earlier revision",
                        rec.rev_index
                    ),
                });
                continue;
            }
            max_rev = Some(rec.rev_index);
            records.push(rec);
        }
    }
    Ok((records, warnings))
}

pub fn write_revisions<W: Write>(out: W, header: &CsvHeader, records: &[RevisionRecord]) -> Result<()> {
    let mut w = header.writer(out)?;
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record([
            r.article_id.as_str(),
            &r.rev_index.to_string(),
            &r.timestamp.to_string(),
            &r.editor_id,
            if r.is_bot { "1" } else { "0" },
            &r.digest,
        ])?;
    }
    w.flush()?;
    Ok(())
}
