//! Prevalence, pace and experience-structure statistics for motifs.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::motifs::class::MotifClass;
use crate::motifs::enumerate::MotifInstance;
use crate::revisions::RevisionRecord;
use crate::stats::{mean, median, quartiles, sample_sd, Quartiles};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZScore {
    pub observed: u64,
    pub null_mean: f64,
    pub null_sd: f64,
    /// `None` when the null sd is zero and the observation differs from
    /// the null mean.
    pub z: Option<f64>,
    pub degenerate: bool,
}

/// `z = (observed - mean) / sd` with the sample (n - 1) sd of the null
/// counts. A zero sd sets `degenerate`; z is then 0 if the observation
/// equals the null mean and undefined otherwise.
pub fn prevalence_zscores(observed: &[u64; 6], null: &[[u64; 6]]) -> Result<[ZScore; 6]> {
    if null.len() < 2 {
        return Err(Error::Precondition(format!(
            "z-scores need at least 2 null samples, got {}",
            null.len()
        )));
    }
    Ok(std::array::from_fn(|c| {
        let xs: Vec<f64> = null.iter().map(|s| s[c] as f64).collect();
        let m = mean(&xs).unwrap_or(0.0);
        let sd = sample_sd(&xs).unwrap_or(0.0);
        let obs = observed[c] as f64;
        let (z, degenerate) = if sd > 0.0 {
            (Some((obs - m) / sd), false)
        } else if obs == m {
            (Some(0.0), true)
        } else {
            (None, true)
        };
        ZScore {
            observed: observed[c],
            null_mean: m,
            null_sd: sd,
            z,
            degenerate,
        }
    }))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Pace {
    pub obs_median: Option<f64>,
    pub null_median: Option<f64>,
    pub ratio: Option<f64>,
}

/// Median gap per class, observed and null; classes without instances
/// stay `None`.
pub fn pace_stats(observed: &[Vec<u64>; 6], null: &[Vec<u64>; 6]) -> [Pace; 6] {
    std::array::from_fn(|c| {
        let med = |v: &Vec<u64>| median(&v.iter().map(|&d| d as f64).collect::<Vec<_>>());
        let o = med(&observed[c]);
        let n = med(&null[c]);
        let ratio = match (o, n) {
            (Some(o), Some(n)) if n > 0.0 => Some(o / n),
            _ => None,
        };
        Pace {
            obs_median: o,
            null_median: n,
            ratio,
        }
    })
}

/// Per-editor sorted revision timestamps.
#[derive(Debug, Clone, Default)]
pub struct ExperienceIndex {
    times: HashMap<String, Vec<u64>>,
}

impl ExperienceIndex {
    pub fn new(revisions: &[RevisionRecord]) -> Self {
        let mut times: HashMap<String, Vec<u64>> = HashMap::new();
        for r in revisions {
            times.entry(r.editor_id.clone()).or_default().push(r.timestamp);
        }
        for v in times.values_mut() {
            v.sort_unstable();
        }
        ExperienceIndex { times }
    }

    pub fn contains(&self, editor: &str) -> bool {
        self.times.contains_key(editor)
    }

    /// Revisions by `editor` strictly before `t`; 0 for unknown editors.
    pub fn at(&self, editor: &str, t: u64) -> u64 {
        self.times
            .get(editor)
            .map_or(0, |v| v.partition_point(|&x| x < t) as u64)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Structure {
    /// Δ = experience(first reverter) − experience(first reverted), at the
    /// first event's time.
    pub delta: [Option<Quartiles>; 6],
    /// ThirdPartyDefense only: experience(C) − max(experience(A), experience(B)).
    pub delta_c: Option<Quartiles>,
    /// Editors absent from the revision log, counted as experience 0.
    pub missing_editors: Vec<String>,
}

pub fn structure_stats(instances: &[MotifInstance], experience: &ExperienceIndex) -> Structure {
    let mut deltas: [Vec<f64>; 6] = Default::default();
    let mut delta_c = Vec::new();
    let mut missing = BTreeSet::new();
    let mut exp = |who: &str, t: u64| {
        if !experience.contains(who) {
            missing.insert(who.to_string());
        }
        experience.at(who, t) as f64
    };
    for m in instances {
        let t = m.first.time;
        let a = exp(&m.first.reverter, t);
        let b = exp(&m.first.reverted, t);
        deltas[m.class.index()].push(a - b);
        if m.class == MotifClass::ThirdPartyDefense {
            let c = exp(&m.second.reverter, t);
            delta_c.push(c - a.max(b));
        }
    }
    Structure {
        delta: std::array::from_fn(|c| quartiles(&deltas[c])),
        delta_c: quartiles(&delta_c),
        missing_editors: missing.into_iter().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motifs::enumerate::{enumerate_motifs, tests::ev, MotifOptions};

    #[test]
    fn zscore_arithmetic() {
        // mean 10, sample sd 2
        let null: Vec<[u64; 6]> = [8u64, 12, 8, 12, 10, 10]
            .iter()
            .map(|&x| [x, x, 10, 10, 0, 0])
            .collect();
        let sd = sample_sd(&[8.0, 12.0, 8.0, 12.0, 10.0, 10.0]).unwrap();
        let z = prevalence_zscores(&[10, 16, 10, 11, 0, 0], &null).unwrap();
        assert_eq!(z[0].z, Some(0.0));
        assert!((z[1].z.unwrap() - 6.0 / sd).abs() < 1e-12);
        assert!(z[2].degenerate && z[2].z == Some(0.0));
        assert!(z[3].degenerate && z[3].z.is_none());
        assert!(prevalence_zscores(&[0; 6], &null[..1]).is_err());
    }

    #[test]
    fn zscore_three() {
        // two samples 8 and 12: mean 10, sample sd 2*sqrt(2)
        let s = 2.0 * 2f64.sqrt();
        let z = prevalence_zscores(&[16, 0, 0, 0, 0, 0], &[[8, 0, 0, 0, 0, 0], [12, 0, 0, 0, 0, 0]]).unwrap();
        assert!((z[0].z.unwrap() - 6.0 / s).abs() < 1e-12);
        assert!((z[0].null_sd - s).abs() < 1e-12);
    }

    #[test]
    fn pace_medians_and_absence() {
        let mut obs: [Vec<u64>; 6] = Default::default();
        obs[0] = vec![10, 20, 30];
        let p = pace_stats(&obs, &obs);
        assert_eq!(p[0].obs_median, Some(20.0));
        assert_eq!(p[0].ratio, Some(1.0));
        assert_eq!(p[1], Pace::default());
    }

    fn rev(editor: &str, t: u64) -> RevisionRecord {
        RevisionRecord {
            article_id: "s".into(),
            rev_index: t,
            timestamp: t,
            editor_id: editor.into(),
            is_bot: false,
            digest: "00".into(),
        }
    }

    #[test]
    fn experience_is_strictly_before() {
        let idx = ExperienceIndex::new(&[rev("A", 1), rev("A", 5), rev("A", 5), rev("B", 2)]);
        assert_eq!(idx.at("A", 5), 1);
        assert_eq!(idx.at("A", 6), 3);
        assert_eq!(idx.at("Z", 6), 0);
    }

    #[test]
    fn structure_deltas() {
        let mut revs: Vec<RevisionRecord> = (0..10).map(|i| rev("A", i)).collect();
        revs.extend((0..10).map(|i| rev("B", i)));
        revs.extend((0..30).map(|i| rev("C", i)));
        let idx = ExperienceIndex::new(&revs);
        let evs = [ev("x", "A", "B", 100), ev("x", "C", "A", 110)];
        let e = enumerate_motifs(&evs, &MotifOptions::default()).unwrap();
        let s = structure_stats(&e.instances, &idx);
        let tpd = MotifClass::ThirdPartyDefense.index();
        assert_eq!(s.delta[tpd].unwrap().median, 0.0);
        assert_eq!(s.delta_c.unwrap().median, 20.0);
        assert!(s.delta[0].is_none());
        assert!(s.missing_editors.is_empty());

        let s = structure_stats(&e.instances, &ExperienceIndex::default());
        assert_eq!(s.missing_editors, vec!["A", "B", "C"]);
    }
}
