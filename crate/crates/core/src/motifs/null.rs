//! Timestamp-shuffle null models.

use std::sync::{Arc, OnceLock};

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::motifs::enumerate::{tally, Ev, MotifOptions, Prepared};
use crate::registry::{Named, Registry};
use crate::seed::{mix, rng_from_seed, SimRng};

/// Reassigns event times while keeping each event's article, reverter and
/// reverted fixed. Groups must be left time-sorted.
pub trait NullModel: Named + Send + Sync {
    fn shuffle(&self, groups: &mut [Vec<Ev>], rng: &mut SimRng);
}

/// Permutes timestamps among the events of each article.
pub struct ArticleShuffle;

impl Named for ArticleShuffle {
    fn name(&self) -> &'static str {
        "article-shuffle"
    }
}

impl NullModel for ArticleShuffle {
    fn shuffle(&self, groups: &mut [Vec<Ev>], rng: &mut SimRng) {
        for g in groups {
            let mut times: Vec<u64> = g.iter().map(|e| e.time).collect();
            times.shuffle(rng);
            for (e, t) in g.iter_mut().zip(times) {
                e.time = t;
            }
            g.sort_by_key(|e| (e.time, e.id));
        }
    }
}

/// Permutes timestamps across all events of all articles.
pub struct GlobalShuffle;

impl Named for GlobalShuffle {
    fn name(&self) -> &'static str {
        "global-shuffle"
    }
}

impl NullModel for GlobalShuffle {
    fn shuffle(&self, groups: &mut [Vec<Ev>], rng: &mut SimRng) {
        let mut times: Vec<u64> = groups.iter().flatten().map(|e| e.time).collect();
        times.shuffle(rng);
        let mut it = times.into_iter();
        for g in groups.iter_mut() {
            for e in g.iter_mut() {
                e.time = it.next().unwrap_or(e.time);
            }
            g.sort_by_key(|e| (e.time, e.id));
        }
    }
}

pub fn null_registry() -> &'static Registry<dyn NullModel> {
    static REG: OnceLock<Registry<dyn NullModel>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut reg: Registry<dyn NullModel> = Registry::new("null model");
        reg.register(Arc::new(ArticleShuffle), &["article"]);
        reg.register(Arc::new(GlobalShuffle), &["global"]);
        reg
    })
}

#[derive(Debug, Clone, Default)]
pub struct NullEnsemble {
    /// One count vector per shuffle, in shuffle order.
    pub counts: Vec<[u64; 6]>,
    pub simultaneous: Vec<u64>,
    /// Pooled instance gaps per class across all shuffles, when requested.
    pub dts: Option<[Vec<u64>; 6]>,
}

/// Shuffle `i` uses a generator seeded with `mix(seed, [i])`, so results
/// do not depend on thread scheduling.
pub fn null_ensemble(
    prepared: &Prepared,
    opts: &MotifOptions,
    model: &dyn NullModel,
    n_shuffles: usize,
    seed: u64,
    want_dts: bool,
) -> Result<NullEnsemble> {
    if n_shuffles == 0 {
        return Err(Error::range("shuffles", "must be positive"));
    }
    let tallies: Vec<_> = (0..n_shuffles as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(mix(seed, &[i]));
            let mut groups = prepared.groups.clone();
            model.shuffle(&mut groups, &mut rng);
            tally(&groups, opts, want_dts, false)
        })
        .collect();
    let mut out = NullEnsemble {
        dts: want_dts.then(Default::default),
        ..NullEnsemble::default()
    };
    for t in tallies {
        out.counts.push(t.counts);
        out.simultaneous.push(t.simultaneous);
        if let (Some(all), Some(d)) = (out.dts.as_mut(), t.dts) {
            for (dst, src) in all.iter_mut().zip(d) {
                dst.extend(src);
            }
        }
    }
    Ok(out)
}
