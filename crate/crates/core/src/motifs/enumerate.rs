//! Motif enumeration over time-sorted revert events.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::motifs::class::MotifClass;
use crate::registry::{Named, Registry};
use crate::revisions::RevertEvent;

/// Thirty days.
pub const DEFAULT_WINDOW: u64 = 30 * 86_400;

/// Interned event: editors as small integers, `id` indexes the source list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ev {
    pub time: u64,
    pub src: u32,
    pub dst: u32,
    pub id: usize,
}

fn shares(a: &Ev, b: &Ev) -> bool {
    a.src == b.src || a.src == b.dst || a.dst == b.src || a.dst == b.dst
}

/// Chooses which ordered event pairs of a time-sorted scope are motif
/// candidates. Implementations call `visit(i, j)` with `i < j`,
/// `evs[j].time - evs[i].time <= window` and a shared editor.
pub trait PairingRule: Named + Send + Sync {
    fn pairs(&self, evs: &[Ev], window: u64, visit: &mut dyn FnMut(usize, usize));
}

/// Every ordered pair within the window.
pub struct AllPairs;

impl Named for AllPairs {
    fn name(&self) -> &'static str {
        "all-pairs"
    }
}

impl PairingRule for AllPairs {
    fn pairs(&self, evs: &[Ev], window: u64, visit: &mut dyn FnMut(usize, usize)) {
        for i in 0..evs.len() {
            for j in i + 1..evs.len() {
                if evs[j].time - evs[i].time > window {
                    break;
                }
                if shares(&evs[i], &evs[j]) {
                    visit(i, j);
                }
            }
        }
    }
}

/// Each event paired only with the next event sharing an editor.
pub struct Consecutive;

impl Named for Consecutive {
    fn name(&self) -> &'static str {
        "consecutive"
    }
}

impl PairingRule for Consecutive {
    fn pairs(&self, evs: &[Ev], window: u64, visit: &mut dyn FnMut(usize, usize)) {
        for i in 0..evs.len() {
            for j in i + 1..evs.len() {
                if evs[j].time - evs[i].time > window {
                    break;
                }
                if shares(&evs[i], &evs[j]) {
                    visit(i, j);
                    break;
                }
            }
        }
    }
}

pub fn pairing_registry() -> &'static Registry<dyn PairingRule> {
    static REG: OnceLock<Registry<dyn PairingRule>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut reg: Registry<dyn PairingRule> = Registry::new("pairing rule");
        reg.register(Arc::new(AllPairs), &["all"]);
        reg.register(Arc::new(Consecutive), &["consecutive-only"]);
        reg
    })
}

#[derive(Clone)]
pub struct MotifOptions {
    pub window: u64,
    /// Pair events across articles instead of within each article.
    pub cross_article: bool,
    pub pairing: Arc<dyn PairingRule>,
}

impl Default for MotifOptions {
    fn default() -> Self {
        MotifOptions {
            window: DEFAULT_WINDOW,
            cross_article: false,
            pairing: Arc::new(AllPairs),
        }
    }
}

impl std::fmt::Debug for MotifOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MotifOptions")
            .field("window", &self.window)
            .field("cross_article", &self.cross_article)
            .field("pairing", &self.pairing.name())
            .finish()
    }
}

/// Interned, self-revert-free events grouped by article, each group in
/// time order.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub groups: Vec<Vec<Ev>>,
    pub editors: Vec<String>,
    /// Indices into the caller's event list of the kept events.
    pub kept: Vec<usize>,
}

impl Prepared {
    /// Errors when `events` are not sorted by time. Self-reverts are dropped.
    pub fn new(events: &[RevertEvent]) -> Result<Self> {
        if let Some(w) = events.windows(2).find(|w| w[1].time < w[0].time) {
            return Err(Error::Unsorted(format!(
                "revert events must be sorted by time ({} after {})",
                w[1].time, w[0].time
            )));
        }
        let mut editor_ids: HashMap<String, u32> = HashMap::new();
        let mut editors = Vec::new();
        let mut intern = |s: &str| -> u32 {
            if let Some(&i) = editor_ids.get(s) {
                return i;
            }
            editors.push(s.to_string());
            let i = (editors.len() - 1) as u32;
            editor_ids.insert(s.to_string(), i);
            i
        };
        let mut article_ids: HashMap<&str, usize> = HashMap::new();
        let mut groups: Vec<Vec<Ev>> = Vec::new();
        let mut kept = Vec::new();
        for (id, e) in events.iter().enumerate() {
            if e.self_revert || e.reverter == e.reverted {
                continue;
            }
            let g = *article_ids.entry(&e.article_id).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(Ev {
                time: e.time,
                src: intern(&e.reverter),
                dst: intern(&e.reverted),
                id,
            });
            kept.push(id);
        }
        Ok(Prepared { groups, editors, kept })
    }

    pub fn n_events(&self) -> usize {
        self.kept.len()
    }
}

/// Per-class motif counts of one (observed or shuffled) log.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tally {
    pub counts: [u64; 6],
    /// Editor-sharing pairs with `dt = 0`, excluded from `counts`.
    pub simultaneous: u64,
    pub dts: Option<[Vec<u64>; 6]>,
    /// `(class, first id, second id, dt)` when requested.
    pub instances: Option<Vec<(MotifClass, usize, usize, u64)>>,
}

/// Counts motifs in `groups` (each time-sorted). With `cross_article` the
/// groups are merged into one scope first.
pub fn tally(groups: &[Vec<Ev>], opts: &MotifOptions, want_dts: bool, want_instances: bool) -> Tally {
    let mut t = Tally {
        dts: want_dts.then(Default::default),
        instances: want_instances.then(Vec::new),
        ..Tally::default()
    };
    let merged;
    let scopes: &[Vec<Ev>] = if opts.cross_article {
        let mut all: Vec<Ev> = groups.iter().flatten().copied().collect();
        all.sort_by_key(|e| (e.time, e.id));
        merged = vec![all];
        &merged
    } else {
        groups
    };
    for evs in scopes {
        opts.pairing.pairs(evs, opts.window, &mut |i, j| {
            let (a, b) = (&evs[i], &evs[j]);
            let dt = b.time - a.time;
            if dt == 0 {
                t.simultaneous += 1;
                return;
            }
            let Some(class) = MotifClass::classify(&a.src, &a.dst, &b.src, &b.dst) else {
                return;
            };
            t.counts[class.index()] += 1;
            if let Some(d) = t.dts.as_mut() {
                d[class.index()].push(dt);
            }
            if let Some(v) = t.instances.as_mut() {
                v.push((class, a.id, b.id, dt));
            }
        });
    }
    t
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifInstance {
    pub class: MotifClass,
    pub first: RevertEvent,
    pub second: RevertEvent,
    pub dt: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Enumeration {
    pub instances: Vec<MotifInstance>,
    pub simultaneous: u64,
}

impl Enumeration {
    pub fn counts(&self) -> [u64; 6] {
        let mut c = [0; 6];
        for m in &self.instances {
            c[m.class.index()] += 1;
        }
        c
    }
}

/// All motif instances among time-sorted `events`. Self-reverts are ignored.
pub fn enumerate_motifs(events: &[RevertEvent], opts: &MotifOptions) -> Result<Enumeration> {
    let prepared = Prepared::new(events)?;
    let t = tally(&prepared.groups, opts, false, true);
    let instances = t
        .instances
        .unwrap_or_default()
        .into_iter()
        .map(|(class, i, j, dt)| MotifInstance {
            class,
            first: events[i].clone(),
            second: events[j].clone(),
            dt,
        })
        .collect();
    Ok(Enumeration {
        instances,
        simultaneous: t.simultaneous,
    })
}

/// Longest streak of consecutive identical `reverter→reverted` events
/// within one article, with the pair achieving it.
pub fn max_serial_run(prepared: &Prepared) -> Option<(u64, String, String)> {
    let mut best: Option<(u64, u32, u32)> = None;
    for evs in &prepared.groups {
        let mut run = 0u64;
        for (k, e) in evs.iter().enumerate() {
            run = if k > 0 && evs[k - 1].src == e.src && evs[k - 1].dst == e.dst { run + 1 } else { 1 };
            if best.is_none_or(|b| run > b.0) {
                best = Some((run, e.src, e.dst));
            }
        }
    }
    best.map(|(n, a, b)| (n, prepared.editors[a as usize].clone(), prepared.editors[b as usize].clone()))
}
