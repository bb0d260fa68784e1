//! Synthetic revision logs with a known revert schedule.
//!
//! Every planted revert `A→B` at time `t` is realised as two revisions:
//! `B` writes fresh content midway between the previous revision and `t`,
//! then `A` restores the digest that preceded it. Detection with either
//! attribution therefore recovers exactly the planted events. Filler
//! revisions carry fresh digests and never create reverts.
//!
//! Specs are TOML:
//!
//! ```toml
//! seed = 7
//! horizon = 31536000
//!
//! [[editors]]
//! id = "alice"
//! prior_edits = 100
//!
//! [background]
//! articles = 1
//! editors = 20
//! events_per_article = 200
//!
//! [[cohorts]]
//! cohort = "BotBot"
//! pairs = 50
//! events_per_pair = 10
//! mean_gap_seconds = 2592000
//!
//! [[reverts]]
//! article = "x"
//! time = 100
//! reverter = "alice"
//! reverted = "bob"
//!
//! [[bursts]]
//! article = "article-0"
//! class = "SerialAttack"
//! start = 1000
//! repeats = 5
//! spacing = 60
//! editors = ["alice", "bob"]
//! ```

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::motifs::MotifClass;
use crate::revisions::record::RevisionRecord;
use crate::seed::{rng_from_seed, splitmix64};

/// Author of each article's initial revision.
pub const CREATOR: &str = "creator";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    #[serde(default)]
    pub seed: u64,
    pub horizon: u64,
    #[serde(default)]
    pub editors: Vec<EditorSpec>,
    pub background: Option<Background>,
    #[serde(default)]
    pub cohorts: Vec<CohortStream>,
    #[serde(default)]
    pub reverts: Vec<PlantedRevert>,
    #[serde(default)]
    pub bursts: Vec<Burst>,
    #[serde(default)]
    pub filler: Vec<Filler>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EditorSpec {
    pub id: String,
    #[serde(default)]
    pub is_bot: bool,
    /// Revisions placed at time 0 in a private sandbox article.
    #[serde(default)]
    pub prior_edits: u64,
}

/// Poisson reverting: per article, `events_per_article` reverts at
/// uniform times in `[1, horizon]` between random distinct editors of a
/// shared pool `bg-<i>`. The first `floor(bot_fraction * editors)` pool
/// members are bots.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Background {
    pub articles: usize,
    pub editors: usize,
    #[serde(default)]
    pub bot_fraction: f64,
    #[serde(default)]
    pub events_per_article: usize,
    #[serde(default)]
    pub filler_per_article: usize,
}

/// Dedicated editor pairs, each on its own article, reverting with
/// exponential gaps. Direction is a fair coin unless `experience_bias`
/// gives the probability that the party with more prior edits reverts.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohortStream {
    /// `BotBot`, `HumanHuman` or `BotHuman`.
    pub cohort: String,
    pub pairs: usize,
    pub events_per_pair: usize,
    pub mean_gap_seconds: f64,
    pub experience_bias: Option<f64>,
    /// Prior edits per editor drawn uniformly from `[0, prior_edits_max]`.
    #[serde(default)]
    pub prior_edits_max: u64,
    /// First event uniform in `[1, start_max]`; defaults to `horizon / 10`.
    pub start_max: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantedRevert {
    pub article: String,
    pub time: u64,
    pub reverter: String,
    pub reverted: String,
}

/// `repeats` copies of a two-event motif: events alternate between the
/// first (`A→B`) and second role pattern, `spacing` seconds apart.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Burst {
    pub article: String,
    pub class: String,
    pub start: u64,
    pub repeats: usize,
    pub spacing: u64,
    /// `[A, B]` or `[A, B, C]`.
    pub editors: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Filler {
    pub article: String,
    pub count: usize,
    pub editor: Option<String>,
}

impl SyntheticSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }
}

#[derive(Debug, Clone, Default)]
pub struct SyntheticLog {
    pub revisions: Vec<RevisionRecord>,
    /// Planted reverts, sorted by `(article, time)`.
    pub planted: Vec<PlantedRevert>,
}

#[derive(Default)]
struct ArticlePlan {
    fixed: BTreeMap<u64, (String, String)>,
    random: Vec<(u64, String, String)>,
    fillers: Vec<(u64, String)>,
}

struct Editors(BTreeMap<String, (bool, u64)>);

impl Editors {
    fn declare(&mut self, id: &str, is_bot: bool, prior: u64) -> Result<()> {
        match self.0.get_mut(id) {
            Some((b, _)) if *b != is_bot => Err(Error::InconsistentBotFlag(id.to_string())),
            Some((_, p)) => {
                *p = (*p).max(prior);
                Ok(())
            }
            None => {
                self.0.insert(id.to_string(), (is_bot, prior));
                Ok(())
            }
        }
    }

    fn ensure(&mut self, id: &str) {
        self.0.entry(id.to_string()).or_insert((false, 0));
    }

    fn is_bot(&self, id: &str) -> bool {
        self.0.get(id).is_some_and(|e| e.0)
    }
}

struct Digests {
    seed: u64,
    next: u64,
}

impl Digests {
    /// 32 hex chars, unique per call.
    fn fresh(&mut self) -> String {
        let n = self.next;
        self.next += 1;
        format!("{:016x}{n:016x}", splitmix64(self.seed ^ n))
    }
}

fn cohort_bots(cohort: &str) -> Result<(bool, bool, &'static str)> {
    match cohort.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
        "botbot" => Ok((true, true, "botbot")),
        "humanhuman" => Ok((false, false, "humanhuman")),
        "bothuman" | "humanbot" => Ok((true, false, "bothuman")),
        _ => Err(Error::Spec(format!("unknown cohort `{cohort}`"))),
    }
}

pub fn generate_synthetic_log(spec: &SyntheticSpec) -> Result<SyntheticLog> {
    if spec.horizon == 0 {
        return Err(Error::Spec("horizon must be positive".into()));
    }
    let mut rng = rng_from_seed(spec.seed);
    let mut editors = Editors(BTreeMap::new());
    let mut plans: BTreeMap<String, ArticlePlan> = BTreeMap::new();

    for e in &spec.editors {
        editors.declare(&e.id, e.is_bot, e.prior_edits)?;
    }
    editors.ensure(CREATOR);

    let fixed = |article: &str, t: u64, a: &str, b: &str, plans: &mut BTreeMap<String, ArticlePlan>| {
        if a == b {
            return Err(Error::InfeasibleSchedule(format!("`{a}` cannot revert itself at {t} on `{article}`")));
        }
        if t == 0 || t > spec.horizon {
            return Err(Error::InfeasibleSchedule(format!(
                "event at {t} on `{article}` outside [1, {}]",
                spec.horizon
            )));
        }
        let plan = plans.entry(article.to_string()).or_default();
        if plan.fixed.insert(t, (a.to_string(), b.to_string())).is_some() {
            return Err(Error::InfeasibleSchedule(format!(
                "two planted events on `{article}` at time {t} have no defined order"
            )));
        }
        Ok(())
    };

    for r in &spec.reverts {
        fixed(&r.article, r.time, &r.reverter, &r.reverted, &mut plans)?;
        editors.ensure(&r.reverter);
        editors.ensure(&r.reverted);
    }

    for b in &spec.bursts {
        let class: MotifClass = b.class.parse()?;
        let (r2, t2) = class.second_roles();
        let needed = if r2 == 2 || t2 == 2 { 3 } else { 2 };
        if b.editors.len() < needed {
            return Err(Error::Spec(format!("burst {class} on `{}` needs {needed} editors", b.article)));
        }
        if b.spacing == 0 {
            return Err(Error::Spec("burst spacing must be positive".into()));
        }
        for e in &b.editors {
            editors.ensure(e);
        }
        for i in 0..b.repeats as u64 {
            let t1 = b.start + 2 * i * b.spacing;
            fixed(&b.article, t1, &b.editors[0], &b.editors[1], &mut plans)?;
            fixed(&b.article, t1 + b.spacing, &b.editors[r2], &b.editors[t2], &mut plans)?;
        }
    }

    if let Some(bg) = &spec.background {
        if !(0.0..=1.0).contains(&bg.bot_fraction) {
            return Err(Error::Spec("background.bot_fraction must lie in [0, 1]".into()));
        }
        if bg.events_per_article > 0 && bg.editors < 2 {
            return Err(Error::Spec("background needs at least 2 editors".into()));
        }
        let n_bots = (bg.bot_fraction * bg.editors as f64).floor() as usize;
        let pool: Vec<String> = (0..bg.editors).map(|i| format!("bg-{i}")).collect();
        for (i, id) in pool.iter().enumerate() {
            editors.declare(id, i < n_bots, 0)?;
        }
        for a in 0..bg.articles {
            let plan = plans.entry(format!("article-{a}")).or_default();
            for _ in 0..bg.events_per_article {
                let t = rng.random_range(1..=spec.horizon);
                let i = rng.random_range(0..pool.len());
                let mut j = rng.random_range(0..pool.len() - 1);
                if j >= i {
                    j += 1;
                }
                plan.random.push((t, pool[i].clone(), pool[j].clone()));
            }
            for _ in 0..bg.filler_per_article {
                let t = rng.random_range(0..=spec.horizon);
                let who = pool.choose(&mut rng).cloned().unwrap_or_else(|| CREATOR.to_string());
                plan.fillers.push((t, who));
            }
        }
    }

    for c in &spec.cohorts {
        let (a_bot, b_bot, tag) = cohort_bots(&c.cohort)?;
        if !(c.mean_gap_seconds > 0.0) {
            return Err(Error::Spec(format!("cohort {tag}: mean_gap_seconds must be positive")));
        }
        if let Some(p) = c.experience_bias {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Spec(format!("cohort {tag}: experience_bias must lie in [0, 1]")));
            }
        }
        let gap = Exp::new(1.0 / c.mean_gap_seconds).map_err(|e| Error::Spec(e.to_string()))?;
        let start_max = c.start_max.unwrap_or(spec.horizon / 10).clamp(1, spec.horizon);
        for p in 0..c.pairs {
            let a = format!("{tag}-{p}-a");
            let b = format!("{tag}-{p}-b");
            let pa = rng.random_range(0..=c.prior_edits_max);
            let pb = rng.random_range(0..=c.prior_edits_max);
            editors.declare(&a, a_bot, pa)?;
            editors.declare(&b, b_bot, pb)?;
            let (senior, junior) = if pb > pa { (&b, &a) } else { (&a, &b) };
            let plan = plans.entry(format!("{tag}-pair-{p}")).or_default();
            let mut t = rng.random_range(1..=start_max);
            for k in 0..c.events_per_pair {
                if k > 0 {
                    t += (gap.sample(&mut rng).ceil() as u64).max(1);
                }
                if t > spec.horizon {
                    break;
                }
                let senior_reverts = match c.experience_bias {
                    Some(p) => rng.random_bool(p),
                    None => rng.random_bool(0.5),
                };
                let (r, v) = if senior_reverts { (senior, junior) } else { (junior, senior) };
                plan.random.push((t, r.clone(), v.clone()));
            }
        }
    }

    for f in &spec.filler {
        let who = f.editor.clone().unwrap_or_else(|| "filler".to_string());
        editors.ensure(&who);
        let plan = plans.entry(f.article.clone()).or_default();
        for _ in 0..f.count {
            plan.fillers.push((rng.random_range(0..=spec.horizon), who.clone()));
        }
    }

    assemble(spec, &editors, plans)
}

fn assemble(
    spec: &SyntheticSpec,
    editors: &Editors,
    plans: BTreeMap<String, ArticlePlan>,
) -> Result<SyntheticLog> {
    let mut digests = Digests {
        seed: splitmix64(spec.seed),
        next: 0,
    };
    let mut revisions = Vec::new();
    let mut planted = Vec::new();

    for (id, (is_bot, prior)) in &editors.0 {
        let article = format!("sandbox-{id}");
        for k in 0..*prior {
            revisions.push(RevisionRecord {
                article_id: article.clone(),
                rev_index: k,
                timestamp: 0,
                editor_id: id.clone(),
                is_bot: *is_bot,
                digest: digests.fresh(),
            });
        }
    }

    for (article, mut plan) in plans {
        let mut used: BTreeSet<u64> = plan.fixed.keys().copied().collect();
        let mut events: Vec<(u64, String, String)> =
            plan.fixed.into_iter().map(|(t, (a, b))| (t, a, b)).collect();
        plan.random.sort_by_key(|e| e.0);
        for (mut t, a, b) in plan.random {
            while used.contains(&t) {
                t += 1;
            }
            used.insert(t);
            events.push((t, a, b));
        }
        events.sort_by_key(|e| e.0);
        plan.fillers.sort_by_key(|f| f.0);

        let mut rev = 0u64;
        let mut push = |revisions: &mut Vec<RevisionRecord>, t: u64, who: &str, digest: String| {
            revisions.push(RevisionRecord {
                article_id: article.clone(),
                rev_index: rev,
                timestamp: t,
                editor_id: who.to_string(),
                is_bot: editors.is_bot(who),
                digest,
            });
            rev += 1;
        };

        let mut current = digests.fresh();
        push(&mut revisions, 0, CREATOR, current.clone());
        let mut prev_time = 0u64;
        let mut fillers = plan.fillers.into_iter().peekable();
        for (t, a, b) in events {
            while let Some((ft, who)) = fillers.next_if(|f| f.0 < t) {
                current = digests.fresh();
                push(&mut revisions, ft, &who, current.clone());
                prev_time = ft;
            }
            let undone_at = prev_time + (t - prev_time) / 2;
            push(&mut revisions, undone_at, &b, digests.fresh());
            push(&mut revisions, t, &a, current.clone());
            prev_time = t;
            planted.push(PlantedRevert {
                article: article.clone(),
                time: t,
                reverter: a,
                reverted: b,
            });
        }
        for (ft, who) in fillers {
            push(&mut revisions, ft, &who, digests.fresh());
        }
    }
    Ok(SyntheticLog { revisions, planted })
}
