//! Micro-step scheduler and full simulation runs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::opinion::{
    article_interact, cluster_count, pairwise_interact, AgentState, ArticleState, Opinion,
};
use crate::seed::{rng_from_seed, SimRng};
use crate::sim::config::SimConfig;
use crate::sim::phase::{classify_phase, PhaseLabel};
use crate::sim::warmup;

/// Opinions of every agent (and the article) at one sampled step.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: u64,
    pub opinions: Vec<(u64, f64)>,
    pub article: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    /// Article edits per post-warmup window; the last entry may cover a
    /// partial window.
    pub edit_counts: Vec<u64>,
    pub window_len: u64,
    /// Micro-step at which the article was introduced (first window start).
    pub window_start: u64,
    /// Micro-steps executed in total.
    pub end_step: u64,
    pub consensus_step: Option<u64>,
}

impl Trajectory {
    /// Number of windows covering a full `window_len`.
    pub fn complete_windows(&self) -> usize {
        ((self.end_step.saturating_sub(self.window_start)) / self.window_len) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub phase: PhaseLabel,
    pub time_to_consensus: Option<u64>,
    pub total_edits: u64,
    pub final_cluster_count: usize,
    pub seed: u64,
    pub steps_run: u64,
    pub warmup_end: u64,
    pub final_mean: f64,
    pub initial_mean: f64,
    pub article_opinion: f64,
}

/// What happened during one micro-step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub renewed: bool,
    pub interaction: Interaction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interaction {
    Pairwise { interacted: bool },
    Article { edited: bool },
}

/// Mutable state of one run.
#[derive(Debug, Clone)]
pub struct SimState {
    pub agents: Vec<AgentState>,
    pub article: ArticleState,
    /// Completed micro-steps.
    pub step: u64,
    /// True while the article is withheld.
    pub in_warmup: bool,
    next_id: u64,
}

fn uniform_opinion(rng: &mut SimRng) -> Opinion {
    Opinion::clamped(rng.random::<f64>())
}

/// Creates the initial population and article.
///
/// The first `floor(z N)` agents are inflexible, drawn uniformly from
/// `[0, band]` (the first `ceil(k/2)`) and `[1 - band, 1]` (the rest).
pub fn init_population(config: &SimConfig, rng: &mut SimRng) -> (Vec<AgentState>, ArticleState) {
    let n = config.n_agents;
    let k = config.n_extremists().min(n);
    let band = config.extremist_band;
    let n_low = k.div_ceil(2);
    let mut agents = Vec::with_capacity(n);
    for id in 0..n {
        let (opinion, inflexible) = if id < n_low {
            (Opinion::clamped(rng.random_range(0.0..=band)), true)
        } else if id < k {
            (Opinion::clamped(rng.random_range(1.0 - band..=1.0)), true)
        } else {
            (uniform_opinion(rng), false)
        };
        agents.push(AgentState {
            id: id as u64,
            opinion,
            inflexible,
            birth_step: 0,
        });
    }
    let article = ArticleState::new(uniform_opinion(rng));
    (agents, article)
}

impl SimState {
    pub fn new(agents: Vec<AgentState>, article: ArticleState) -> Self {
        let next_id = agents.iter().map(|a| a.id + 1).max().unwrap_or(0);
        SimState {
            agents,
            article,
            step: 0,
            in_warmup: true,
            next_id,
        }
    }

    fn fresh_agent(&mut self, rng: &mut SimRng) -> AgentState {
        let agent = AgentState {
            id: self.next_id,
            opinion: uniform_opinion(rng),
            inflexible: false,
            birth_step: self.step,
        };
        self.next_id += 1;
        agent
    }

    /// Replaces every inflexible agent by a fresh flexible one.
    pub fn ban_inflexible(&mut self, rng: &mut SimRng) -> usize {
        let mut banned = 0;
        for i in 0..self.agents.len() {
            if self.agents[i].inflexible {
                self.agents[i] = self.fresh_agent(rng);
                banned += 1;
            }
        }
        banned
    }

    pub fn opinions(&self) -> Vec<Opinion> {
        self.agents.iter().map(|a| a.opinion).collect()
    }

    /// Opinions of agents that can still change their mind. Consensus is
    /// judged on these only.
    pub fn flexible_opinions(&self) -> Vec<Opinion> {
        self.agents
            .iter()
            .filter(|a| !a.inflexible)
            .map(|a| a.opinion)
            .collect()
    }

    pub fn mean_opinion(&self) -> f64 {
        self.agents.iter().map(|a| a.opinion.value()).sum::<f64>() / self.agents.len() as f64
    }

    /// Executes one micro-step: optional renewal, then one encounter.
    pub fn step(&mut self, config: &SimConfig, rng: &mut SimRng) -> Result<StepOutcome> {
        let n = self.agents.len();
        if n == 0 {
            return Err(Error::EmptyPopulation);
        }
        let renewed = rng.random::<f64>() < config.renewal_p;
        if renewed {
            let idx = rng.random_range(0..n);
            self.agents[idx] = self.fresh_agent(rng);
        }

        let q = if self.in_warmup { 0.0 } else { config.article_q };
        let i = rng.random_range(0..n);
        let interaction = if q > 0.0 && rng.random::<f64>() < q {
            let agent = &self.agents[i];
            let (x, a, edited) = article_interact(
                agent.opinion,
                self.article.opinion,
                &config.params,
                agent.inflexible,
            );
            self.agents[i].opinion = x;
            self.article.opinion = a;
            if edited {
                self.article.edit_count += 1;
                self.article.last_edit_step = Some(self.step);
            }
            Interaction::Article { edited }
        } else {
            if n < 2 {
                return Err(Error::PopulationTooSmall);
            }
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let (xi, xj, interacted) =
                pairwise_interact(self.agents[i].opinion, self.agents[j].opinion, &config.params);
            if !self.agents[i].inflexible {
                self.agents[i].opinion = xi;
            }
            if !self.agents[j].inflexible {
                self.agents[j].opinion = xj;
            }
            Interaction::Pairwise { interacted }
        };
        self.step += 1;
        Ok(StepOutcome {
            renewed,
            interaction,
        })
    }
}

/// True iff the agent spread is below `delta` and, when an article is
/// given, the article lies within `delta` of the mean opinion.
pub fn detect_consensus(opinions: &[Opinion], article: Option<Opinion>, delta: f64) -> bool {
    if opinions.is_empty() {
        return false;
    }
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for o in opinions {
        let v = o.value();
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
    }
    if hi - lo >= delta {
        return false;
    }
    match article {
        Some(a) => (a.value() - sum / opinions.len() as f64).abs() < delta,
        None => true,
    }
}

fn counted_clusters(state: &SimState, config: &SimConfig) -> Result<usize> {
    let (_, clusters) = cluster_count(&state.opinions(), config.cluster_gap)?;
    let min_size = config.min_cluster_frac * config.n_agents as f64;
    Ok(clusters
        .iter()
        .filter(|c| c.size as f64 >= min_size)
        .count()
        .max(1))
}

fn snapshot(state: &SimState) -> Snapshot {
    Snapshot {
        step: state.step,
        opinions: state
            .agents
            .iter()
            .map(|a| (a.id, a.opinion.value()))
            .collect(),
        article: state.article.opinion.value(),
    }
}

/// Runs one simulation from its seed to consensus or `max_steps`.
pub fn run(config: &SimConfig) -> Result<(Trajectory, RunSummary)> {
    config.validate()?;
    let policy = warmup::registry().get(&config.warmup_mode)?;
    let mut rng = rng_from_seed(config.seed);
    let (agents, article) = init_population(config, &mut rng);
    let mut state = SimState::new(agents, article);

    let max_steps = config.max_steps();
    let warmup_budget = config.warmup_steps();
    let sample_every = config.sample_every();
    let window_len = config.window_len();
    let article_matters = config.article_q > 0.0;

    let initial_mean = state.mean_opinion();
    let mut snapshots = Vec::new();
    if config.record_snapshots {
        snapshots.push(snapshot(&state));
    }
    let mut cluster_history: Vec<usize> = Vec::new();
    let mut warmup_end: Option<u64> = None;
    let mut edit_counts: Vec<u64> = Vec::new();
    let mut consensus_step = None;

    if policy.finished(0, warmup_budget, &cluster_history) {
        warmup_end = Some(0);
        state.in_warmup = false;
    }

    while state.step < max_steps {
        if config.ban_step == Some(state.step) {
            state.ban_inflexible(&mut rng);
        }
        let t = state.step;
        let outcome = state.step(config, &mut rng)?;
        if let (Interaction::Article { edited: true }, Some(start)) = (outcome.interaction, warmup_end) {
            let w = ((t - start) / window_len) as usize;
            if edit_counts.len() <= w {
                edit_counts.resize(w + 1, 0);
            }
            edit_counts[w] += 1;
        }

        if state.step % sample_every == 0 {
            if config.record_snapshots {
                snapshots.push(snapshot(&state));
            }
            let article = (article_matters && !state.in_warmup).then_some(state.article.opinion);
            let article_required = article_matters && state.in_warmup;
            if !article_required
                && detect_consensus(&state.flexible_opinions(), article, config.consensus_delta)
            {
                consensus_step = Some(state.step);
                break;
            }
            if warmup_end.is_none() {
                cluster_history.push(cluster_count(&state.opinions(), config.cluster_gap)?.0);
            }
        }
        if warmup_end.is_none() && policy.finished(state.step, warmup_budget, &cluster_history) {
            warmup_end = Some(state.step);
            state.in_warmup = false;
        }
    }

    let end_step = state.step;
    let window_start = warmup_end.unwrap_or(end_step);
    let n_windows = (end_step - window_start).div_ceil(window_len) as usize;
    edit_counts.resize(n_windows.max(edit_counts.len()), 0);
    if config.record_snapshots && snapshots.last().map(|s| s.step) != Some(end_step) {
        snapshots.push(snapshot(&state));
    }

    let trajectory = Trajectory {
        snapshots,
        edit_counts,
        window_len,
        window_start,
        end_step,
        consensus_step,
    };
    let phase = classify_phase(&trajectory, config)?;
    let summary = RunSummary {
        phase,
        time_to_consensus: consensus_step,
        total_edits: state.article.edit_count,
        final_cluster_count: counted_clusters(&state, config)?,
        seed: config.seed,
        steps_run: end_step,
        warmup_end: window_start,
        final_mean: state.mean_opinion(),
        initial_mean,
        article_opinion: state.article.opinion.value(),
    };
    Ok((trajectory, summary))
}
