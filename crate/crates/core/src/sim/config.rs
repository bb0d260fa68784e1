use crate::error::{Error, Result};
use crate::opinion::InteractionParams;
use crate::sim::warmup;

/// Full parameter set of one simulation run.
///
/// Fields left as `None` are derived from `n_agents`:
/// `warmup_steps = 100 N`, `max_steps = 1000 N`, `sample_every = N`,
/// `window_len = 10 N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n_agents: usize,
    pub params: InteractionParams,
    /// Per-micro-step probability that one agent is replaced.
    pub renewal_p: f64,
    /// Probability that a post-warmup micro-step is an article interaction.
    pub article_q: f64,
    pub warmup_steps: Option<u64>,
    /// Name of the registered warmup policy (`fixed` or `adaptive`).
    pub warmup_mode: String,
    pub max_steps: Option<u64>,
    pub consensus_delta: f64,
    pub extremist_z: f64,
    pub extremist_band: f64,
    pub ban_step: Option<u64>,
    pub seed: u64,
    pub sample_every: Option<u64>,
    pub window_len: Option<u64>,
    /// Peace threshold, in edits per sweep (N micro-steps).
    pub theta_low: f64,
    /// War threshold, in edits per sweep.
    pub theta_high: f64,
    /// Number of final windows that must all be war-labeled for `War`.
    pub final_windows: usize,
    /// Gap separating opinion clusters.
    pub cluster_gap: f64,
    /// Clusters smaller than this fraction of N are not counted in the
    /// run summary.
    pub min_cluster_frac: f64,
    /// Keep per-agent opinion snapshots in the trajectory.
    pub record_snapshots: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_agents: 100,
            params: InteractionParams::default(),
            renewal_p: 0.0,
            article_q: 0.5,
            warmup_steps: None,
            warmup_mode: "fixed".to_string(),
            max_steps: None,
            consensus_delta: 1e-3,
            extremist_z: 0.0,
            extremist_band: 0.05,
            ban_step: None,
            seed: 1,
            sample_every: None,
            window_len: None,
            theta_low: 0.1,
            theta_high: 1.0,
            final_windows: 10,
            cluster_gap: 0.01,
            min_cluster_frac: 0.0,
            record_snapshots: true,
        }
    }
}

/// Every key accepted by [`SimConfig::set`], in output order.
pub const KEYS: &[&str] = &[
    "n_agents",
    "eps",
    "eps_a",
    "mu",
    "mu_edit",
    "mu_adopt",
    "renewal_p",
    "article_q",
    "warmup_steps",
    "warmup_mode",
    "max_steps",
    "consensus_delta",
    "extremist_z",
    "extremist_band",
    "ban_step",
    "seed",
    "sample_every",
    "window_len",
    "theta_low",
    "theta_high",
    "final_windows",
    "cluster_gap",
    "min_cluster_frac",
    "record_snapshots",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Parse {
        key: key.to_string(),
        value: value.to_string(),
    })
}

fn parse_opt<T: std::str::FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    match value.trim() {
        "auto" | "none" | "" => Ok(None),
        v => parse(key, v).map(Some),
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "1" | "true" | "yes" => Ok(true),
        "0" | "false" | "no" => Ok(false),
        _ => Err(Error::Parse {
            key: key.to_string(),
            value: value.to_string(),
        }),
    }
}

fn fmt_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "auto".to_string(), T::to_string)
}

impl SimConfig {
    pub fn is_key(key: &str) -> bool {
        KEYS.contains(&key)
    }

    /// Sets one parameter from its text form. Range checks happen in
    /// [`SimConfig::validate`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n_agents" => self.n_agents = parse(key, value)?,
            "eps" => self.params.eps = parse(key, value)?,
            "eps_a" => self.params.eps_a = parse(key, value)?,
            "mu" => self.params.mu = parse(key, value)?,
            "mu_edit" => self.params.mu_edit = parse(key, value)?,
            "mu_adopt" => self.params.mu_adopt = parse(key, value)?,
            "renewal_p" => self.renewal_p = parse(key, value)?,
            "article_q" => self.article_q = parse(key, value)?,
            "warmup_steps" => self.warmup_steps = parse_opt(key, value)?,
            "warmup_mode" => self.warmup_mode = value.trim().to_string(),
            "max_steps" => self.max_steps = parse_opt(key, value)?,
            "consensus_delta" => self.consensus_delta = parse(key, value)?,
            "extremist_z" => self.extremist_z = parse(key, value)?,
            "extremist_band" => self.extremist_band = parse(key, value)?,
            "ban_step" => self.ban_step = parse_opt(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "sample_every" => self.sample_every = parse_opt(key, value)?,
            "window_len" => self.window_len = parse_opt(key, value)?,
            "theta_low" => self.theta_low = parse(key, value)?,
            "theta_high" => self.theta_high = parse(key, value)?,
            "final_windows" => self.final_windows = parse(key, value)?,
            "cluster_gap" => self.cluster_gap = parse(key, value)?,
            "min_cluster_frac" => self.min_cluster_frac = parse(key, value)?,
            "record_snapshots" => self.record_snapshots = parse_bool(key, value)?,
            _ => return Err(Error::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Text form of one parameter, as accepted by [`SimConfig::set`].
    pub fn get(&self, key: &str) -> Result<String> {
        Ok(match key {
            "n_agents" => self.n_agents.to_string(),
            "eps" => self.params.eps.to_string(),
            "eps_a" => self.params.eps_a.to_string(),
            "mu" => self.params.mu.to_string(),
            "mu_edit" => self.params.mu_edit.to_string(),
            "mu_adopt" => self.params.mu_adopt.to_string(),
            "renewal_p" => self.renewal_p.to_string(),
            "article_q" => self.article_q.to_string(),
            "warmup_steps" => fmt_opt(&self.warmup_steps),
            "warmup_mode" => self.warmup_mode.clone(),
            "max_steps" => fmt_opt(&self.max_steps),
            "consensus_delta" => self.consensus_delta.to_string(),
            "extremist_z" => self.extremist_z.to_string(),
            "extremist_band" => self.extremist_band.to_string(),
            "ban_step" => fmt_opt(&self.ban_step),
            "seed" => self.seed.to_string(),
            "sample_every" => fmt_opt(&self.sample_every),
            "window_len" => fmt_opt(&self.window_len),
            "theta_low" => self.theta_low.to_string(),
            "theta_high" => self.theta_high.to_string(),
            "final_windows" => self.final_windows.to_string(),
            "cluster_gap" => self.cluster_gap.to_string(),
            "min_cluster_frac" => self.min_cluster_frac.to_string(),
            "record_snapshots" => u8::from(self.record_snapshots).to_string(),
            _ => return Err(Error::UnknownKey(key.to_string())),
        })
    }

    /// All parameters with derived values resolved, in [`KEYS`] order.
    pub fn resolved_pairs(&self) -> Vec<(&'static str, String)> {
        KEYS.iter()
            .map(|&k| {
                let v = match k {
                    "warmup_steps" => self.warmup_steps().to_string(),
                    "max_steps" => self.max_steps().to_string(),
                    "sample_every" => self.sample_every().to_string(),
                    "window_len" => self.window_len().to_string(),
                    _ => self.get(k).expect("listed key"),
                };
                (k, v)
            })
            .collect()
    }

    fn n(&self) -> u64 {
        self.n_agents as u64
    }

    pub fn warmup_steps(&self) -> u64 {
        self.warmup_steps.unwrap_or(100 * self.n())
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps.unwrap_or(1000 * self.n())
    }

    pub fn sample_every(&self) -> u64 {
        self.sample_every.unwrap_or(self.n()).max(1)
    }

    pub fn window_len(&self) -> u64 {
        self.window_len.unwrap_or(10 * self.n()).max(1)
    }

    /// Peace threshold in edits per micro-step.
    pub fn theta_low_per_step(&self) -> f64 {
        self.theta_low / self.n_agents as f64
    }

    /// War threshold in edits per micro-step.
    pub fn theta_high_per_step(&self) -> f64 {
        self.theta_high / self.n_agents as f64
    }

    /// Number of inflexible agents created at initialization.
    pub fn n_extremists(&self) -> usize {
        (self.extremist_z * self.n_agents as f64).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_agents == 0 {
            return Err(Error::range("n_agents", "must be positive"));
        }
        self.params.validate()?;
        for (key, v) in [
            ("renewal_p", self.renewal_p),
            ("article_q", self.article_q),
            ("extremist_z", self.extremist_z),
            ("min_cluster_frac", self.min_cluster_frac),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::range(key, format!("{v} not in [0, 1]")));
            }
        }
        if !(self.extremist_band > 0.0 && self.extremist_band < 0.5) {
            return Err(Error::range("extremist_band", "must lie in (0, 0.5)"));
        }
        for (key, v) in [
            ("consensus_delta", self.consensus_delta),
            ("cluster_gap", self.cluster_gap),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::range(key, "must be > 0"));
            }
        }
        if !(self.theta_low >= 0.0 && self.theta_low <= self.theta_high) {
            return Err(Error::range("theta_low", "need 0 <= theta_low <= theta_high"));
        }
        if self.max_steps() == 0 {
            return Err(Error::range("max_steps", "must be positive"));
        }
        if self.warmup_steps() + 1 > self.max_steps() {
            return Err(Error::range("warmup_steps", "need warmup_steps + 1 <= max_steps"));
        }
        for (key, v) in [
            ("sample_every", self.sample_every),
            ("window_len", self.window_len),
        ] {
            if v == Some(0) {
                return Err(Error::range(key, "must be positive"));
            }
        }
        if self.final_windows == 0 {
            return Err(Error::range("final_windows", "must be positive"));
        }
        if !warmup::registry().contains(&self.warmup_mode) {
            return Err(Error::range(
                "warmup_mode",
                format!(
                    "unknown policy `{}` (available: {})",
                    self.warmup_mode,
                    warmup::registry().names().join(", ")
                ),
            ));
        }
        Ok(())
    }
}
