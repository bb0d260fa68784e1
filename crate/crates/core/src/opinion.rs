//! Interaction rules of the bounded-confidence model with an article agent.
//!
//! Agents hold a scalar opinion in `[0, 1]`. Two agents closer than `eps`
//! move symmetrically toward each other. An agent meeting the article either
//! edits it (gap larger than `eps_a`) or adopts part of its content.

use crate::error::{Error, Result};

/// An opinion coordinate in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Opinion(f64);

impl Opinion {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Opinion(value))
        } else {
            Err(Error::range("opinion", format!("{value} not in [0, 1]")))
        }
    }

    /// Clamps into `[0, 1]`; used after arithmetic that is a convex
    /// combination up to rounding.
    pub fn clamped(value: f64) -> Self {
        Opinion(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Opinion> for f64 {
    fn from(o: Opinion) -> f64 {
        o.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub id: u64,
    pub opinion: Opinion,
    /// Extremist flag: the agent never changes its own opinion.
    pub inflexible: bool,
    pub birth_step: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArticleState {
    pub opinion: Opinion,
    pub edit_count: u64,
    pub last_edit_step: Option<u64>,
}

impl ArticleState {
    pub fn new(opinion: Opinion) -> Self {
        ArticleState {
            opinion,
            edit_count: 0,
            last_edit_step: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionParams {
    /// Agent-agent tolerance.
    pub eps: f64,
    /// Agent-article tolerance.
    pub eps_a: f64,
    /// Pairwise convergence step, in (0, 0.5].
    pub mu: f64,
    /// Fraction of the gap an edit moves the article.
    pub mu_edit: f64,
    /// Fraction of the gap an adopting agent moves.
    pub mu_adopt: f64,
}

impl Default for InteractionParams {
    fn default() -> Self {
        InteractionParams {
            eps: 0.2,
            eps_a: 0.3,
            mu: 0.5,
            mu_edit: 0.5,
            mu_adopt: 0.5,
        }
    }
}

impl InteractionParams {
    pub fn new(eps: f64, eps_a: f64, mu: f64, mu_edit: f64, mu_adopt: f64) -> Result<Self> {
        let p = InteractionParams {
            eps,
            eps_a,
            mu,
            mu_edit,
            mu_adopt,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_closed("eps", self.eps, 0.0, 1.0)?;
        check_closed("eps_a", self.eps_a, 0.0, 1.0)?;
        check_half_open("mu", self.mu, 0.5)?;
        check_half_open("mu_edit", self.mu_edit, 1.0)?;
        check_half_open("mu_adopt", self.mu_adopt, 1.0)?;
        Ok(())
    }
}

fn check_closed(key: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if v.is_finite() && (lo..=hi).contains(&v) {
        Ok(())
    } else {
        Err(Error::range(key, format!("{v} not in [{lo}, {hi}]")))
    }
}

fn check_half_open(key: &str, v: f64, hi: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 && v <= hi {
        Ok(())
    } else {
        Err(Error::range(key, format!("{v} not in (0, {hi}]")))
    }
}

/// Symmetric bounded-confidence encounter.
///
/// Returns the updated pair and whether the agents interacted
/// (`|xi - xj| < eps`). The two deltas are exact negatives of each other.
pub fn pairwise_interact(
    xi: Opinion,
    xj: Opinion,
    p: &InteractionParams,
) -> (Opinion, Opinion, bool) {
    let (a, b) = (xi.0, xj.0);
    if (a - b).abs() < p.eps {
        let d = p.mu * (b - a);
        (Opinion::clamped(a + d), Opinion::clamped(b - d), true)
    } else {
        (xi, xj, false)
    }
}

/// Agent-article encounter.
///
/// If `|x - a| > eps_a` the agent edits the article toward itself and
/// stays put (`edited = true`). Otherwise the article is unchanged and the
/// agent moves toward it, unless `inflexible` is set.
pub fn article_interact(
    x: Opinion,
    a: Opinion,
    p: &InteractionParams,
    inflexible: bool,
) -> (Opinion, Opinion, bool) {
    let gap = x.0 - a.0;
    if gap.abs() > p.eps_a {
        (x, Opinion::clamped((1.0 - p.mu_edit) * a.0 + p.mu_edit * x.0), true)
    } else if inflexible {
        (x, a, false)
    } else {
        (Opinion::clamped((1.0 - p.mu_adopt) * x.0 + p.mu_adopt * a.0), a, false)
    }
}

/// One cluster of sorted opinions.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub center: f64,
    pub size: usize,
}

/// Splits opinions into clusters wherever consecutive sorted values are
/// more than `gap_threshold` apart.
pub fn cluster_count(opinions: &[Opinion], gap_threshold: f64) -> Result<(usize, Vec<Cluster>)> {
    if opinions.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    if !(gap_threshold > 0.0) {
        return Err(Error::range("gap_threshold", "must be > 0"));
    }
    let mut sorted: Vec<f64> = opinions.iter().map(|o| o.0).collect();
    sorted.sort_by(f64::total_cmp);

    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > gap_threshold {
            let members = &sorted[start..i];
            clusters.push(Cluster {
                center: members.iter().sum::<f64>() / members.len() as f64,
                size: members.len(),
            });
            start = i;
        }
    }
    Ok((clusters.len(), clusters))
}
