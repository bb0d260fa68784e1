//! Policies deciding when the pairwise-only warmup ends and the article
//! is introduced.

use std::sync::{Arc, OnceLock};

use crate::registry::{Named, Registry};

/// Decides at each sample point whether warmup is over.
pub trait WarmupPolicy: Named + Send + Sync {
    /// `step` is the number of completed micro-steps, `budget` the
    /// configured warmup length and `cluster_history` the cluster counts
    /// observed at every sample so far (most recent last).
    fn finished(&self, step: u64, budget: u64, cluster_history: &[usize]) -> bool;
}

/// Warmup lasts exactly the configured number of micro-steps.
pub struct FixedWarmup;

impl Named for FixedWarmup {
    fn name(&self) -> &'static str {
        "fixed"
    }
}

impl WarmupPolicy for FixedWarmup {
    fn finished(&self, step: u64, budget: u64, _: &[usize]) -> bool {
        step >= budget
    }
}

/// Warmup ends once the cluster count has been identical over the last
/// `stable_samples` samples, or when the budget runs out.
pub struct AdaptiveWarmup {
    pub stable_samples: usize,
}

impl Named for AdaptiveWarmup {
    fn name(&self) -> &'static str {
        "adaptive"
    }
}

impl WarmupPolicy for AdaptiveWarmup {
    fn finished(&self, step: u64, budget: u64, history: &[usize]) -> bool {
        if step >= budget {
            return true;
        }
        let k = self.stable_samples;
        history.len() >= k && history[history.len() - k..].windows(2).all(|w| w[0] == w[1])
    }
}

pub fn registry() -> &'static Registry<dyn WarmupPolicy> {
    static REG: OnceLock<Registry<dyn WarmupPolicy>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut reg: Registry<dyn WarmupPolicy> = Registry::new("warmup policy");
        reg.register(Arc::new(FixedWarmup), &[]);
        reg.register(Arc::new(AdaptiveWarmup { stable_samples: 10 }), &[]);
        reg
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_needs_ten_equal_samples() {
        let p = registry().get("adaptive").unwrap();
        assert!(!p.finished(5, 100, &[3; 9]));
        assert!(p.finished(5, 100, &[4, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3]));
        assert!(!p.finished(5, 100, &[3, 3, 3, 3, 3, 3, 3, 3, 3, 2]));
        assert!(p.finished(100, 100, &[]));
    }

    #[test]
    fn fixed_ignores_clusters() {
        let p = registry().get("fixed").unwrap();
        assert!(!p.finished(99, 100, &[1; 50]));
        assert!(p.finished(100, 100, &[]));
    }
}
