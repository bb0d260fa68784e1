use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sim::config::SimConfig;
use crate::sim::scheduler::Trajectory;

/// Long-run regime of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhaseLabel {
    Consensus,
    Cyclic,
    War,
}

impl PhaseLabel {
    pub const ALL: [PhaseLabel; 3] = [PhaseLabel::Consensus, PhaseLabel::Cyclic, PhaseLabel::War];

    /// Tie-break order used when aggregating: War > Cyclic > Consensus.
    pub fn severity(self) -> u8 {
        match self {
            PhaseLabel::Consensus => 0,
            PhaseLabel::Cyclic => 1,
            PhaseLabel::War => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PhaseLabel::Consensus => "Consensus",
            PhaseLabel::Cyclic => "Cyclic",
            PhaseLabel::War => "War",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhaseLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Consensus" => Ok(PhaseLabel::Consensus),
            "Cyclic" => Ok(PhaseLabel::Cyclic),
            "War" => Ok(PhaseLabel::War),
            _ => Err(Error::Parse {
                key: "phase".into(),
                value: s.into(),
            }),
        }
    }
}

/// Label of a single edit-rate window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowLabel {
    Peace,
    War,
}

pub const MIN_WINDOWS: usize = 10;

/// Labels complete windows with hysteresis: below `theta_low` is peace,
/// above `theta_high` is war, anything between keeps the previous label.
/// The state before the first window is peace.
pub fn window_labels(trajectory: &Trajectory, config: &SimConfig) -> Vec<WindowLabel> {
    let low = config.theta_low_per_step();
    let high = config.theta_high_per_step();
    let len = trajectory.window_len as f64;
    let mut prev = WindowLabel::Peace;
    trajectory
        .edit_counts
        .iter()
        .take(trajectory.complete_windows())
        .map(|&edits| {
            let rate = edits as f64 / len;
            prev = if rate < low {
                WindowLabel::Peace
            } else if rate > high {
                WindowLabel::War
            } else {
                prev
            };
            prev
        })
        .collect()
}

/// Classifies a trajectory.
///
/// Consensus if consensus was detected. Otherwise, over complete
/// post-warmup windows: War if the final `final_windows` windows are all
/// war-labeled, Cyclic if at least two peace-to-war transitions occurred.
/// Remaining runs never converged: Cyclic if any war window existed,
/// War otherwise.
pub fn classify_phase(trajectory: &Trajectory, config: &SimConfig) -> Result<PhaseLabel> {
    if trajectory.consensus_step.is_some() {
        return Ok(PhaseLabel::Consensus);
    }
    let labels = window_labels(trajectory, config);
    let needed = MIN_WINDOWS.max(config.final_windows);
    if labels.len() < needed {
        return Err(Error::TrajectoryTooShort {
            windows: labels.len(),
            needed,
        });
    }
    let k = config.final_windows;
    if labels[labels.len() - k..].iter().all(|&l| l == WindowLabel::War) {
        return Ok(PhaseLabel::War);
    }
    let mut transitions = 0;
    let mut prev = WindowLabel::Peace;
    for &l in &labels {
        if prev == WindowLabel::Peace && l == WindowLabel::War {
            transitions += 1;
        }
        prev = l;
    }
    if transitions >= 2 {
        return Ok(PhaseLabel::Cyclic);
    }
    if labels.contains(&WindowLabel::War) {
        Ok(PhaseLabel::Cyclic)
    } else {
        Ok(PhaseLabel::War)
    }
}
