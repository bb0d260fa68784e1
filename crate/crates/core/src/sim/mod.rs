//! Bounded-confidence simulation with an article agent and agent renewal.

pub mod config;
pub mod export;
pub mod phase;
pub mod replicate;
pub mod scheduler;
pub mod warmup;

pub use config::SimConfig;
pub use phase::{classify_phase, PhaseLabel};
pub use replicate::{time_to_consensus, ConsensusStats};
pub use scheduler::{detect_consensus, init_population, run, RunSummary, SimState, Trajectory};
