//! Temporal two-event revert motifs, null models and motif statistics.

pub mod class;
pub mod enumerate;
pub mod null;
pub mod report;
pub mod stats;

pub use class::MotifClass;
pub use enumerate::{enumerate_motifs, Enumeration, MotifInstance, MotifOptions, PairingRule, DEFAULT_WINDOW};
pub use null::{null_ensemble, NullEnsemble, NullModel};
pub use report::{analyze_motifs, write_motif_report, AnalysisOptions, MotifReport};
pub use stats::{pace_stats, prevalence_zscores, structure_stats, ExperienceIndex};
