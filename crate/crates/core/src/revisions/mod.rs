//! Revision logs, identity-revert detection and revert networks.

pub mod detect;
pub mod format;
pub mod network;
pub mod record;
pub mod synthetic;

pub use detect::{detect_all, detect_reverts, read_reverts, write_reverts, Attribution};
pub use format::{parse_revisions, write_revisions, Warning};
pub use network::{build_revert_network, RevertNetwork};
pub use record::{RevertEvent, RevisionRecord};
pub use synthetic::{generate_synthetic_log, SyntheticLog, SyntheticSpec};
