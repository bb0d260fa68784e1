//! Simulation and analysis toolkit for conflict in collaborative editing.
//!
//! Two halves share this crate:
//!
//! * an opinion-dynamics engine ([`opinion`], [`sim`], [`sweep`]) running a
//!   bounded-confidence model extended with an article agent, agent
//!   renewal and inflexible extremists, and classifying runs into
//!   consensus, cyclic conflict or permanent war;
//! * an edit-log pipeline ([`revisions`], [`motifs`], [`cohort`]) that
//!   detects reverts from content fingerprints, counts temporal revert
//!   motifs against shuffled null models and compares bot and human
//!   reverting.

pub mod cli;
pub mod cohort;
pub mod error;
pub mod motifs;
pub mod opinion;
pub mod output;
pub mod registry;
pub mod revisions;
pub mod seed;
pub mod sim;
pub mod stats;
pub mod sweep;

pub use error::{Error, Result};
