//! Name-keyed registries of interchangeable strategies.
//!
//! Each algorithm family (revert attribution, null model, input format,
//! warmup policy, motif pairing rule) is a trait; concrete variants are
//! registered under one or more names and looked up at runtime from
//! configuration or command-line flags.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A strategy that can be registered by name.
pub trait Named {
    /// Canonical name, used in output headers.
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<String, Arc<T>>,
    canonical: Vec<&'static str>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
            canonical: Vec::new(),
        }
    }

    /// Registers a strategy under its canonical name plus any aliases.
    pub fn register(&mut self, strategy: Arc<T>, aliases: &[&str]) -> &mut Self {
        let name = strategy.name();
        self.canonical.push(name);
        for alias in aliases {
            self.entries.insert((*alias).to_string(), strategy.clone());
        }
        self.entries.insert(name.to_string(), strategy);
        self
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.canonical.join(", "),
            })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    /// Canonical names in registration order.
    pub fn names(&self) -> &[&'static str] {
        &self.canonical
    }
}
