use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

/// Partial map from concrete event names to the abstract events they refine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RenamingMap {
    pub forward: BTreeMap<String, String>,
    pub concrete_alphabet: BTreeSet<String>,
    pub abstract_alphabet: BTreeSet<String>,
}

impl RenamingMap {
    pub fn new(
        forward: BTreeMap<String, String>,
        concrete_alphabet: BTreeSet<String>,
        abstract_alphabet: BTreeSet<String>,
    ) -> Result<RenamingMap, String> {
        for (c, a) in &forward {
            if !concrete_alphabet.contains(c) {
                return Err(format!("renaming maps `{c}`, which is not a concrete event"));
            }
            if !abstract_alphabet.contains(a) {
                return Err(format!("renaming maps `{c}` to `{a}`, which is not an abstract event"));
            }
        }
        Ok(RenamingMap { forward, concrete_alphabet, abstract_alphabet })
    }

    pub fn identity(alphabet: &BTreeSet<String>) -> RenamingMap {
        RenamingMap {
            forward: alphabet.iter().map(|e| (e.clone(), e.clone())).collect(),
            concrete_alphabet: alphabet.clone(),
            abstract_alphabet: alphabet.clone(),
        }
    }

    pub fn apply(&self, e: &str) -> Option<&str> {
        self.forward.get(e).map(String::as_str)
    }

    /// Concrete events outside the domain.
    pub fn new_events(&self) -> BTreeSet<String> {
        self.concrete_alphabet.iter().filter(|e| !self.forward.contains_key(*e)).cloned().collect()
    }

    /// Abstract events with no concrete preimage.
    pub fn unrefined(&self) -> BTreeSet<String> {
        let image: BTreeSet<&String> = self.forward.values().collect();
        self.abstract_alphabet.iter().filter(|a| !image.contains(a)).cloned().collect()
    }

    pub fn preimage_of(&self, a: &str) -> BTreeSet<String> {
        self.forward.iter().filter(|(_, v)| *v == a).map(|(k, _)| k.clone()).collect()
    }

    /// Preimage of a set; names outside the abstract alphabet contribute nothing.
    pub fn preimage(&self, set: &BTreeSet<String>) -> BTreeSet<String> {
        self.forward.iter().filter(|(_, v)| set.contains(*v)).map(|(k, _)| k.clone()).collect()
    }

    /// `self` then `next`: concrete of `self` to abstract of `next`.
    pub fn then(&self, next: &RenamingMap) -> RenamingMap {
        let forward = self
            .forward
            .iter()
            .filter_map(|(c, m)| next.forward.get(m).map(|a| (c.clone(), a.clone())))
            .collect();
        RenamingMap {
            forward,
            concrete_alphabet: self.concrete_alphabet.clone(),
            abstract_alphabet: next.abstract_alphabet.clone(),
        }
    }
}
