use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

/// A maximal execution: finite (ends in deadlock) when `cycle` is empty, otherwise `prefix (cycle)^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trace {
    pub prefix: Vec<String>,
    pub cycle: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Finite,
    Lasso,
}

impl Trace {
    pub fn finite<S: Into<String>>(events: impl IntoIterator<Item = S>) -> Trace {
        Trace { prefix: events.into_iter().map(Into::into).collect(), cycle: vec![] }
    }

    /// Panics if `cycle` is empty.
    pub fn lasso<S: Into<String>, T: Into<String>>(
        prefix: impl IntoIterator<Item = S>,
        cycle: impl IntoIterator<Item = T>,
    ) -> Trace {
        let t = Trace {
            prefix: prefix.into_iter().map(Into::into).collect(),
            cycle: cycle.into_iter().map(Into::into).collect(),
        };
        assert!(!t.cycle.is_empty(), "a lasso needs a nonempty cycle");
        t
    }

    pub fn kind(&self) -> TraceKind {
        if self.cycle.is_empty() {
            TraceKind::Finite
        } else {
            TraceKind::Lasso
        }
    }

    pub fn is_finite(&self) -> bool {
        self.cycle.is_empty()
    }

    /// Number of distinct suffix positions (for finite traces this includes the empty suffix).
    pub fn positions(&self) -> usize {
        if self.is_finite() {
            self.prefix.len() + 1
        } else {
            self.prefix.len() + self.cycle.len()
        }
    }

    pub fn events(&self) -> BTreeSet<&str> {
        self.prefix.iter().chain(&self.cycle).map(String::as_str).collect()
    }

    /// Keep only events in `beta`; a cycle with no such event leaves a finite trace.
    pub fn project(&self, beta: &BTreeSet<String>) -> Trace {
        let keep = |v: &Vec<String>| v.iter().filter(|e| beta.contains(*e)).cloned().collect::<Vec<_>>();
        Trace { prefix: keep(&self.prefix), cycle: keep(&self.cycle) }
    }

    /// Unique representative of the denoted word: shortest prefix, primitive cycle.
    pub fn canonical(&self) -> Trace {
        if self.is_finite() {
            return self.clone();
        }
        let n = self.cycle.len();
        let period = (1..=n)
            .find(|&d| n.is_multiple_of(d) && (0..n).all(|i| self.cycle[i] == self.cycle[i % d]))
            .unwrap_or(n);
        let mut cycle: Vec<String> = self.cycle[..period].to_vec();
        let mut prefix = self.prefix.clone();
        while let Some(last) = prefix.last() {
            if *last != cycle[cycle.len() - 1] {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        Trace { prefix, cycle }
    }

    /// Both traces denote the same finite or infinite word.
    pub fn same_word(&self, other: &Trace) -> bool {
        self.canonical() == other.canonical()
    }

    /// Letter at position `i` (`None` past the end of a finite trace).
    pub fn letter(&self, i: usize) -> Option<&str> {
        if i < self.prefix.len() {
            return Some(&self.prefix[i]);
        }
        if self.cycle.is_empty() {
            return None;
        }
        Some(&self.cycle[(i - self.prefix.len()) % self.cycle.len()])
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.prefix.is_empty() {
            f.write_str("()")?;
        } else {
            f.write_str(&self.prefix.join(", "))?;
        }
        if self.is_finite() {
            f.write_str(" | deadlock")
        } else {
            write!(f, " | ({})^w", self.cycle.join(", "))
        }
    }
}

impl Serialize for Trace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Trace", 4)?;
        st.serialize_field("kind", &self.kind())?;
        st.serialize_field("prefix", &self.prefix)?;
        st.serialize_field("cycle", &self.cycle)?;
        st.serialize_field("text", &self.to_string())?;
        st.end()
    }
}

impl<'de> serde::Deserialize<'de> for Trace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        // `kind` and `text` are derived, so only the two words are read back.
        #[derive(serde::Deserialize)]
        struct Raw {
            prefix: Vec<String>,
            #[serde(default)]
            cycle: Vec<String>,
        }
        let r = Raw::deserialize(d)?;
        Ok(Trace { prefix: r.prefix, cycle: r.cycle })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn projection() {
        let u = Trace::lasso(["pay", "refill"], ["pay"]);
        assert_eq!(u.project(&set(&["pay"])), Trace::lasso(["pay"], ["pay"]));
        assert_eq!(u.project(&set(&["pay", "refill"])), u);
        assert_eq!(Trace::lasso(["a"], ["b"]).project(&set(&["a"])), Trace::finite(["a"]));
    }

    #[test]
    fn canonical_form() {
        let a = Trace::lasso(["pay"], ["pay"]);
        let b = Trace::lasso(Vec::<String>::new(), ["pay", "pay"]);
        assert!(a.same_word(&b));
        let c = Trace::lasso(["x", "a", "b"], ["a", "b"]);
        assert_eq!(c.canonical(), Trace::lasso(["x"], ["a", "b"]));
        let d = Trace::lasso(["b"], ["a", "b"]);
        assert_eq!(d.canonical(), Trace::lasso(Vec::<String>::new(), ["b", "a"]));
        assert!(!Trace::lasso(["a"], ["b"]).same_word(&Trace::lasso(["b"], ["a"])));
    }
}
