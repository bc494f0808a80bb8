use std::collections::BTreeSet;
use std::fmt;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::dsl::typecheck::{Domain, Symbols};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Elem(String),
    Set(BTreeSet<String>),
}

impl Value {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&BTreeSet<String>> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => f.write_str(if *b { "TRUE" } else { "FALSE" }),
            Value::Elem(e) => f.write_str(e),
            Value::Set(s) => {
                f.write_str("{")?;
                for (i, e) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(e)?;
                }
                f.write_str("}")
            }
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Int(n) => s.serialize_i64(*n),
            Value::Bool(b) => s.serialize_bool(*b),
            Value::Elem(e) => s.serialize_str(e),
            Value::Set(set) => {
                let mut seq = s.serialize_seq(Some(set.len()))?;
                for e in set {
                    seq.serialize_element(e)?;
                }
                seq.end()
            }
        }
    }
}

/// Valuation of a machine's variables, in sorted variable-name order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(pub Vec<Value>);

impl State {
    pub fn display(&self, vars: &[String]) -> String {
        let parts: Vec<String> = vars.iter().zip(&self.0).map(|(n, v)| format!("{n}={v}")).collect();
        format!("[{}]", parts.join(", "))
    }
}

/// All values of a domain, in canonical order.
pub fn domain_values(d: &Domain, syms: &Symbols) -> Vec<Value> {
    match d {
        Domain::Int { min, max } => (*min..=*max).map(Value::Int).collect(),
        Domain::Bool => vec![Value::Bool(false), Value::Bool(true)],
        Domain::Elem { carrier } => syms.carriers[carrier].iter().cloned().map(Value::Elem).collect(),
        Domain::Set { carrier } => {
            let elems = &syms.carriers[carrier];
            let n = elems.len();
            let mut subsets: Vec<BTreeSet<String>> = (0..1u64 << n)
                .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| elems[i].clone()).collect())
                .collect();
            subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            subsets.into_iter().map(Value::Set).collect()
        }
    }
}

pub fn in_domain(v: &Value, d: &Domain, syms: &Symbols) -> bool {
    match (v, d) {
        (Value::Int(n), Domain::Int { min, max }) => min <= n && n <= max,
        (Value::Bool(_), Domain::Bool) => true,
        (Value::Elem(e), Domain::Elem { carrier }) => syms.carriers[carrier].contains(e),
        (Value::Set(s), Domain::Set { carrier }) => s.iter().all(|e| syms.carriers[carrier].contains(e)),
        _ => false,
    }
}

pub fn domain_size(d: &Domain, syms: &Symbols) -> u128 {
    match d {
        Domain::Int { min, max } => (*max - *min + 1) as u128,
        Domain::Bool => 2,
        Domain::Elem { carrier } => syms.carriers[carrier].len() as u128,
        Domain::Set { carrier } => 1u128 << syms.carriers[carrier].len().min(100),
    }
}
