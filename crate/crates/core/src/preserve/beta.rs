//! Is a formula insensitive to events outside `beta`?
//!
//! A whitelist of shapes is certified outright. Anything else goes to a bounded search over
//! lassos and finite traces, comparing each trace with its projection onto `beta`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::dsl::Formula;
use crate::exec::Exec;
use crate::ltl::{holds_on_trace, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BetaBounds {
    pub prefix: usize,
    pub cycle: usize,
    /// Longest finite trace tried.
    pub finite: usize,
}

impl Default for BetaBounds {
    fn default() -> Self {
        BetaBounds { prefix: 4, cycle: 4, finite: 8 }
    }
}

impl BetaBounds {
    pub fn new(prefix: usize, cycle: usize) -> BetaBounds {
        BetaBounds { prefix, cycle, finite: prefix + cycle }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DependenceStatus {
    Certified,
    Refuted,
    /// No witness within the bounds.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DependenceMethod {
    SyntacticSchema,
    BoundedSemantic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependenceVerdict {
    pub status: DependenceStatus,
    pub method: DependenceMethod,
    pub formula: Formula,
    pub beta: BTreeSet<String>,
    pub sigma: BTreeSet<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Trace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BetaBounds>,
    /// Traces compared by the bounded search.
    pub traces_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BetaError {
    #[error("formula mentions {0:?}, which are not in beta")]
    NotInBeta(Vec<String>),
}

pub fn check_beta_dependent(
    phi: &Formula,
    beta: &BTreeSet<String>,
    sigma: &BTreeSet<String>,
    bounds: BetaBounds,
) -> Result<DependenceVerdict, BetaError> {
    check_beta_dependent_with(phi, beta, sigma, bounds, Exec::default())
}

pub fn check_beta_dependent_with(
    phi: &Formula,
    beta: &BTreeSet<String>,
    sigma: &BTreeSet<String>,
    bounds: BetaBounds,
    exec: Exec,
) -> Result<DependenceVerdict, BetaError> {
    let missing: Vec<String> = phi.alphabet().difference(beta).cloned().collect();
    if !missing.is_empty() {
        return Err(BetaError::NotInBeta(missing));
    }
    let base = DependenceVerdict {
        status: DependenceStatus::Certified,
        method: DependenceMethod::SyntacticSchema,
        formula: phi.clone(),
        beta: beta.clone(),
        sigma: sigma.clone(),
        witness: None,
        bounds: None,
        traces_checked: 0,
    };
    if schema(phi) {
        return Ok(base);
    }
    let (witness, checked) = search(phi, beta, sigma, bounds, exec);
    Ok(DependenceVerdict {
        status: if witness.is_some() { DependenceStatus::Refuted } else { DependenceStatus::Unknown },
        method: DependenceMethod::BoundedSemantic,
        witness,
        bounds: Some(bounds),
        traces_checked: checked,
        ..base
    })
}

/// Does `u` tell `phi` apart from its projection onto `beta`?
pub fn is_witness(u: &Trace, phi: &Formula, beta: &BTreeSet<String>) -> bool {
    holds_on_trace(u, phi) != holds_on_trace(&u.project(beta), phi)
}

/// A disjunction of atoms, or `!true` (the empty disjunction).
fn event_set(f: &Formula) -> bool {
    match f {
        Formula::Atom(_) => true,
        Formula::Or(a, b) => event_set(a) && event_set(b),
        Formula::Not(a) => matches!(**a, Formula::True),
        _ => false,
    }
}

/// Boolean combinations of `GF D`, `FG !D`, `G(D => F D')`, `F D`, `true`.
fn schema(f: &Formula) -> bool {
    match f {
        Formula::True => true,
        Formula::Not(a) => schema(a),
        Formula::And(a, b) | Formula::Or(a, b) => schema(a) && schema(b),
        Formula::Globally(a) => match &**a {
            Formula::Finally(d) => event_set(d),
            Formula::Or(l, r) => match (&**l, &**r) {
                (Formula::Not(d), Formula::Finally(e)) => event_set(d) && event_set(e),
                _ => false,
            },
            _ => false,
        },
        Formula::Finally(a) => match &**a {
            Formula::Globally(n) => matches!(&**n, Formula::Not(d) if event_set(d)),
            d => event_set(d),
        },
        _ => false,
    }
}

/// Letters of `sigma` that `phi` can tell apart: `beta`, plus one stand-in for the rest.
fn letters(beta: &BTreeSet<String>, sigma: &BTreeSet<String>) -> Vec<String> {
    let mut out: Vec<String> = beta.iter().cloned().collect();
    if let Some(other) = sigma.iter().find(|e| !beta.contains(*e)) {
        out.push(other.clone());
    }
    out
}

fn words(letters: &[String], len: usize) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![vec![]];
    for _ in 0..len {
        out = out.iter().flat_map(|w| letters.iter().map(move |l| [w.clone(), vec![l.clone()]].concat())).collect();
    }
    out
}

/// Candidates by increasing length: finite traces, then lassos by prefix length.
fn search(
    phi: &Formula,
    beta: &BTreeSet<String>,
    sigma: &BTreeSet<String>,
    bounds: BetaBounds,
    exec: Exec,
) -> (Option<Trace>, usize) {
    let ls = letters(beta, sigma);
    let max = bounds.finite.max(bounds.prefix + bounds.cycle);
    let mut checked = 0;
    for len in 0..=max {
        let ws = words(&ls, len);
        let mut batch: Vec<Trace> = vec![];
        if len <= bounds.finite {
            batch.extend(ws.iter().cloned().map(Trace::finite));
        }
        for p in 0..=bounds.prefix.min(len) {
            let q = len - p;
            if q == 0 || q > bounds.cycle {
                continue;
            }
            for w in &ws {
                batch.push(Trace { prefix: w[..p].to_vec(), cycle: w[p..].to_vec() });
            }
        }
        if let Some(u) = exec.find_first(&batch, |u| is_witness(u, phi, beta).then(|| u.clone())) {
            checked += batch.iter().position(|b| *b == u).unwrap() + 1;
            return (Some(u), checked);
        }
        checked += batch.len();
    }
    (None, checked)
}
