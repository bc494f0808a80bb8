//! Preservation results as certificates: hypotheses checked, then the conclusion stated.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::json;

use crate::dsl::{Formula, Status};
use crate::ltl::{model_check, CheckError, Verdict};
use crate::refine::{check_refinement_pair, check_strategy, compose_renamings, LevelError, RefinementChain, RenamingMap};
use crate::sem::{check_deadlock_free, explore, Limits, SemError, StateGraph};

use super::beta::{check_beta_dependent, BetaBounds, DependenceStatus};
use super::translate::translate_formula;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PreserveOptions {
    pub limits: Limits,
    pub beta_bounds: BetaBounds,
    /// Count an `unknown` dependence verdict (no witness within bounds) as satisfied.
    pub accept_bounded: bool,
    /// Model check the conclusion directly on the last machine.
    pub cross_validate: bool,
}

impl Default for PreserveOptions {
    fn default() -> Self {
        PreserveOptions {
            limits: Limits::default(),
            beta_bounds: BetaBounds::default(),
            accept_bounded: false,
            cross_validate: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    pub id: String,
    pub statement: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub evidence: serde_json::Value,
}

impl Hypothesis {
    fn new(id: &str, statement: String, holds: bool, evidence: serde_json::Value) -> Hypothesis {
        Hypothesis { id: id.to_string(), statement, holds, evidence }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub lemma: u8,
    pub chain: String,
    pub machines: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub property: Option<Formula>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<BTreeSet<String>>,
    pub limits: Limits,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_bounds: Option<BetaBounds>,
    pub hypotheses: Vec<Hypothesis>,
    /// What the lemma asserts of the last machine once every hypothesis holds.
    pub candidate: Formula,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<Formula>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_validation: Option<Verdict>,
    /// False only if a stated conclusion is refuted by the direct check.
    pub consistent: bool,
}

impl Certificate {
    pub fn established(&self) -> bool {
        self.conclusion.is_some()
    }

    pub fn failed(&self) -> Vec<&Hypothesis> {
        self.hypotheses.iter().filter(|h| !h.holds).collect()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PreserveError {
    #[error(transparent)]
    Sem(#[from] SemError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error("level {i} must be below the last machine ({n})")]
    LastLevel { i: usize, n: usize },
}

fn is_identity(g: &RenamingMap) -> bool {
    g.forward.iter().all(|(c, a)| c == a)
}

/// Strategy rules from `first_rule` on, each step's obligations, and the shape of the last machine.
fn chain_hypotheses(
    chain: &RefinementChain,
    first_rule: u8,
    g_n: &StateGraph,
    limits: Limits,
) -> Result<Vec<Hypothesis>, PreserveError> {
    let mut hs = vec![];
    let findings: Vec<_> = check_strategy(chain).findings.into_iter().filter(|f| f.rule >= first_rule).collect();
    hs.push(Hypothesis::new(
        "strategy",
        format!("strategy rules {first_rule}-6 hold on {}", names(chain)),
        findings.is_empty(),
        if findings.is_empty() { serde_json::Value::Null } else { json!(findings) },
    ));
    for (i, link) in chain.links.iter().enumerate() {
        let (a, c) = (&chain.machines[i], &chain.machines[i + 1]);
        let r = check_refinement_pair(a, c, link, limits)?;
        let failing: Vec<_> = r.obligations.iter().filter(|o| !o.holds).collect();
        hs.push(Hypothesis::new(
            "refinement-step",
            format!("{} refines {}", c.name(), a.name()),
            failing.is_empty(),
            if failing.is_empty() { serde_json::Value::Null } else { json!(failing) },
        ));
    }
    let last = chain.machines.last().unwrap();
    let dl = check_deadlock_free(g_n);
    hs.push(Hypothesis::new(
        "deadlock-free",
        format!("{} is deadlock free", last.name()),
        dl.holds,
        dl.deadlock.map(|d| json!(d)).unwrap_or_default(),
    ));
    let ant = last.ast.events_with_status(Status::Anticipated);
    hs.push(Hypothesis::new(
        "no-anticipated",
        format!("{} has no anticipated events", last.name()),
        ant.is_empty(),
        if ant.is_empty() { serde_json::Value::Null } else { json!(ant) },
    ));
    Ok(hs)
}

fn names(chain: &RefinementChain) -> String {
    chain.machines.iter().map(|m| m.name()).collect::<Vec<_>>().join(" < ")
}

fn finish(
    mut cert: Certificate,
    g_n: &StateGraph,
    opts: &PreserveOptions,
) -> Result<Certificate, PreserveError> {
    if cert.hypotheses.iter().all(|h| h.holds) {
        cert.conclusion = Some(cert.candidate.clone());
    }
    if opts.cross_validate {
        let v = model_check(g_n, &cert.candidate)?;
        cert.consistent = cert.conclusion.is_none() || v.holds;
        cert.cross_validation = Some(v);
    }
    Ok(cert)
}

/// The last machine keeps performing events that descend from the first machine's events.
pub fn apply_lemma_gf(chain: &RefinementChain, opts: &PreserveOptions) -> Result<Certificate, PreserveError> {
    let last = chain.machines.last().unwrap();
    let g_n = explore(last, opts.limits)?;
    let g = compose_renamings(chain, 1)?;
    let lemma = if is_identity(&g) { 1 } else { 3 };
    let initial = g.preimage(&chain.machines[0].ast.alphabet());
    let candidate = Formula::globally(Formula::finally(Formula::any_of(initial)));
    let cert = Certificate {
        lemma,
        chain: chain.name.clone(),
        machines: chain.machines.iter().map(|m| m.name().to_string()).collect(),
        level: None,
        property: None,
        beta: None,
        limits: opts.limits,
        beta_bounds: None,
        hypotheses: chain_hypotheses(chain, 1, &g_n, opts.limits)?,
        candidate,
        conclusion: None,
        cross_validation: None,
        consistent: true,
    };
    finish(cert, &g_n, opts)
}

/// A property of machine `i` carried down to the last machine.
pub fn apply_preservation(
    chain: &RefinementChain,
    i: usize,
    phi: &Formula,
    beta: Option<&BTreeSet<String>>,
    opts: &PreserveOptions,
) -> Result<Certificate, PreserveError> {
    let n = chain.n();
    if i >= n {
        return Err(PreserveError::LastLevel { i, n });
    }
    let beta: BTreeSet<String> = beta.cloned().unwrap_or_else(|| phi.alphabet());
    let m_i = &chain.machines[i];
    let alpha_i = m_i.ast.alphabet();
    let mut hs = vec![];

    let outside: Vec<String> = phi.alphabet().difference(&beta).cloned().collect();
    hs.push(Hypothesis::new(
        "formula-in-beta",
        "every event of the property is in beta".into(),
        outside.is_empty(),
        if outside.is_empty() { serde_json::Value::Null } else { json!(outside) },
    ));
    let foreign: Vec<&String> = beta.difference(&alpha_i).collect();
    hs.push(Hypothesis::new(
        "beta-in-alphabet",
        format!("beta is contained in the events of {}", m_i.name()),
        foreign.is_empty(),
        if foreign.is_empty() { serde_json::Value::Null } else { json!(foreign) },
    ));

    let g_i = explore(m_i, opts.limits)?;
    let v = model_check(&g_i, phi)?;
    hs.push(Hypothesis::new(
        "satisfies",
        format!("{} ⊨ {phi}", m_i.name()),
        v.holds,
        v.counterexample.as_ref().map(|c| json!({ "counterexample": c })).unwrap_or_default(),
    ));

    let sigma: BTreeSet<String> = alpha_i.union(&beta).cloned().collect();
    match check_beta_dependent(phi, &beta, &sigma, opts.beta_bounds) {
        Ok(d) => {
            let ok = d.status == DependenceStatus::Certified
                || (d.status == DependenceStatus::Unknown && opts.accept_bounded);
            hs.push(Hypothesis::new("beta-dependent", format!("{phi} is beta-dependent"), ok, json!(d)));
        }
        Err(e) => hs.push(Hypothesis::new(
            "beta-dependent",
            format!("{phi} is beta-dependent"),
            false,
            json!(e.to_string()),
        )),
    }

    let sub = chain.sub_chain(i, n);
    let g_n = explore(chain.machines.last().unwrap(), opts.limits)?;
    hs.extend(chain_hypotheses(&sub, 2, &g_n, opts.limits)?);

    let g = compose_renamings(chain, i + 1)?;
    let cert = Certificate {
        lemma: if is_identity(&g) { 2 } else { 4 },
        chain: chain.name.clone(),
        machines: chain.machines.iter().map(|m| m.name().to_string()).collect(),
        level: Some(i),
        property: Some(phi.clone()),
        beta: Some(beta),
        limits: opts.limits,
        beta_bounds: Some(opts.beta_bounds),
        hypotheses: hs,
        candidate: translate_formula(phi, &g),
        conclusion: None,
        cross_validation: None,
        consistent: true,
    };
    finish(cert, &g_n, opts)
}
