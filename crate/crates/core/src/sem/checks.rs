use serde::Serialize;

use super::graph::StateGraph;
use super::SemError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantVerdict {
    pub holds: bool,
    pub states_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<StateWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateWitness {
    pub state: usize,
    pub valuation: String,
    pub path: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeadlockVerdict {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deadlock: Option<StateWitness>,
}

fn witness(g: &StateGraph, s: usize) -> StateWitness {
    let path = g.path_to(s).map(|p| g.event_path(&p)).unwrap_or_default();
    StateWitness { state: s, valuation: g.state_text(s), path }
}

/// Re-evaluate domains and the invariant on every state of the graph.
pub fn check_invariant(g: &StateGraph) -> Result<InvariantVerdict, SemError> {
    let Some(model) = &g.model else {
        return Ok(InvariantVerdict { holds: true, states_checked: 0, violation: None });
    };
    for (i, st) in g.states.iter().enumerate() {
        if !model.invariant_holds(st)? {
            return Ok(InvariantVerdict { holds: false, states_checked: i + 1, violation: Some(witness(g, i)) });
        }
    }
    Ok(InvariantVerdict { holds: true, states_checked: g.states.len(), violation: None })
}

pub fn check_deadlock_free(g: &StateGraph) -> DeadlockVerdict {
    match g.deadlocks.first() {
        None => DeadlockVerdict { holds: true, deadlock: None },
        Some(&s) => DeadlockVerdict { holds: false, deadlock: Some(witness(g, s)) },
    }
}
