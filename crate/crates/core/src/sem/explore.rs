use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use super::graph::{Edge, Infeasible, StateGraph};
use super::model::Model;
use super::value::State;
use super::SemError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub max_states: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: 100_000 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExploreOptions {
    pub limits: Limits,
    /// Record enabled-but-unsatisfiable firings instead of failing.
    pub allow_infeasible: bool,
    /// Keep states that violate the invariant instead of failing.
    pub allow_invariant_violations: bool,
}

pub fn explore(model: &Arc<Model>, limits: Limits) -> Result<StateGraph, SemError> {
    explore_with(model, ExploreOptions { limits, ..Default::default() })
}

/// Breadth-first closure of the initial states; events in name order.
pub fn explore_with(model: &Arc<Model>, opts: ExploreOptions) -> Result<StateGraph, SemError> {
    let events = model.sorted_events();
    let alphabet: Vec<String> = events.iter().map(|e| e.name.clone()).collect();
    let mut states: Vec<State> = vec![];
    let mut index: HashMap<State, usize> = HashMap::new();
    // (parent state, event name) for witness paths
    let mut parent: Vec<Option<(usize, usize)>> = vec![];
    let mut edges: Vec<Edge> = vec![];
    let mut infeasible = vec![];
    let mut initial = vec![];
    let mut queue = VecDeque::new();

    let path_of = |parent: &[Option<(usize, usize)>], mut s: usize| -> Vec<String> {
        let mut p = vec![];
        while let Some((prev, ev)) = parent[s] {
            p.push(alphabet[ev].clone());
            s = prev;
        }
        p.reverse();
        p
    };

    let init = model.fire(&model.ast.init, None)?;
    if let Some(b) = init.infeasible.first() {
        return Err(SemError::Infeasible {
            event: "init".into(),
            params: Model::describe_params(b),
            state: "(none)".into(),
            path: vec![],
        });
    }
    for f in init.enabled {
        if let Some((var, val)) = model.domain_violation(&f.target) {
            return Err(SemError::OutOfDomain {
                event: "init".into(),
                variable: var,
                value: val.to_string(),
                state: "(none)".into(),
                path: vec![],
            });
        }
        if !opts.allow_invariant_violations && !model.invariant_holds(&f.target)? {
            return Err(SemError::InvariantViolation {
                state: f.target.display(&model.vars),
                depth: 0,
                path: vec![],
            });
        }
        if !index.contains_key(&f.target) {
            index.insert(f.target.clone(), states.len());
            initial.push(states.len());
            queue.push_back(states.len());
            states.push(f.target);
            parent.push(None);
        }
    }
    if states.len() > opts.limits.max_states {
        return Err(SemError::StateLimit { limit: opts.limits.max_states });
    }

    while let Some(s) = queue.pop_front() {
        let src = states[s].clone();
        for (ei, ev) in events.iter().enumerate() {
            let fired = model.fire(ev, Some(&src))?;
            for b in fired.infeasible {
                if !opts.allow_infeasible {
                    return Err(SemError::Infeasible {
                        event: ev.name.clone(),
                        params: Model::describe_params(&b),
                        state: src.display(&model.vars),
                        path: path_of(&parent, s),
                    });
                }
                infeasible.push(Infeasible { state: s, event: ev.name.clone(), params: b });
            }
            for f in fired.enabled {
                let t = match index.get(&f.target) {
                    Some(&t) => t,
                    None => {
                        let mut path = path_of(&parent, s);
                        path.push(ev.name.clone());
                        if let Some((var, val)) = model.domain_violation(&f.target) {
                            return Err(SemError::OutOfDomain {
                                event: ev.name.clone(),
                                variable: var,
                                value: val.to_string(),
                                state: src.display(&model.vars),
                                path: path_of(&parent, s),
                            });
                        }
                        if !opts.allow_invariant_violations && !model.invariant_holds(&f.target)? {
                            return Err(SemError::InvariantViolation {
                                state: f.target.display(&model.vars),
                                depth: path.len(),
                                path,
                            });
                        }
                        if states.len() >= opts.limits.max_states {
                            return Err(SemError::StateLimit { limit: opts.limits.max_states });
                        }
                        let t = states.len();
                        index.insert(f.target.clone(), t);
                        states.push(f.target);
                        parent.push(Some((s, ei)));
                        queue.push_back(t);
                        t
                    }
                };
                edges.push(Edge { source: s, event: ei, params: f.params, target: t });
            }
        }
    }

    Ok(StateGraph::new(
        model.name().to_string(),
        Some(model.clone()),
        model.vars.clone(),
        states,
        initial,
        edges,
        alphabet,
        opts.limits,
        infeasible,
    ))
}
