use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write;
use std::sync::Arc;

use serde::Serialize;

use super::explore::Limits;
use super::model::Model;
use super::value::{State, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub source: usize,
    /// Index into `StateGraph::alphabet`.
    pub event: usize,
    pub params: Vec<(String, Value)>,
    pub target: usize,
}

/// An enabled (state, event, parameters) with no admissible outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Infeasible {
    pub state: usize,
    pub event: String,
    pub params: Vec<(String, Value)>,
}

/// Explicit reachable transition system.
#[derive(Debug, Clone)]
pub struct StateGraph {
    pub name: String,
    pub model: Option<Arc<Model>>,
    pub variables: Vec<String>,
    pub states: Vec<State>,
    pub initial: Vec<usize>,
    pub edges: Vec<Edge>,
    pub deadlocks: Vec<usize>,
    /// Every event of the machine, sorted, whether or not it ever fires.
    pub alphabet: Vec<String>,
    pub limits: Limits,
    pub infeasible: Vec<Infeasible>,
    out: Vec<Vec<usize>>,
}

impl StateGraph {
    /// Assemble a graph; outgoing lists and deadlocks are derived.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: String,
        model: Option<Arc<Model>>,
        variables: Vec<String>,
        states: Vec<State>,
        initial: Vec<usize>,
        edges: Vec<Edge>,
        alphabet: Vec<String>,
        limits: Limits,
        infeasible: Vec<Infeasible>,
    ) -> StateGraph {
        let mut out = vec![vec![]; states.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.source].push(i);
        }
        let deadlocks = (0..states.len()).filter(|&s| out[s].is_empty()).collect();
        StateGraph { name, model, variables, states, initial, edges, deadlocks, alphabet, limits, infeasible, out }
    }

    /// Unstructured graph over anonymous states `0..n`, for tests and random generation.
    pub fn from_labelled_edges(
        name: &str,
        n: usize,
        initial: Vec<usize>,
        edges: &[(usize, &str, usize)],
        alphabet: &[&str],
    ) -> StateGraph {
        let mut alpha: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
        for (_, e, _) in edges {
            if !alpha.iter().any(|a| a == e) {
                alpha.push(e.to_string());
            }
        }
        alpha.sort();
        alpha.dedup();
        let es = edges
            .iter()
            .map(|(s, e, t)| Edge {
                source: *s,
                event: alpha.binary_search_by(|a| a.as_str().cmp(e)).unwrap(),
                params: vec![],
                target: *t,
            })
            .collect();
        let states = (0..n).map(|i| State(vec![Value::Int(i as i64)])).collect();
        StateGraph::new(
            name.to_string(),
            None,
            vec!["s".into()],
            states,
            initial,
            es,
            alpha,
            Limits::default(),
            vec![],
        )
    }

    pub fn out_edges(&self, s: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.out[s].iter().map(move |&i| &self.edges[i])
    }

    pub fn out_edge_ids(&self, s: usize) -> &[usize] {
        &self.out[s]
    }

    pub fn event_name(&self, e: &Edge) -> &str {
        &self.alphabet[e.event]
    }

    pub fn event_index(&self, name: &str) -> Option<usize> {
        self.alphabet.binary_search_by(|a| a.as_str().cmp(name)).ok()
    }

    pub fn is_deadlock(&self, s: usize) -> bool {
        self.out[s].is_empty()
    }

    pub fn state_text(&self, s: usize) -> String {
        self.states[s].display(&self.variables)
    }

    /// Shortest edge path from some initial state to `target`.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        let mut parent: Vec<Option<Option<usize>>> = vec![None; self.states.len()];
        let mut queue = VecDeque::new();
        for &i in &self.initial {
            if parent[i].is_none() {
                parent[i] = Some(None);
                queue.push_back(i);
            }
        }
        while let Some(s) = queue.pop_front() {
            if s == target {
                let mut path = vec![];
                let mut cur = s;
                while let Some(Some(e)) = parent[cur] {
                    path.push(e);
                    cur = self.edges[e].source;
                }
                path.reverse();
                return Some(path);
            }
            for &e in &self.out[s] {
                let t = self.edges[e].target;
                if parent[t].is_none() {
                    parent[t] = Some(Some(e));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    pub fn event_path(&self, edges: &[usize]) -> Vec<String> {
        edges.iter().map(|&e| self.alphabet[self.edges[e].event].clone()).collect()
    }

    /// States reachable from `from` by reading `word` exactly.
    pub fn post_word(&self, from: &BTreeSet<usize>, word: &[String]) -> BTreeSet<usize> {
        let mut cur = from.clone();
        for ev in word {
            let Some(ei) = self.event_index(ev) else { return BTreeSet::new() };
            cur = cur
                .iter()
                .flat_map(|&s| self.out_edges(s).filter(move |e| e.event == ei).map(|e| e.target))
                .collect();
            if cur.is_empty() {
                break;
            }
        }
        cur
    }

    /// Is the trace a maximal execution of this graph?
    pub fn realizes(&self, prefix: &[String], cycle: &[String]) -> bool {
        let start: BTreeSet<usize> = self.initial.iter().copied().collect();
        let after = self.post_word(&start, prefix);
        if cycle.is_empty() {
            return after.iter().any(|&s| self.is_deadlock(s));
        }
        // Greatest set of states from which the cycle word can be read forever.
        let mut z: BTreeSet<usize> = (0..self.states.len()).collect();
        loop {
            let next: BTreeSet<usize> = z
                .iter()
                .copied()
                .filter(|&s| !self.post_word(&[s].into(), cycle).is_disjoint(&z))
                .collect();
            if next == z {
                break;
            }
            z = next;
        }
        !after.is_disjoint(&z)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct J<'a> {
            name: &'a str,
            variables: &'a [String],
            alphabet: &'a [String],
            max_states: usize,
            states: Vec<BTreeMap<&'a str, &'a Value>>,
            initial: &'a [usize],
            edges: Vec<JEdge<'a>>,
            deadlocks: &'a [usize],
        }
        #[derive(Serialize)]
        struct JEdge<'a> {
            source: usize,
            event: &'a str,
            params: BTreeMap<&'a str, &'a Value>,
            target: usize,
        }
        let j = J {
            name: &self.name,
            variables: &self.variables,
            alphabet: &self.alphabet,
            max_states: self.limits.max_states,
            states: self
                .states
                .iter()
                .map(|s| self.variables.iter().map(String::as_str).zip(s.0.iter()).collect())
                .collect(),
            initial: &self.initial,
            edges: self
                .edges
                .iter()
                .map(|e| JEdge {
                    source: e.source,
                    event: &self.alphabet[e.event],
                    params: e.params.iter().map(|(n, v)| (n.as_str(), v)).collect(),
                    target: e.target,
                })
                .collect(),
            deadlocks: &self.deadlocks,
        };
        serde_json::to_value(j).expect("graph serializes")
    }

    /// One `source event target` line per edge, preceded by `init` lines.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for i in &self.initial {
            let _ = writeln!(s, "init {i}");
        }
        for e in &self.edges {
            let _ = writeln!(s, "{} {} {}", e.source, self.alphabet[e.event], e.target);
        }
        s
    }
}
