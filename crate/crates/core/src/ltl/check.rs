//! Model checking by product with the automaton of the negated formula.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::dsl::Formula;
use crate::sem::StateGraph;

use super::tableau::{self, Automaton};
use super::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    AutomatonProduct,
    LassoEnumeration,
    /// Exact search over graph states paired with truth values of until-subformulas.
    ValuationProduct,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Trace>,
    pub method: Method,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckLimits {
    pub max_product_states: usize,
}

impl Default for CheckLimits {
    fn default() -> Self {
        CheckLimits { max_product_states: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("product exceeds {limit} states")]
    ProductLimit { limit: usize },
}

/// Warnings for atoms that name no event of the graph.
pub fn foreign_atom_warnings(g: &StateGraph, phi: &Formula) -> Vec<String> {
    phi.alphabet()
        .into_iter()
        .filter(|a| g.event_index(a).is_none())
        .map(|a| format!("event `{a}` is not in the alphabet of {}; `[{a}]` never holds", g.name))
        .collect()
}

pub fn model_check(g: &StateGraph, phi: &Formula) -> Result<Verdict, CheckError> {
    model_check_with(g, phi, CheckLimits::default())
}

/// Product state: graph state and automaton node.
type P = (usize, usize);

struct Product {
    states: Vec<P>,
    index: HashMap<P, usize>,
    /// (target, letter); letter `None` is the deadlock padding.
    succ: Vec<Vec<(usize, Option<usize>)>>,
    initial: Vec<usize>,
    dist: Vec<usize>,
    parent: Vec<Option<(usize, Option<usize>)>>,
}

pub fn model_check_with(g: &StateGraph, phi: &Formula, limits: CheckLimits) -> Result<Verdict, CheckError> {
    let warnings = foreign_atom_warnings(g, phi);
    let aut = tableau::build(&Formula::not(phi.clone()));
    let prod = build_product(g, &aut, limits)?;
    let counterexample = find_accepting_lasso(&prod, &aut).map(|(prefix, cycle)| to_trace(g, &prefix, &cycle));
    if let Some(cx) = &counterexample {
        debug_assert!(!super::holds_on_trace(cx, phi), "counterexample {cx} satisfies {phi}");
    }
    Ok(Verdict { holds: counterexample.is_none(), counterexample, method: Method::AutomatonProduct, warnings })
}

fn build_product(g: &StateGraph, aut: &Automaton, limits: CheckLimits) -> Result<Product, CheckError> {
    let mut p = Product {
        states: vec![],
        index: HashMap::new(),
        succ: vec![],
        initial: vec![],
        dist: vec![],
        parent: vec![],
    };
    let mut queue = VecDeque::new();
    let add = |p: &mut Product, s: P, d: usize, par: Option<(usize, Option<usize>)>, queue: &mut VecDeque<usize>| {
        if let Some(&i) = p.index.get(&s) {
            return Ok(i);
        }
        if p.states.len() >= limits.max_product_states {
            return Err(CheckError::ProductLimit { limit: limits.max_product_states });
        }
        let i = p.states.len();
        p.states.push(s);
        p.index.insert(s, i);
        p.succ.push(vec![]);
        p.dist.push(d);
        p.parent.push(par);
        queue.push_back(i);
        Ok(i)
    };
    for &s in &g.initial {
        for &q in &aut.initial {
            let i = add(&mut p, (s, q), 0, None, &mut queue)?;
            if !p.initial.contains(&i) {
                p.initial.push(i);
            }
        }
    }
    while let Some(i) = queue.pop_front() {
        let (s, q) = p.states[i];
        let node = &aut.nodes[q];
        let d = p.dist[i] + 1;
        let mut out = vec![];
        if g.is_deadlock(s) {
            if node.accepts(None) {
                for &r in &aut.successors[q] {
                    let j = add(&mut p, (s, r), d, Some((i, None)), &mut queue)?;
                    out.push((j, None));
                }
            }
        } else {
            for e in g.out_edges(s) {
                if !node.accepts(Some(g.event_name(e))) {
                    continue;
                }
                for &r in &aut.successors[q] {
                    let j = add(&mut p, (e.target, r), d, Some((i, Some(e.event))), &mut queue)?;
                    out.push((j, Some(e.event)));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        p.succ[i] = out;
    }
    Ok(p)
}

/// Iterative Tarjan; returns the component id of each product state.
fn sccs(succ: &[Vec<(usize, Option<usize>)>]) -> Vec<usize> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = vec![];
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            if *k < succ[v].len() {
                let w = succ[v][*k].0;
                *k += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

type Steps = Vec<Option<usize>>;

fn find_accepting_lasso(p: &Product, aut: &Automaton) -> Option<(Steps, Steps)> {
    let comp = sccs(&p.succ);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![vec![]; ncomp];
    for (i, &c) in comp.iter().enumerate() {
        members[c].push(i);
    }
    let mut best: Option<(usize, usize)> = None; // (distance, entry state)
    for ms in &members {
        let nontrivial = ms.len() > 1 || p.succ[ms[0]].iter().any(|&(t, _)| t == ms[0]);
        if !nontrivial {
            continue;
        }
        let covers = aut.acceptance.iter().all(|acc| ms.iter().any(|&i| acc.contains(&p.states[i].1)));
        if !covers {
            continue;
        }
        let entry = *ms.iter().min_by_key(|&&i| (p.dist[i], i)).unwrap();
        let cand = (p.dist[entry], entry);
        if best.is_none_or(|b| cand < b) {
            best = Some(cand);
        }
    }
    let (_, entry) = best?;
    let c = comp[entry];

    let mut prefix = vec![];
    let mut cur = entry;
    while let Some((par, letter)) = p.parent[cur] {
        prefix.push(letter);
        cur = par;
    }
    prefix.reverse();

    let mut cycle = vec![];
    let mut at = entry;
    for acc in &aut.acceptance {
        let (path, end) = bfs_in(p, &comp, c, at, |i| acc.contains(&p.states[i].1), true);
        cycle.extend(path);
        at = end;
    }
    let (path, _) = bfs_in(p, &comp, c, at, |i| i == entry, !cycle.is_empty());
    cycle.extend(path);
    Some((prefix, cycle))
}

/// Shortest path inside component `c` from `from` to a state satisfying `goal`.
/// With `allow_empty`, `from` itself counts; otherwise at least one step is taken.
fn bfs_in(
    p: &Product,
    comp: &[usize],
    c: usize,
    from: usize,
    goal: impl Fn(usize) -> bool,
    allow_empty: bool,
) -> (Steps, usize) {
    if allow_empty && goal(from) {
        return (vec![], from);
    }
    let mut parent: HashMap<usize, (usize, Option<usize>)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut visited = std::collections::HashSet::from([from]);
    while let Some(v) = queue.pop_front() {
        for &(w, letter) in &p.succ[v] {
            if comp[w] != c {
                continue;
            }
            if goal(w) {
                let mut path = vec![letter];
                let mut cur = v;
                while cur != from {
                    let (par, l) = parent[&cur];
                    path.push(l);
                    cur = par;
                }
                path.reverse();
                return (path, w);
            }
            if visited.insert(w) {
                parent.insert(w, (v, letter));
                queue.push_back(w);
            }
        }
    }
    unreachable!("state {from} lies on a cycle of its component")
}

fn to_trace(g: &StateGraph, prefix: &Steps, cycle: &Steps) -> Trace {
    let names = |v: &Steps| -> Vec<String> { v.iter().flatten().map(|&e| g.alphabet[e].clone()).collect() };
    if cycle.iter().all(Option::is_none) {
        Trace::finite(names(prefix))
    } else {
        Trace::lasso(names(prefix), names(cycle)).canonical()
    }
}
