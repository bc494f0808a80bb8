//! Brute-force model checking.
//!
//! First every simple-path prefix closed by a simple cycle, and every simple path into a
//! deadlock, is evaluated with the table-filling evaluator. Simple lassos alone can miss
//! counterexamples whose loop revisits a state (a figure eight through two cycles), so when
//! nothing is refuted the search falls back to an exact product of graph positions with
//! guessed truth values of the until-subformulas.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::ltl::{Method, Trace, Verdict};
use crate::sem::StateGraph;

use super::eval::{eval_core, Core, CoreFormula};
use crate::dsl::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleBounds {
    /// Candidate traces tried by the enumeration stage.
    pub max_candidates: usize,
    pub max_product_states: usize,
}

impl Default for OracleBounds {
    fn default() -> Self {
        OracleBounds { max_candidates: 5_000, max_product_states: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("enumeration bound exceeded ({what} > {limit}); verdict withheld")]
    BoundExceeded { what: &'static str, limit: usize },
}

/// Outcome of both stages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub verdict: Verdict,
    /// Stage one ran to completion without hitting `max_candidates`.
    pub enumeration_complete: bool,
    /// Stage one alone reached the final verdict.
    pub enumeration_exact: bool,
}

pub fn oracle_model_check(g: &StateGraph, phi: &Formula, bounds: OracleBounds) -> Result<Verdict, OracleError> {
    oracle_report(g, phi, bounds).map(|r| r.verdict)
}

pub fn oracle_report(g: &StateGraph, phi: &Formula, bounds: OracleBounds) -> Result<OracleReport, OracleError> {
    let core = CoreFormula::new(phi);
    let (found, complete) = enumerate(g, &core, bounds.max_candidates);
    if let Some(cx) = found {
        return Ok(OracleReport {
            verdict: Verdict { holds: false, counterexample: Some(cx), method: Method::LassoEnumeration, warnings: vec![] },
            enumeration_complete: complete,
            enumeration_exact: true,
        });
    }
    let cx = valuation_product(g, &core, bounds.max_product_states)?;
    let exact = complete && cx.is_none();
    Ok(OracleReport {
        verdict: Verdict { holds: cx.is_none(), counterexample: cx, method: Method::ValuationProduct, warnings: vec![] },
        enumeration_complete: complete,
        enumeration_exact: exact,
    })
}

/// Stage one. Returns the first refuting candidate and whether enumeration finished.
fn enumerate(g: &StateGraph, core: &CoreFormula, budget: usize) -> (Option<Trace>, bool) {
    let mut tried = 0usize;
    let mut on_path = vec![usize::MAX; g.states.len()];
    for &s0 in &g.initial {
        // frames: (state, next out-edge slot)
        let mut nodes = vec![s0];
        let mut edges: Vec<usize> = vec![];
        let mut slot = vec![0usize];
        on_path[s0] = 0;
        let mut refuted = None;
        if g.is_deadlock(s0) {
            tried += 1;
            if !eval_core(core, &Trace::finite(Vec::<String>::new())) {
                refuted = Some(Trace::finite(Vec::<String>::new()));
            }
        }
        while refuted.is_none() && !nodes.is_empty() {
            if tried > budget {
                for &n in &nodes {
                    on_path[n] = usize::MAX;
                }
                return (None, false);
            }
            let depth = nodes.len() - 1;
            let s = nodes[depth];
            let outs = g.out_edge_ids(s);
            if slot[depth] == outs.len() {
                on_path[s] = usize::MAX;
                nodes.pop();
                slot.pop();
                edges.pop();
                continue;
            }
            let e = outs[slot[depth]];
            slot[depth] += 1;
            let t = g.edges[e].target;
            if on_path[t] != usize::MAX {
                let j = on_path[t];
                let names = g.event_path(&edges);
                let mut cycle = names[j..].to_vec();
                cycle.push(g.event_name(&g.edges[e]).to_string());
                let u = Trace { prefix: names[..j].to_vec(), cycle };
                tried += 1;
                if !eval_core(core, &u) {
                    refuted = Some(u);
                }
                continue;
            }
            edges.push(e);
            nodes.push(t);
            slot.push(0);
            on_path[t] = depth + 1;
            if g.is_deadlock(t) {
                let u = Trace::finite(g.event_path(&edges));
                tried += 1;
                if !eval_core(core, &u) {
                    refuted = Some(u);
                }
            }
        }
        for &n in &nodes {
            on_path[n] = usize::MAX;
        }
        if let Some(u) = refuted {
            return (Some(u.canonical()), true);
        }
    }
    (None, true)
}

/// A position of a run: an edge taken, or the padding loop at a deadlock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Pos {
    Edge(usize),
    Pad(usize),
}

struct Valuation<'a> {
    g: &'a StateGraph,
    core: &'a CoreFormula,
    untils: Vec<usize>,
    /// Bit index of each until node.
    bit: HashMap<usize, usize>,
}

impl Valuation<'_> {
    fn letter(&self, p: Pos) -> Option<&str> {
        match p {
            Pos::Edge(e) => Some(self.g.event_name(&self.g.edges[e])),
            Pos::Pad(_) => None,
        }
    }

    /// Truth of every subformula at a position, reading until values from `v`.
    fn row(&self, p: Pos, v: u64) -> Vec<bool> {
        let l = self.letter(p);
        let mut r: Vec<bool> = Vec::with_capacity(self.core.nodes.len());
        for (i, n) in self.core.nodes.iter().enumerate() {
            let x = match n {
                Core::True => true,
                Core::Atom(a) => l == Some(a.as_str()),
                Core::Not(a) => !r[*a],
                Core::Or(a, b) => r[*a] || r[*b],
                Core::And(a, b) => r[*a] && r[*b],
                Core::Until(..) => v >> self.bit[&i] & 1 == 1,
            };
            r.push(x);
        }
        r
    }

    /// `v` must agree with the unfolding `a U b = b | (a & X(a U b))`. Returns the successor
    /// bits that are forced to 1 and the bits left free; `None` if `v` is inconsistent.
    fn step(&self, row: &[bool], v: u64) -> Option<(u64, u64)> {
        let (mut val, mut free) = (0u64, 0u64);
        for (j, &u) in self.untils.iter().enumerate() {
            let Core::Until(a, b) = self.core.nodes[u] else { unreachable!() };
            let set = v >> j & 1 == 1;
            match (row[b], set, row[a]) {
                (true, false, _) => return None,
                (true, true, _) => free |= 1 << j,
                (false, true, false) => return None,
                (false, true, true) => val |= 1 << j,
                (false, false, true) => {}
                (false, false, false) => free |= 1 << j,
            }
        }
        Some((val, free))
    }

    fn next_positions(&self, p: Pos) -> Vec<Pos> {
        let s = match p {
            Pos::Edge(e) => self.g.edges[e].target,
            Pos::Pad(s) => return vec![Pos::Pad(s)],
        };
        self.start_positions(s)
    }

    fn start_positions(&self, s: usize) -> Vec<Pos> {
        if self.g.is_deadlock(s) {
            vec![Pos::Pad(s)]
        } else {
            self.g.out_edge_ids(s).iter().map(|&e| Pos::Edge(e)).collect()
        }
    }
}

/// Every assignment of the `free` bits on top of `base`.
fn subsets(base: u64, free: u64) -> impl Iterator<Item = u64> {
    let mut sub = free;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = base | sub;
        if sub == 0 {
            done = true;
        } else {
            sub = (sub - 1) & free;
        }
        Some(out)
    })
}

/// Stage two: exact search for a run whose guessed valuation refutes the formula.
fn valuation_product(g: &StateGraph, core: &CoreFormula, limit: usize) -> Result<Option<Trace>, OracleError> {
    let untils = core.untils();
    if untils.len() > 63 {
        return Err(OracleError::BoundExceeded { what: "until-subformulas", limit: 63 });
    }
    let bit = untils.iter().enumerate().map(|(j, &u)| (u, j)).collect();
    let k = untils.len();
    let val = Valuation { g, core, untils, bit };

    let mut nodes: Vec<(Pos, u64)> = vec![];
    let mut rows: Vec<Vec<bool>> = vec![];
    let mut index: HashMap<(Pos, u64), usize> = HashMap::new();
    let mut succ: Vec<Vec<usize>> = vec![];
    let mut parent: Vec<Option<usize>> = vec![];
    let mut queue = VecDeque::new();
    let mut intern = |n: (Pos, u64), par: Option<usize>, nodes: &mut Vec<(Pos, u64)>, rows: &mut Vec<Vec<bool>>, succ: &mut Vec<Vec<usize>>, parent: &mut Vec<Option<usize>>, queue: &mut VecDeque<usize>| -> Result<Option<usize>, OracleError> {
        if let Some(&i) = index.get(&n) {
            return Ok(Some(i));
        }
        let row = val.row(n.0, n.1);
        if val.step(&row, n.1).is_none() {
            return Ok(None);
        }
        if nodes.len() >= limit {
            return Err(OracleError::BoundExceeded { what: "valuation product states", limit });
        }
        let i = nodes.len();
        nodes.push(n);
        rows.push(row);
        succ.push(vec![]);
        parent.push(par);
        index.insert(n, i);
        queue.push_back(i);
        Ok(Some(i))
    };

    let all = if k == 0 { 0 } else { u64::MAX >> (64 - k) };
    let mut initial = vec![];
    for &s in &g.initial {
        for p in val.start_positions(s) {
            for v in subsets(0, all) {
                if val.row(p, v)[core.root] {
                    continue;
                }
                if let Some(i) = intern((p, v), None, &mut nodes, &mut rows, &mut succ, &mut parent, &mut queue)? {
                    initial.push(i);
                }
            }
        }
    }
    while let Some(i) = queue.pop_front() {
        let (p, v) = nodes[i];
        let (forced, free) = val.step(&rows[i], v).expect("only consistent nodes are stored");
        let mut out = vec![];
        for q in val.next_positions(p) {
            for w in subsets(forced, free) {
                if let Some(j) = intern((q, w), Some(i), &mut nodes, &mut rows, &mut succ, &mut parent, &mut queue)? {
                    out.push(j);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        succ[i] = out;
    }

    // Node accepts until j when it does not owe it.
    let accepting = |i: usize, j: usize| {
        let Core::Until(_, b) = core.nodes[val.untils[j]] else { unreachable!() };
        nodes[i].1 >> j & 1 == 0 || rows[i][b]
    };
    let comp = kosaraju(&succ);
    let n = nodes.len();
    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        members.entry(comp[i]).or_default().push(i);
    }
    // Nodes are numbered in BFS order, so the smallest member is closest to an initial node.
    let mut candidates: Vec<&Vec<usize>> = members.values().collect();
    candidates.sort_by_key(|ms| ms[0]);
    for ms in candidates {
        let c = comp[ms[0]];
        let nontrivial = ms.len() > 1 || succ[ms[0]].contains(&ms[0]);
        if !nontrivial || !(0..k).all(|j| ms.iter().any(|&i| accepting(i, j))) {
            continue;
        }
        let entry = ms[0];
        let mut prefix = vec![];
        let mut cur = entry;
        while let Some(par) = parent[cur] {
            prefix.push(par);
            cur = par;
        }
        prefix.reverse();
        // Loop: visit one accepting node per until, then return to entry.
        let mut cycle = vec![];
        let mut at = entry;
        for j in 0..k {
            let path = bfs_within(&succ, &comp, c, at, |i| accepting(i, j), true);
            if let Some(&last) = path.last() {
                at = last;
            }
            cycle.extend(path);
        }
        let back = bfs_within(&succ, &comp, c, at, |i| i == entry, false);
        // `back` ends at entry; the cycle starts at entry.
        let mut loop_nodes = vec![entry];
        loop_nodes.extend(cycle);
        loop_nodes.extend(&back[..back.len() - 1]);
        let names = |ids: &[usize]| -> Vec<String> {
            ids.iter().filter_map(|&i| val.letter(nodes[i].0).map(str::to_string)).collect()
        };
        let trace = if loop_nodes.iter().all(|&i| matches!(nodes[i].0, Pos::Pad(_))) {
            Trace::finite(names(&prefix))
        } else {
            Trace { prefix: names(&prefix), cycle: names(&loop_nodes) }.canonical()
        };
        return Ok(Some(trace));
    }
    Ok(None)
}

/// Path (excluding `from`, including the goal) inside component `c`.
fn bfs_within(succ: &[Vec<usize>], comp: &[usize], c: usize, from: usize, goal: impl Fn(usize) -> bool, allow_empty: bool) -> Vec<usize> {
    if allow_empty && goal(from) {
        return vec![];
    }
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &w in &succ[v] {
            if comp[w] != c {
                continue;
            }
            if goal(w) {
                let mut path = vec![w];
                let mut cur = v;
                while cur != from {
                    path.push(cur);
                    cur = parent[&cur];
                }
                path.reverse();
                return path;
            }
            if w != from && !parent.contains_key(&w) {
                parent.insert(w, v);
                queue.push_back(w);
            }
        }
    }
    unreachable!("node {from} lies on a cycle of its component")
}

/// Strongly connected components by two depth-first passes.
fn kosaraju(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for r in 0..n {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let mut stack = vec![(r, 0usize)];
        while let Some((v, k)) = stack.last_mut() {
            if let Some(&w) = succ[*v].get(*k) {
                *k += 1;
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(*v);
                stack.pop();
            }
        }
    }
    let mut pred = vec![vec![]; n];
    for (v, ws) in succ.iter().enumerate() {
        for &w in ws {
            pred[w].push(v);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &r in order.iter().rev() {
        if comp[r] != usize::MAX {
            continue;
        }
        let mut stack = vec![r];
        comp[r] = c;
        while let Some(v) = stack.pop() {
            for &w in &pred[v] {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
        c += 1;
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_formula;

    #[test]
    fn figure_eight_needs_the_product() {
        // Two loops through state 0; only a run alternating between them has both GF a and GF c.
        let g = StateGraph::from_labelled_edges(
            "eight",
            3,
            vec![0],
            &[(0, "a", 1), (1, "b", 0), (0, "c", 2), (2, "d", 0)],
            &[],
        );
        let phi = parse_formula("!(GF[a] & GF[c])").unwrap();
        let r = oracle_report(&g, &phi, OracleBounds::default()).unwrap();
        assert!(!r.verdict.holds);
        assert_eq!(r.verdict.method, Method::ValuationProduct);
        assert!(!r.enumeration_exact);
        let cx = r.verdict.counterexample.unwrap();
        assert!(!super::super::oracle_holds_on(&cx, &phi));
        assert!(g.realizes(&cx.prefix, &cx.cycle));
    }

    #[test]
    fn simple_cases() {
        let g = StateGraph::from_labelled_edges("t", 2, vec![0], &[(0, "a", 1), (1, "b", 1)], &[]);
        let holds = |s: &str| oracle_model_check(&g, &parse_formula(s).unwrap(), OracleBounds::default()).unwrap().holds;
        assert!(holds("true"));
        assert!(holds("[a]"));
        assert!(holds("FG[b]"));
        assert!(!holds("GF[a]"));
        let d = StateGraph::from_labelled_edges("d", 2, vec![0], &[(0, "a", 1)], &[]);
        let r = oracle_model_check(&d, &parse_formula("F[b]").unwrap(), OracleBounds::default()).unwrap();
        assert_eq!(r.counterexample, Some(Trace::finite(["a"])));
    }
}
