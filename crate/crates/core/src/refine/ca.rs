//! Divergence freedom: `CA(C, O)` on a graph, and its derivation along a chain.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::ltl::Trace;
use crate::sem::{Limits, SemError, StateGraph};

use super::chain::RefinementChain;
use super::po::check_refinement_pair;
use super::strategy::{check_strategy, compose_renamings};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaVerdict {
    pub holds: bool,
    pub c: BTreeSet<String>,
    pub o: BTreeSet<String>,
    /// A lasso whose loop has a `C` event and no `O` event.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Trace>,
}

/// Does every infinite run with infinitely many `C` events also have infinitely many `O` events?
pub fn check_ca(g: &StateGraph, c: &BTreeSet<String>, o: &BTreeSet<String>) -> CaVerdict {
    let in_set = |set: &BTreeSet<String>, e: usize| set.contains(&g.alphabet[e]);
    let kept: Vec<Vec<usize>> = (0..g.states.len())
        .map(|s| g.out_edge_ids(s).iter().copied().filter(|&e| !in_set(o, g.edges[e].event)).collect())
        .collect();
    let comp = components(&kept, g);
    let mut witness = None;
    for (ei, e) in g.edges.iter().enumerate() {
        if in_set(c, e.event) && !in_set(o, e.event) && comp[e.source] == comp[e.target] {
            // Close the loop from the target back to the source without O edges.
            let back = path_within(&kept, g, &comp, e.target, e.source);
            let prefix = g.event_path(&g.path_to(e.source).expect("graph states are reachable"));
            let mut cycle = vec![g.alphabet[g.edges[ei].event].clone()];
            cycle.extend(g.event_path(&back));
            witness = Some(Trace::lasso(prefix, cycle).canonical());
            break;
        }
    }
    CaVerdict { holds: witness.is_none(), c: c.clone(), o: o.clone(), witness }
}

/// SCC id per state over the kept edges (Kosaraju).
fn components(kept: &[Vec<usize>], g: &StateGraph) -> Vec<usize> {
    let n = kept.len();
    let mut seen = vec![false; n];
    let mut order = vec![];
    for r in 0..n {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let mut stack = vec![(r, 0usize)];
        while let Some((v, k)) = stack.last_mut() {
            if let Some(&e) = kept[*v].get(*k) {
                *k += 1;
                let w = g.edges[e].target;
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
    for (v, es) in kept.iter().enumerate() {
        for &e in es {
            pred[g.edges[e].target].push(v);
        }
    }
    let mut comp = vec![usize::MAX; n];
    for (c, &r) in order.iter().rev().enumerate() {
        if comp[r] != usize::MAX {
            continue;
        }
        comp[r] = c;
        let mut stack = vec![r];
        while let Some(v) = stack.pop() {
            for &w in &pred[v] {
                if comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
    }
    comp
}

fn path_within(kept: &[Vec<usize>], g: &StateGraph, comp: &[usize], from: usize, to: usize) -> Vec<usize> {
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = BTreeSet::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![];
            let mut cur = v;
            while cur != from {
                let e = parent[&cur];
                path.push(e);
                cur = g.edges[e].source;
            }
            path.reverse();
            return path;
        }
        for &e in &kept[v] {
            let w = g.edges[e].target;
            if comp[w] == comp[from] && seen.insert(w) {
                parent.insert(w, e);
                queue.push_back(w);
            }
        }
    }
    unreachable!("{to} is in the component of {from}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub c_star: BTreeSet<String>,
    pub o_star: BTreeSet<String>,
    /// Strategy rules and every step's obligations hold.
    pub hypotheses_hold: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failed_hypotheses: Vec<String>,
    pub direct: CaVerdict,
    /// The hypotheses hold but the graph check fails.
    pub disagreement: bool,
}

/// Derive `C*` and `O*` for the last machine and compare the derived guarantee with the graph.
pub fn check_theorem1(chain: &RefinementChain, graph_n: &StateGraph, limits: Limits) -> Result<Theorem1Report, SemError> {
    let n = chain.n();
    let mut c_star = BTreeSet::new();
    for i in 0..=n {
        let g = compose_renamings(chain, i + 1).expect("level in range");
        c_star.extend(g.preimage(&chain.labels(i).convergent));
    }
    let g1 = compose_renamings(chain, 1).expect("level in range");
    let o_star = g1.preimage(&chain.labels(0).ordinary);

    let mut failed = vec![];
    let strategy = check_strategy(chain);
    for f in &strategy.findings {
        failed.push(format!("rule {}: {}", f.rule, f.message));
    }
    for (i, link) in chain.links.iter().enumerate() {
        let r = check_refinement_pair(&chain.machines[i], &chain.machines[i + 1], link, limits)?;
        for po in r.failing() {
            failed.push(format!("{po} fails for {} refining {}", r.concrete_machine, r.abstract_machine));
        }
    }
    let direct = check_ca(graph_n, &c_star, &o_star);
    let hypotheses_hold = failed.is_empty();
    Ok(Theorem1Report {
        disagreement: hypotheses_hold && !direct.holds,
        c_star,
        o_star,
        hypotheses_hold,
        failed_hypotheses: failed,
        direct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn loop_of_c_without_o() {
        let g = StateGraph::from_labelled_edges("t", 2, vec![0], &[(0, "o", 1), (1, "c", 1)], &[]);
        let v = check_ca(&g, &set(&["c"]), &set(&["o"]));
        assert!(!v.holds);
        assert_eq!(v.witness, Some(Trace::lasso(["o"], ["c"])));
        assert!(check_ca(&g, &set(&[]), &set(&["o"])).holds);
        let h = StateGraph::from_labelled_edges("h", 2, vec![0], &[(0, "c", 1), (1, "o", 0)], &[]);
        assert!(check_ca(&h, &set(&["c"]), &set(&["o"])).holds);
    }
}
