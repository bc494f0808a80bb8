//! Seeded random graphs, formulas and traces for differential runs.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dsl::Formula;
use crate::ltl::Trace;
use crate::sem::StateGraph;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn letters(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// A graph with `1..=max_states` states, out-degree at most 3 and some deadlocks.
pub fn random_graph(r: &mut Rng8, max_states: usize, alphabet: &[String]) -> StateGraph {
    let n = r.gen_range(1..=max_states);
    let mut edges: Vec<(usize, &str, usize)> = vec![];
    for s in 0..n {
        let deg = if r.gen_bool(0.1) { 0 } else { r.gen_range(1..=3) };
        for _ in 0..deg {
            let ev = alphabet.choose(r).expect("nonempty alphabet");
            let t = r.gen_range(0..n);
            if !edges.contains(&(s, ev.as_str(), t)) {
                edges.push((s, ev.as_str(), t));
            }
        }
    }
    let alpha: Vec<&str> = alphabet.iter().map(String::as_str).collect();
    let mut g = StateGraph::from_labelled_edges("random", n, vec![0], &edges, &alpha);
    // Keep the reachable part so graphs resemble explored machines.
    let reach = reachable(&g);
    if reach.len() < n {
        let renum: Vec<Option<usize>> = {
            let mut v = vec![None; n];
            for (i, &s) in reach.iter().enumerate() {
                v[s] = Some(i);
            }
            v
        };
        let kept: Vec<(usize, &str, usize)> = edges
            .iter()
            .filter_map(|&(s, e, t)| Some((renum[s]?, e, renum[t]?)))
            .collect();
        g = StateGraph::from_labelled_edges("random", reach.len(), vec![0], &kept, &alpha);
    }
    g
}

fn reachable(g: &StateGraph) -> Vec<usize> {
    let mut seen = vec![false; g.states.len()];
    let mut stack = g.initial.clone();
    while let Some(s) = stack.pop() {
        if std::mem::replace(&mut seen[s], true) {
            continue;
        }
        stack.extend(g.out_edges(s).map(|e| e.target));
    }
    (0..seen.len()).filter(|&s| seen[s]).collect()
}

/// A formula with `depth()` at most `depth` over `alphabet`.
pub fn random_formula(r: &mut Rng8, alphabet: &[String], depth: usize) -> Formula {
    if depth == 0 || r.gen_bool(0.25) {
        return if r.gen_bool(0.1) { Formula::True } else { Formula::atom(alphabet.choose(r).unwrap().clone()) };
    }
    let d = depth - 1;
    match r.gen_range(0..7) {
        0 => Formula::not(random_formula(r, alphabet, d)),
        1 => Formula::or(random_formula(r, alphabet, d), random_formula(r, alphabet, d)),
        2 => Formula::and(random_formula(r, alphabet, d), random_formula(r, alphabet, d)),
        3 => Formula::until(random_formula(r, alphabet, d), random_formula(r, alphabet, d)),
        4 => Formula::finally(random_formula(r, alphabet, d)),
        5 => Formula::globally(random_formula(r, alphabet, d)),
        // `a => b` is `!a | b`, one level deeper on the left.
        _ if d >= 1 => Formula::implies(random_formula(r, alphabet, d - 1), random_formula(r, alphabet, d)),
        _ => Formula::not(random_formula(r, alphabet, d)),
    }
}

/// A finite trace or lasso of modest length.
pub fn random_trace(r: &mut Rng8, alphabet: &[String]) -> Trace {
    let word = |r: &mut Rng8, n: usize| -> Vec<String> { (0..n).map(|_| alphabet.choose(r).unwrap().clone()).collect() };
    let p = r.gen_range(0..5);
    let prefix = word(r, p);
    if r.gen_bool(0.3) {
        Trace::finite(prefix)
    } else {
        let c = r.gen_range(1..4);
        Trace::lasso(prefix, word(r, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = letters(3);
        let mut r1 = rng(7);
        let mut r2 = rng(7);
        assert_eq!(random_formula(&mut r1, &a, 5), random_formula(&mut r2, &a, 5));
        assert_eq!(random_graph(&mut r1, 20, &a).to_edge_list(), random_graph(&mut r2, 20, &a).to_edge_list());
        for _ in 0..200 {
            assert!(random_formula(&mut r1, &a, 5).depth() <= 5);
        }
    }
}
