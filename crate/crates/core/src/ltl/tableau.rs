//! Formula to generalized Büchi automaton, by on-the-fly tableau expansion.
//!
//! Nodes are labelled with literals that constrain the letter read at that position.
//! A letter is an event name or `None`, the padding letter after a deadlock.

use std::collections::{BTreeSet, HashMap};

use crate::dsl::Formula;

pub type Fid = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Nnf {
    True,
    False,
    Pos(String),
    Neg(String),
    And(Fid, Fid),
    Or(Fid, Fid),
    Until(Fid, Fid),
    Release(Fid, Fid),
}

/// Hash-consed negation normal form.
#[derive(Debug, Default)]
pub struct Arena {
    pub nodes: Vec<Nnf>,
    index: HashMap<Nnf, Fid>,
}

impl Arena {
    fn intern(&mut self, n: Nnf) -> Fid {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(n.clone());
        self.index.insert(n, i);
        i
    }

    /// NNF of `f` (when `positive`) or of `!f`.
    pub fn nnf(&mut self, f: &Formula, positive: bool) -> Fid {
        match f {
            Formula::True => self.intern(if positive { Nnf::True } else { Nnf::False }),
            Formula::Atom(x) => self.intern(if positive { Nnf::Pos(x.clone()) } else { Nnf::Neg(x.clone()) }),
            Formula::Not(a) => self.nnf(a, !positive),
            Formula::Or(a, b) | Formula::And(a, b) => {
                let (x, y) = (self.nnf(a, positive), self.nnf(b, positive));
                let is_or = matches!(f, Formula::Or(..)) == positive;
                self.intern(if is_or { Nnf::Or(x, y) } else { Nnf::And(x, y) })
            }
            Formula::Until(a, b) => {
                let (x, y) = (self.nnf(a, positive), self.nnf(b, positive));
                self.intern(if positive { Nnf::Until(x, y) } else { Nnf::Release(x, y) })
            }
            Formula::Finally(a) => {
                let y = self.nnf(a, positive);
                if positive {
                    let t = self.intern(Nnf::True);
                    self.intern(Nnf::Until(t, y))
                } else {
                    let ff = self.intern(Nnf::False);
                    self.intern(Nnf::Release(ff, y))
                }
            }
            Formula::Globally(a) => {
                let y = self.nnf(a, positive);
                if positive {
                    let ff = self.intern(Nnf::False);
                    self.intern(Nnf::Release(ff, y))
                } else {
                    let t = self.intern(Nnf::True);
                    self.intern(Nnf::Until(t, y))
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Node {
    pub incoming: BTreeSet<usize>,
    pub old: BTreeSet<Fid>,
    pub next: BTreeSet<Fid>,
    /// Event this position must be (at most one).
    pub must: Option<String>,
    /// Events this position must not be.
    pub must_not: BTreeSet<String>,
}

impl Node {
    pub fn accepts(&self, letter: Option<&str>) -> bool {
        match (&self.must, letter) {
            (Some(m), Some(l)) if m != l => return false,
            (Some(_), None) => return false,
            _ => {}
        }
        match letter {
            Some(l) => !self.must_not.contains(l),
            None => true,
        }
    }
}

/// Generalized Büchi automaton; `INIT` in `incoming` marks initial nodes.
#[derive(Debug)]
pub struct Automaton {
    pub arena: Arena,
    pub nodes: Vec<Node>,
    /// One set per until-subformula: nodes that do not owe it.
    pub acceptance: Vec<BTreeSet<usize>>,
    /// `successors[q]`: nodes whose `incoming` contains `q`.
    pub successors: Vec<Vec<usize>>,
    pub initial: Vec<usize>,
}

pub const INIT: usize = usize::MAX;

struct Pending {
    incoming: BTreeSet<usize>,
    new: Vec<Fid>,
    old: BTreeSet<Fid>,
    next: BTreeSet<Fid>,
}

pub fn build(f: &Formula) -> Automaton {
    let mut arena = Arena::default();
    let root = arena.nnf(f, true);
    let mut nodes: Vec<Node> = vec![];
    let mut seen: HashMap<(BTreeSet<Fid>, BTreeSet<Fid>), usize> = HashMap::new();
    let mut stack = vec![Pending {
        incoming: [INIT].into(),
        new: vec![root],
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];

    while let Some(mut p) = stack.pop() {
        let Some(eta) = p.new.pop() else {
            let key = (p.old.clone(), p.next.clone());
            if let Some(&q) = seen.get(&key) {
                nodes[q].incoming.extend(p.incoming);
                continue;
            }
            let id = nodes.len();
            let (must, must_not) = literals(&arena, &p.old);
            nodes.push(Node { incoming: p.incoming, old: p.old, next: p.next.clone(), must, must_not });
            seen.insert(key, id);
            stack.push(Pending {
                incoming: [id].into(),
                new: p.next.into_iter().collect(),
                old: BTreeSet::new(),
                next: BTreeSet::new(),
            });
            continue;
        };
        if p.old.contains(&eta) {
            stack.push(p);
            continue;
        }
        match arena.nodes[eta].clone() {
            Nnf::False => {}
            Nnf::True => {
                p.old.insert(eta);
                stack.push(p);
            }
            Nnf::Pos(x) => {
                let clash = p.old.iter().any(|&o| match &arena.nodes[o] {
                    Nnf::Neg(y) => *y == x,
                    Nnf::Pos(y) => *y != x,
                    _ => false,
                });
                if !clash {
                    p.old.insert(eta);
                    stack.push(p);
                }
            }
            Nnf::Neg(x) => {
                let clash = p.old.iter().any(|&o| matches!(&arena.nodes[o], Nnf::Pos(y) if *y == x));
                if !clash {
                    p.old.insert(eta);
                    stack.push(p);
                }
            }
            Nnf::And(a, b) => {
                p.old.insert(eta);
                p.new.push(a);
                p.new.push(b);
                stack.push(p);
            }
            Nnf::Or(a, b) => {
                p.old.insert(eta);
                let mut q = clone_pending(&p);
                p.new.push(a);
                q.new.push(b);
                stack.push(q);
                stack.push(p);
            }
            Nnf::Until(a, b) => {
                // a U b  =  b  or  (a and X(a U b))
                p.old.insert(eta);
                let mut q = clone_pending(&p);
                p.new.push(a);
                p.next.insert(eta);
                q.new.push(b);
                stack.push(p);
                stack.push(q);
            }
            Nnf::Release(a, b) => {
                // a R b  =  (a and b)  or  (b and X(a R b))
                p.old.insert(eta);
                let mut q = clone_pending(&p);
                p.new.push(b);
                p.next.insert(eta);
                q.new.push(a);
                q.new.push(b);
                stack.push(p);
                stack.push(q);
            }
        }
    }

    let untils: Vec<(Fid, Fid)> = arena
        .nodes
        .iter()
        .enumerate()
        .filter_map(|(i, n)| match n {
            Nnf::Until(_, b) => Some((i, *b)),
            _ => None,
        })
        .collect();
    let acceptance = untils
        .iter()
        .map(|&(u, b)| {
            (0..nodes.len()).filter(|&q| !nodes[q].old.contains(&u) || nodes[q].old.contains(&b)).collect()
        })
        .collect();
    let mut successors = vec![vec![]; nodes.len()];
    let mut initial = vec![];
    for (q, n) in nodes.iter().enumerate() {
        for &i in &n.incoming {
            if i == INIT {
                initial.push(q);
            } else {
                successors[i].push(q);
            }
        }
    }
    Automaton { arena, nodes, acceptance, successors, initial }
}

fn clone_pending(p: &Pending) -> Pending {
    Pending { incoming: p.incoming.clone(), new: p.new.clone(), old: p.old.clone(), next: p.next.clone() }
}

fn literals(arena: &Arena, old: &BTreeSet<Fid>) -> (Option<String>, BTreeSet<String>) {
    let mut must = None;
    let mut must_not = BTreeSet::new();
    for &o in old {
        match &arena.nodes[o] {
            Nnf::Pos(x) => must = Some(x.clone()),
            Nnf::Neg(x) => {
                must_not.insert(x.clone());
            }
            _ => {}
        }
    }
    (must, must_not)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_formula;

    /// Does the automaton accept the ultimately periodic word `prefix (cycle)^ω`?
    fn accepts(a: &Automaton, prefix: &[Option<&str>], cycle: &[Option<&str>]) -> bool {
        // Product of the automaton with the lasso positions; look for an accepting cycle.
        let p = prefix.len();
        let n = p + cycle.len();
        let letter = |i: usize| if i < p { prefix[i] } else { cycle[i - p] };
        let next = |i: usize| if i + 1 < n { i + 1 } else { p };
        let states: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..a.nodes.len()).map(move |q| (i, q))).collect();
        let idx = |(i, q): (usize, usize)| i * a.nodes.len() + q;
        let succ = |(i, q): (usize, usize)| -> Vec<(usize, usize)> {
            if !a.nodes[q].accepts(letter(i)) {
                return vec![];
            }
            a.successors[q].iter().map(|&r| (next(i), r)).collect()
        };
        // reachable
        let mut reach = vec![false; states.len()];
        let mut stack: Vec<(usize, usize)> = a.initial.iter().map(|&q| (0, q)).collect();
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut reach[idx(s)], true) {
                continue;
            }
            stack.extend(succ(s));
        }
        // brute force: an accepting cycle exists iff some reachable state lies on a cycle
        // that meets every acceptance set; check via reachability closure
        let m = states.len();
        let mut r = vec![vec![false; m]; m];
        for &s in &states {
            for t in succ(s) {
                r[idx(s)][idx(t)] = true;
            }
        }
        for k in 0..m {
            for i in 0..m {
                if r[i][k] {
                    for j in 0..m {
                        if r[k][j] {
                            r[i][j] = true;
                        }
                    }
                }
            }
        }
        states.iter().any(|&s| {
            let si = idx(s);
            reach[si]
                && r[si][si]
                && a.acceptance.iter().all(|acc| {
                    states.iter().any(|&t| {
                        let ti = idx(t);
                        acc.contains(&t.1) && r[si][ti] && r[ti][si]
                    })
                })
        })
    }

    #[test]
    fn small_automata_agree_with_trace_semantics() {
        use crate::ltl::{holds_on_trace, Trace};
        let words: Vec<(Vec<&str>, Vec<&str>)> = vec![
            (vec![], vec!["a"]),
            (vec!["a"], vec!["b"]),
            (vec!["b", "a"], vec!["a", "b"]),
            (vec!["a", "a"], vec![]),
            (vec![], vec![]),
            (vec!["b"], vec![]),
        ];
        for src in ["GF[a]", "FG[a]", "[a] U [b]", "G([a] => F[b])", "!([a] U [b])", "F[b] & G![a]", "G[a] | F[b]"] {
            let f = parse_formula(src).unwrap();
            let aut = build(&f);
            for (p, c) in &words {
                let trace = if c.is_empty() { Trace::finite(p.clone()) } else { Trace::lasso(p.clone(), c.clone()) };
                let pre: Vec<Option<&str>> = p.iter().map(|s| Some(*s)).collect();
                let cyc: Vec<Option<&str>> = if c.is_empty() { vec![None] } else { c.iter().map(|s| Some(*s)).collect() };
                assert_eq!(accepts(&aut, &pre, &cyc), holds_on_trace(&trace, &f), "{src} on {trace}");
            }
        }
    }
}
