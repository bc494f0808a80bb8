//! Reference evaluator: bottom-up tables over trace positions.
//!
//! Deliberately shares nothing with `crate::ltl` beyond the `Formula` and `Trace` types.

use std::collections::HashMap;

use crate::dsl::Formula;
use crate::ltl::Trace;

/// Core syntax: `F a = true U a`, `G a = !(true U !a)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Core {
    True,
    Atom(String),
    Not(usize),
    Or(usize, usize),
    And(usize, usize),
    Until(usize, usize),
}

/// Subformulas in dependency order (children before parents).
#[derive(Debug, Default, Clone)]
pub struct CoreFormula {
    pub nodes: Vec<Core>,
    index: HashMap<Core, usize>,
    pub root: usize,
}

impl CoreFormula {
    pub fn new(f: &Formula) -> CoreFormula {
        let mut c = CoreFormula::default();
        c.root = c.lower(f);
        c
    }

    fn add(&mut self, n: Core) -> usize {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        self.nodes.push(n.clone());
        self.index.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn lower(&mut self, f: &Formula) -> usize {
        match f {
            Formula::True => self.add(Core::True),
            Formula::Atom(x) => self.add(Core::Atom(x.clone())),
            Formula::Not(a) => {
                let a = self.lower(a);
                self.add(Core::Not(a))
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                self.add(Core::Or(a, b))
            }
            Formula::And(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                self.add(Core::And(a, b))
            }
            Formula::Until(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                self.add(Core::Until(a, b))
            }
            Formula::Finally(a) => {
                let t = self.add(Core::True);
                let a = self.lower(a);
                self.add(Core::Until(t, a))
            }
            Formula::Globally(a) => {
                let t = self.add(Core::True);
                let a = self.lower(a);
                let na = self.add(Core::Not(a));
                let u = self.add(Core::Until(t, na));
                self.add(Core::Not(u))
            }
        }
    }

    pub fn untils(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| matches!(self.nodes[i], Core::Until(..))).collect()
    }
}

/// Does `u` satisfy `phi`? Finite traces are padded with a letter matching no atom.
pub fn oracle_holds_on(u: &Trace, phi: &Formula) -> bool {
    eval_core(&CoreFormula::new(phi), u)
}

pub fn eval_core(core: &CoreFormula, u: &Trace) -> bool {
    // Positions 0..n; position n-1 steps back to `back`.
    let (letters, back): (Vec<Option<&str>>, usize) = if u.cycle.is_empty() {
        let mut l: Vec<Option<&str>> = u.prefix.iter().map(|s| Some(s.as_str())).collect();
        l.push(None);
        (l, u.prefix.len())
    } else {
        let l = u.prefix.iter().chain(&u.cycle).map(|s| Some(s.as_str())).collect();
        (l, u.prefix.len())
    };
    let n = letters.len();
    let succ = |i: usize| if i + 1 == n { back } else { i + 1 };
    let mut table: Vec<Vec<bool>> = Vec::with_capacity(core.nodes.len());
    for node in &core.nodes {
        let row: Vec<bool> = match node {
            Core::True => vec![true; n],
            Core::Atom(x) => letters.iter().map(|l| *l == Some(x.as_str())).collect(),
            Core::Not(a) => table[*a].iter().map(|v| !v).collect(),
            Core::Or(a, b) => (0..n).map(|i| table[*a][i] || table[*b][i]).collect(),
            Core::And(a, b) => (0..n).map(|i| table[*a][i] && table[*b][i]).collect(),
            Core::Until(a, b) => {
                // least fixpoint of X = b | (a & X∘succ)
                let mut x = table[*b].clone();
                loop {
                    let next: Vec<bool> = (0..n).map(|i| table[*b][i] || (table[*a][i] && x[succ(i)])).collect();
                    if next == x {
                        break x;
                    }
                    x = next;
                }
            }
        };
        table.push(row);
    }
    table[core.root][0]
}
