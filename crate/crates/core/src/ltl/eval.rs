//! Satisfaction on a single trace.
//!
//! A finite trace `w` is read as the infinite word `w` followed by a letter that matches no
//! atom, forever. So `[x]` is false on the empty suffix, `U`/`F` witnesses may be the empty
//! suffix, and `G [x]` is false on every finite trace.

use crate::dsl::Formula;

use super::trace::Trace;

struct Positions<'a> {
    trace: &'a Trace,
    len: usize,
    loop_to: usize,
}

impl<'a> Positions<'a> {
    fn new(trace: &'a Trace) -> Self {
        if trace.is_finite() {
            Positions { trace, len: trace.prefix.len() + 1, loop_to: trace.prefix.len() }
        } else {
            Positions { trace, len: trace.prefix.len() + trace.cycle.len(), loop_to: trace.prefix.len() }
        }
    }

    fn next(&self, i: usize) -> usize {
        if i + 1 < self.len {
            i + 1
        } else {
            self.loop_to
        }
    }

    /// Positions reachable from `i`, each once, in order.
    fn walk(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let start = i;
        let count = if i < self.loop_to { self.len - i } else { self.len - self.loop_to };
        let mut cur = start;
        (0..count).map(move |_| {
            let here = cur;
            cur = self.next(cur);
            here
        })
    }

    fn holds(&self, f: &Formula, i: usize) -> bool {
        match f {
            Formula::True => true,
            Formula::Atom(x) => self.trace.letter(i) == Some(x.as_str()),
            Formula::Not(a) => !self.holds(a, i),
            Formula::Or(a, b) => self.holds(a, i) || self.holds(b, i),
            Formula::And(a, b) => self.holds(a, i) && self.holds(b, i),
            Formula::Until(a, b) => {
                for j in self.walk(i) {
                    if self.holds(b, j) {
                        return true;
                    }
                    if !self.holds(a, j) {
                        return false;
                    }
                }
                false
            }
            Formula::Finally(a) => self.walk(i).any(|j| self.holds(a, j)),
            Formula::Globally(a) => self.walk(i).all(|j| self.holds(a, j)),
        }
    }
}

pub fn holds_on_trace(u: &Trace, phi: &Formula) -> bool {
    Positions::new(u).holds(phi, 0)
}

/// Satisfaction at suffix `i` (positions beyond the trace wrap into the cycle).
pub fn holds_at(u: &Trace, phi: &Formula, i: usize) -> bool {
    let p = Positions::new(u);
    let mut j = 0;
    for _ in 0..i {
        j = p.next(j);
    }
    p.holds(phi, j)
}
