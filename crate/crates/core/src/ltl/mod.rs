//! Event-based LTL: traces, satisfaction, model checking.

pub mod check;
pub mod eval;
pub mod tableau;
pub mod trace;

use std::collections::BTreeSet;

pub use check::{model_check, model_check_with, CheckError, CheckLimits, Method, Verdict};
pub use eval::holds_on_trace;
pub use trace::{Trace, TraceKind};

use crate::dsl::Formula;

/// Events mentioned in a formula.
pub fn alphabet(phi: &Formula) -> BTreeSet<String> {
    phi.alphabet()
}

pub fn project_trace(u: &Trace, beta: &BTreeSet<String>) -> Trace {
    u.project(beta)
}
