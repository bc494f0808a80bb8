//! Transition-system semantics: evaluation, firing, reachability.

pub mod checks;
pub mod eval;
pub mod explore;
pub mod graph;
pub mod model;
pub mod value;

pub use checks::{check_deadlock_free, check_invariant, DeadlockVerdict, InvariantVerdict};
pub use explore::{explore, explore_with, ExploreOptions, Limits};
pub use graph::{Edge, StateGraph};
pub use model::Model;
pub use value::{State, Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemError {
    #[error(transparent)]
    Parse(#[from] crate::dsl::ParseError),
    #[error("{context}: {message}")]
    Eval { context: String, message: String },
    #[error("invariant violated at depth {depth} in state {state} (path: {})", path_text(.path))]
    InvariantViolation { state: String, depth: usize, path: Vec<String> },
    #[error("event `{event}` assigns {variable} := {value}, outside its declared domain, from state {state} (path: {})", path_text(.path))]
    OutOfDomain { event: String, variable: String, value: String, state: String, path: Vec<String> },
    #[error("event `{event}` is enabled with parameters {params} in state {state} but has no admissible choice (path: {})", path_text(.path))]
    Infeasible { event: String, params: String, state: String, path: Vec<String> },
    #[error("state limit of {limit} exceeded")]
    StateLimit { limit: usize },
}

fn path_text(path: &[String]) -> String {
    if path.is_empty() {
        "init".into()
    } else {
        format!("init, {}", path.join(", "))
    }
}

pub(crate) fn params_text(params: &[(String, Value)]) -> String {
    let parts: Vec<String> = params.iter().map(|(n, v)| format!("{n}={v}")).collect();
    format!("({})", parts.join(", "))
}
