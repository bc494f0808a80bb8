//! Event-B style machines, event-based LTL and refinement preservation checks.

pub mod dsl;
pub mod exec;
pub mod sem;
pub mod ltl;
pub mod refine;
pub mod oracle;
pub mod preserve;
