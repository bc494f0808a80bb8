//! Carrying properties down a refinement chain.

pub mod beta;
pub mod lemmas;
pub mod translate;

pub use beta::{check_beta_dependent, check_beta_dependent_with, is_witness, BetaBounds, BetaError, DependenceMethod, DependenceStatus, DependenceVerdict};
pub use lemmas::{apply_lemma_gf, apply_preservation, Certificate, Hypothesis, PreserveError, PreserveOptions};
pub use translate::{complete_renaming, map_trace, translate_formula, OutsideDomain};
