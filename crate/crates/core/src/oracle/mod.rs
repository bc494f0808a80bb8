//! Brute-force reference implementations, used only to cross-check `ltl`.
//!
//! `eval` and `search` never call into `crate::ltl` satisfaction or automaton code; the two
//! sides share only the `Formula`, `Trace` and `Verdict` types. `corpus` runs both and compares.

pub mod corpus;
pub mod eval;
pub mod random;
pub mod search;

pub use corpus::{
    corpus_root, cross_validate, load_corpus, random_differential, CorpusEntry, CrossReport, CrossRow, ExpectedVerdict,
    RandomCase, RandomReport, Source,
};
pub use eval::oracle_holds_on;
pub use search::{oracle_model_check, oracle_report, OracleBounds, OracleError, OracleReport};
