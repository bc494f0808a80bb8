//! Refinement steps and chains: obligations, labelling strategy, divergence freedom.

pub mod ca;
pub mod chain;
pub mod po;
pub mod renaming;
pub mod strategy;

pub use ca::{check_ca, check_theorem1, CaVerdict, Theorem1Report};
pub use chain::{load_model, ChainError, ChainManifest, LabelSets, Link, Linking, RefinementChain, StepManifest};
pub use po::{check_refinement_pair, Po, PoReport, PoResult, Witness};
pub use renaming::RenamingMap;
pub use strategy::{check_strategy, compose_renamings, Finding, LevelError, StrategyReport};
