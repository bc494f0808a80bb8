//! The bundled corpus and the differential run over it.
//!
//! Each directory under the corpus root may hold an `expected.json`:
//!
//! ```json
//! {
//!   "properties": "properties.ltl",
//!   "machines": { "VM1": "vm1.eb" },
//!   "verdicts": { "phi1": { "VM1": { "holds": true, "source": "reference" } } }
//! }
//! ```
//!
//! `source` is `reference` for verdicts taken from the published case study and `derived`
//! (with a `note`) for verdicts worked out here.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dsl::{parse_property_file, Formula, NamedFormula};
use crate::exec::Exec;
use crate::ltl::{holds_on_trace, model_check, Verdict};
use crate::refine::{load_model, ChainError};
use crate::sem::{explore, Limits, Model, StateGraph};

use super::random::{letters, random_formula, random_graph, rng};
use super::search::{oracle_report, OracleBounds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Reference,
    Derived,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedVerdict {
    pub holds: bool,
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
struct ExpectedFile {
    #[serde(default)]
    properties: Option<String>,
    #[serde(default)]
    machines: BTreeMap<String, String>,
    #[serde(default)]
    chain: Option<String>,
    #[serde(default)]
    verdicts: BTreeMap<String, BTreeMap<String, ExpectedVerdict>>,
    /// Consumed by the refinement tests; ignored here.
    #[serde(default, rename = "mutants")]
    _mutants: serde_json::Value,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub dir: PathBuf,
    pub machines: BTreeMap<String, PathBuf>,
    pub chain: Option<PathBuf>,
    pub properties: Vec<NamedFormula>,
    /// property -> machine -> verdict
    pub verdicts: BTreeMap<String, BTreeMap<String, ExpectedVerdict>>,
}

/// `EBLTL_CORPUS` if set, else the corpus shipped with the sources.
pub fn corpus_root() -> PathBuf {
    match std::env::var_os("EBLTL_CORPUS") {
        Some(p) => PathBuf::from(p),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus"),
    }
}

fn manifest_err(path: &Path, message: impl Into<String>) -> ChainError {
    ChainError::Manifest { path: path.display().to_string(), message: message.into() }
}

impl CorpusEntry {
    pub fn load(dir: &Path) -> Result<CorpusEntry, ChainError> {
        let path = dir.join("expected.json");
        let text = std::fs::read_to_string(&path)
            .map_err(|e| ChainError::Io { path: path.display().to_string(), message: e.to_string() })?;
        let f: ExpectedFile = serde_json::from_str(&text).map_err(|e| manifest_err(&path, e.to_string()))?;
        let properties = match &f.properties {
            Some(p) => {
                let pp = dir.join(p);
                let src = std::fs::read_to_string(&pp)
                    .map_err(|e| ChainError::Io { path: pp.display().to_string(), message: e.to_string() })?;
                parse_property_file(&src).map_err(|error| ChainError::Parse { file: pp.display().to_string(), error })?
            }
            None => vec![],
        };
        for (prop, row) in &f.verdicts {
            if !properties.iter().any(|p| &p.name == prop) {
                return Err(manifest_err(&path, format!("verdict for unknown property `{prop}`")));
            }
            for (m, v) in row {
                if !f.machines.contains_key(m) {
                    return Err(manifest_err(&path, format!("verdict for unknown machine `{m}`")));
                }
                if v.source == Source::Derived && v.note.as_deref().unwrap_or("").is_empty() {
                    return Err(manifest_err(&path, format!("derived verdict {prop}/{m} needs a note")));
                }
            }
        }
        Ok(CorpusEntry {
            name: dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            dir: dir.to_path_buf(),
            machines: f.machines.iter().map(|(k, v)| (k.clone(), dir.join(v))).collect(),
            chain: f.chain.map(|c| dir.join(c)),
            properties,
            verdicts: f.verdicts,
        })
    }

    pub fn expected(&self, property: &str, machine: &str) -> Option<&ExpectedVerdict> {
        self.verdicts.get(property)?.get(machine)
    }
}

/// Every corpus directory that lists machines, in name order.
pub fn load_corpus(root: &Path) -> Result<Vec<CorpusEntry>, ChainError> {
    let rd = std::fs::read_dir(root)
        .map_err(|e| ChainError::Io { path: root.display().to_string(), message: e.to_string() })?;
    let mut dirs: Vec<PathBuf> =
        rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.join("expected.json").is_file()).collect();
    dirs.sort();
    let mut out = vec![];
    for d in dirs {
        let e = CorpusEntry::load(&d)?;
        if !e.machines.is_empty() {
            out.push(e);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossRow {
    pub entry: String,
    pub machine: String,
    pub property: String,
    pub states: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<bool>,
    pub checker: Verdict,
    /// `None` when the oracle withheld its verdict.
    pub oracle: Option<Verdict>,
    pub enumeration_exact: bool,
    /// Checker and oracle agree, and a counterexample (if any) refutes the property.
    pub agree: bool,
    /// The checker matches the expected verdict, or there is none.
    pub matches_expected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossReport {
    pub rows: Vec<CrossRow>,
    pub disagreements: usize,
    pub unexpected: usize,
}

impl CrossReport {
    pub fn passed(&self) -> bool {
        self.disagreements == 0 && self.unexpected == 0
    }
}

fn row(
    entry: &CorpusEntry,
    machine: &str,
    g: &StateGraph,
    p: &NamedFormula,
    bounds: OracleBounds,
) -> CrossRow {
    let expected = entry.expected(&p.name, machine).map(|v| v.holds);
    let mut r = CrossRow {
        entry: entry.name.clone(),
        machine: machine.to_string(),
        property: p.name.clone(),
        states: g.states.len(),
        expected,
        checker: Verdict { holds: false, counterexample: None, method: crate::ltl::Method::AutomatonProduct, warnings: vec![] },
        oracle: None,
        enumeration_exact: false,
        agree: false,
        matches_expected: false,
        error: None,
    };
    match model_check(g, &p.formula) {
        Ok(v) => r.checker = v,
        Err(e) => {
            r.error = Some(e.to_string());
            return r;
        }
    }
    match oracle_report(g, &p.formula, bounds) {
        Ok(o) => {
            r.enumeration_exact = o.enumeration_exact;
            r.oracle = Some(o.verdict);
        }
        Err(e) => r.error = Some(e.to_string()),
    }
    let valid_cx = |v: &Verdict| match &v.counterexample {
        Some(cx) => !holds_on_trace(cx, &p.formula) && g.realizes(&cx.prefix, &cx.cycle),
        None => v.holds,
    };
    r.agree = r.oracle.as_ref().is_some_and(|o| o.holds == r.checker.holds && valid_cx(o)) && valid_cx(&r.checker);
    r.matches_expected = expected.is_none_or(|h| h == r.checker.holds);
    r
}

/// Checker against oracle on every machine and property of every entry.
pub fn cross_validate(
    entries: &[CorpusEntry],
    limits: Limits,
    bounds: OracleBounds,
    exec: Exec,
) -> Result<CrossReport, ChainError> {
    let mut jobs: Vec<(&CorpusEntry, String, Arc<Model>)> = vec![];
    for e in entries {
        for (name, file) in &e.machines {
            jobs.push((e, name.clone(), Arc::new(load_model(file)?)));
        }
    }
    let graphs = exec.map(&jobs, |(_, _, m)| explore(m, limits));
    let mut tasks = vec![];
    for ((e, name, _), g) in jobs.iter().zip(graphs) {
        let g = Arc::new(g?);
        for p in &e.properties {
            tasks.push((*e, name.clone(), g.clone(), p));
        }
    }
    let rows = exec.map(&tasks, |(e, m, g, p)| row(e, m, g, p, bounds));
    Ok(CrossReport {
        disagreements: rows.iter().filter(|r| !r.agree).count(),
        unexpected: rows.iter().filter(|r| !r.matches_expected).count(),
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomCase {
    pub index: usize,
    pub formula: Formula,
    pub graph: String,
    pub checker: Option<Verdict>,
    pub oracle: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomReport {
    pub seed: u64,
    pub pairs: usize,
    pub max_alphabet: usize,
    pub max_depth: usize,
    pub max_states: usize,
    /// Only the cases that disagree or fail.
    pub disagreements: Vec<RandomCase>,
}

impl RandomReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// `pairs` seeded (graph, formula) pairs: alphabets of 1..=4 letters, depth <= 5, <= 50 states.
pub fn random_differential(pairs: usize, seed: u64, bounds: OracleBounds, exec: Exec) -> RandomReport {
    let mut r = rng(seed);
    let cases: Vec<(StateGraph, Formula)> = (0..pairs)
        .map(|i| {
            let a = letters(1 + i % 4);
            let g = random_graph(&mut r, 50, &a);
            let phi = random_formula(&mut r, &a, 5);
            (g, phi)
        })
        .collect();
    let results = exec.map_range(pairs, |i| {
        let (g, phi) = &cases[i];
        let checker = model_check(g, phi);
        let oracle = oracle_report(g, phi, bounds).map(|o| o.verdict);
        let valid = |v: &Verdict| match &v.counterexample {
            Some(cx) => !holds_on_trace(cx, phi) && g.realizes(&cx.prefix, &cx.cycle),
            None => v.holds,
        };
        let ok = match (&checker, &oracle) {
            (Ok(c), Ok(o)) => c.holds == o.holds && valid(c) && valid(o),
            _ => false,
        };
        (!ok).then(|| RandomCase {
            index: i,
            formula: phi.clone(),
            graph: g.to_edge_list(),
            error: checker.as_ref().err().map(ToString::to_string).or(oracle.as_ref().err().map(ToString::to_string)),
            checker: checker.ok(),
            oracle: oracle.ok(),
        })
    });
    RandomReport {
        seed,
        pairs,
        max_alphabet: 4,
        max_depth: 5,
        max_states: 50,
        disagreements: results.into_iter().flatten().collect(),
    }
}
