//! Refinement chains and their JSON manifests.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dsl::typecheck::{check_linking, merge_symbols, shared_variables, typecheck_with_abstract};
use crate::dsl::{parse_expr, Expr, ParseError, Status, Symbols};
use crate::sem::{Model, SemError, State};

use super::renaming::RenamingMap;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepManifest {
    /// Concrete event to abstract event. When absent, `refines` clauses are used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub renaming: Option<BTreeMap<String, String>>,
    /// Extra gluing predicate, conjoined with the concrete machine's `linking` clause.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linking: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainManifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Machine files, most abstract first, relative to the manifest.
    pub machines: Vec<String>,
    /// One entry per refinement step; may be shorter than `machines.len() - 1`.
    #[serde(default)]
    pub steps: Vec<StepManifest>,
    /// Property file, relative to the manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub properties: Option<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChainError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Manifest { path: String, message: String },
    #[error("{file}: {error}")]
    Parse { file: String, error: ParseError },
    #[error("{0}")]
    Structure(String),
    #[error(transparent)]
    Sem(#[from] SemError),
}

/// The gluing invariant of one step.
#[derive(Debug, Clone)]
pub struct Linking {
    /// Variables of both machines, compared for equality.
    pub shared: Vec<String>,
    pub clauses: Vec<Expr>,
    /// Symbols of both machines, for evaluating `clauses`.
    pub syms: Symbols,
    shared_idx: Vec<(usize, usize)>,
}

impl Linking {
    pub fn build(concrete: &Model, abs: &Model, extra: Option<&str>) -> Result<Linking, ChainError> {
        let perr = |error: ParseError| ChainError::Parse { file: concrete.name().to_string(), error };
        let shared = shared_variables(&concrete.syms, &abs.syms).map_err(perr)?;
        let mut clauses = vec![];
        if let Some(l) = &concrete.ast.linking {
            check_linking(&concrete.syms, &abs.syms, l).map_err(perr)?;
            clauses.push(l.clone());
        }
        if let Some(src) = extra {
            let e = parse_expr(src).map_err(|error| ChainError::Parse { file: "linking".into(), error })?;
            check_linking(&concrete.syms, &abs.syms, &e)
                .map_err(|error| ChainError::Parse { file: "linking".into(), error })?;
            clauses.push(e);
        }
        let syms = merge_symbols(&concrete.syms, &abs.syms, Default::default()).map_err(perr)?;
        let shared_idx = shared
            .iter()
            .map(|v| (concrete.var_index(v).unwrap(), abs.var_index(v).unwrap()))
            .collect();
        Ok(Linking { shared, clauses, syms, shared_idx })
    }

    pub fn holds(&self, concrete: &Model, c: &State, abs: &Model, a: &State) -> Result<bool, SemError> {
        if self.shared_idx.iter().any(|&(i, j)| c.0[i] != a.0[j]) {
            return Ok(false);
        }
        let env = crate::sem::eval::Env {
            syms: &self.syms,
            frames: vec![(&concrete.vars, c), (&abs.vars, a)],
            locals: vec![],
        };
        for cl in &self.clauses {
            let ok = env.truth(cl).map_err(|e| SemError::Eval {
                context: format!("linking between {} and {}", c.display(&concrete.vars), a.display(&abs.vars)),
                message: e.message,
            })?;
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Human-readable conjunction.
    pub fn text(&self) -> String {
        let mut parts: Vec<String> = self.shared.iter().map(|v| format!("{v} = {v}'")).collect();
        parts.extend(self.clauses.iter().map(crate::dsl::print::expr_to_string));
        if parts.is_empty() {
            "true".into()
        } else {
            parts.join(" & ")
        }
    }
}

/// Link from `machines[i + 1]` to `machines[i]`.
#[derive(Debug, Clone)]
pub struct Link {
    pub renaming: RenamingMap,
    pub linking: Linking,
}

/// Events of one machine split by status.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelSets {
    pub machine: String,
    pub ordinary: BTreeSet<String>,
    pub anticipated: BTreeSet<String>,
    pub convergent: BTreeSet<String>,
}

#[derive(Debug, Clone)]
pub struct RefinementChain {
    pub name: String,
    pub machines: Vec<Arc<Model>>,
    /// `links[i]` connects `machines[i + 1]` to `machines[i]`.
    pub links: Vec<Link>,
    pub properties: Option<PathBuf>,
    pub files: Vec<PathBuf>,
}

fn read(path: &Path) -> Result<String, ChainError> {
    std::fs::read_to_string(path)
        .map_err(|e| ChainError::Io { path: path.display().to_string(), message: e.to_string() })
}

pub fn load_model(path: &Path) -> Result<Model, ChainError> {
    let src = read(path)?;
    Model::parse(&src).map_err(|error| ChainError::Parse { file: path.display().to_string(), error })
}

impl RefinementChain {
    pub fn load(manifest: &Path) -> Result<RefinementChain, ChainError> {
        let text = read(manifest)?;
        let m: ChainManifest = serde_json::from_str(&text)
            .map_err(|e| ChainError::Manifest { path: manifest.display().to_string(), message: e.to_string() })?;
        let dir = manifest.parent().unwrap_or(Path::new("."));
        let files: Vec<PathBuf> = m.machines.iter().map(|f| dir.join(f)).collect();
        let models = files.iter().map(|f| load_model(f)).collect::<Result<Vec<_>, _>>()?;
        let name = m.name.clone().unwrap_or_else(|| {
            manifest.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        });
        let mut chain = RefinementChain::build(name, models, &m.steps)?;
        chain.properties = m.properties.as_ref().map(|p| dir.join(p));
        chain.files = files;
        Ok(chain)
    }

    pub fn build(name: String, models: Vec<Model>, steps: &[StepManifest]) -> Result<RefinementChain, ChainError> {
        if models.is_empty() {
            return Err(ChainError::Structure("a chain needs at least one machine".into()));
        }
        if steps.len() >= models.len() {
            return Err(ChainError::Structure(format!(
                "{} steps given for {} machines",
                steps.len(),
                models.len()
            )));
        }
        let machines: Vec<Arc<Model>> = models.into_iter().map(Arc::new).collect();
        let mut links = vec![];
        for i in 0..machines.len() - 1 {
            let step = steps.get(i).cloned().unwrap_or_default();
            links.push(build_link(&machines[i], &machines[i + 1], &step)?);
        }
        Ok(RefinementChain { name, machines, links, properties: None, files: vec![] })
    }

    /// Index of the last machine.
    pub fn n(&self) -> usize {
        self.machines.len() - 1
    }

    pub fn labels(&self, i: usize) -> LabelSets {
        let ast = &self.machines[i].ast;
        LabelSets {
            machine: ast.name.clone(),
            ordinary: ast.events_with_status(Status::Ordinary),
            anticipated: ast.events_with_status(Status::Anticipated),
            convergent: ast.events_with_status(Status::Convergent),
        }
    }

    /// The chain `machines[from..=to]`, keeping the links between them.
    pub fn sub_chain(&self, from: usize, to: usize) -> RefinementChain {
        RefinementChain {
            name: format!("{}[{from}..{to}]", self.name),
            machines: self.machines[from..=to].to_vec(),
            links: self.links[from..to].to_vec(),
            properties: self.properties.clone(),
            files: self.files.get(from..=to).map(<[_]>::to_vec).unwrap_or_default(),
        }
    }
}

fn build_link(abs: &Model, conc: &Model, step: &StepManifest) -> Result<Link, ChainError> {
    let cname = conc.name();
    if let Some(r) = &conc.ast.refines {
        if r != abs.name() {
            return Err(ChainError::Structure(format!("{cname} refines {r}, but follows {} in the chain", abs.name())));
        }
    }
    typecheck_with_abstract(&conc.ast, Some(&abs.syms))
        .map_err(|error| ChainError::Parse { file: cname.to_string(), error })?;

    let mut forward: BTreeMap<String, String> = step.renaming.clone().unwrap_or_default();
    for ev in &conc.ast.events {
        if let Some(a) = &ev.refines {
            match forward.get(&ev.name) {
                Some(b) if b != a => {
                    return Err(ChainError::Structure(format!(
                        "event `{}` of {cname} refines `{a}` but the manifest maps it to `{b}`",
                        ev.name
                    )))
                }
                _ => {
                    forward.insert(ev.name.clone(), a.clone());
                }
            }
        }
    }
    for ev in &conc.ast.events {
        if !forward.contains_key(&ev.name) && ev.status.is_none() {
            return Err(ChainError::Structure(format!(
                "event `{}` of {cname} refines no abstract event and has no `status` label",
                ev.name
            )));
        }
    }
    let renaming = RenamingMap::new(forward, conc.ast.alphabet(), abs.ast.alphabet())
        .map_err(|m| ChainError::Structure(format!("{cname}: {m}")))?;
    let linking = Linking::build(conc, abs, step.linking.as_deref())?;
    Ok(Link { renaming, linking })
}
