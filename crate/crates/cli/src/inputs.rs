use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ebltl::dsl::{parse_formula, parse_property_file, Formula};
use ebltl::refine::{load_model, RefinementChain};
use ebltl::sem::Model;

use crate::failure::Failure;
use crate::PropArgs;

pub fn chain(path: &Path) -> Result<RefinementChain, Failure> {
    Ok(RefinementChain::load(path)?)
}

pub fn machine(path: &Path) -> Result<Arc<Model>, Failure> {
    Ok(Arc::new(load_model(path)?))
}

/// A machine given directly, or machine `at` of a chain (default: the last).
pub fn machine_or_level(
    file: Option<&Path>,
    chain_path: Option<&Path>,
    at: Option<usize>,
) -> Result<(Arc<Model>, Option<PathBuf>), Failure> {
    match (file, chain_path) {
        (Some(f), _) => Ok((machine(f)?, sibling_properties(f))),
        (None, Some(c)) => {
            let ch = chain(c)?;
            let i = at.unwrap_or(ch.n());
            let m = ch
                .machines
                .get(i)
                .cloned()
                .ok_or_else(|| Failure::usage(format!("--at {i} is outside 0..={}", ch.n())))?;
            Ok((m, ch.properties.clone()))
        }
        (None, None) => Err(Failure::usage("give a machine file or --chain")),
    }
}

fn sibling_properties(file: &Path) -> Option<PathBuf> {
    let p = file.parent()?.join("properties.ltl");
    p.is_file().then_some(p)
}

#[derive(Debug, Clone)]
pub struct Property {
    pub name: Option<String>,
    pub formula: Formula,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// `--prop` as a formula, `@file`, or a name from the properties file.
pub fn property(args: &PropArgs, default_props: Option<&Path>) -> Result<Property, Failure> {
    let text = args.prop.trim();
    if let Some(file) = text.strip_prefix('@') {
        let path = Path::new(file);
        let props = parse_property_file(&read(path)?).map_err(|e| Failure::parse(format!("{file}: {e}")))?;
        return match props.as_slice() {
            [one] => Ok(Property { name: Some(one.name.clone()), formula: one.formula.clone() }),
            _ => Err(Failure::usage(format!("{file} holds {} formulas; expected exactly one", props.len()))),
        };
    }
    let is_name = !text.is_empty() && text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if is_name && !matches!(text, "true" | "false") {
        let props_file = args.props.as_deref().or(default_props);
        if let Some(pf) = props_file {
            let props = parse_property_file(&read(pf)?)
                .map_err(|e| Failure::parse(format!("{}: {e}", pf.display())))?;
            if let Some(p) = props.into_iter().find(|p| p.name == text) {
                return Ok(Property { name: Some(p.name), formula: p.formula });
            }
        }
        return Err(Failure::usage(match props_file {
            Some(pf) => format!("no property named `{text}` in {}", pf.display()),
            None => format!("`{text}` is not a formula and no properties file is known"),
        }));
    }
    let formula = parse_formula(text).map_err(|e| Failure::parse(format!("--prop: {e}")))?;
    Ok(Property { name: None, formula })
}

pub fn event_set(list: &Option<Vec<String>>) -> Option<BTreeSet<String>> {
    list.as_ref().map(|v| v.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
}
