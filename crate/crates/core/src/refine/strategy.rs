//! Labelling discipline along a chain.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::dsl::Status;

use super::chain::{LabelSets, RefinementChain};
use super::renaming::RenamingMap;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub rule: u8,
    /// Index of the machine the finding is about.
    pub level: usize,
    pub machine: String,
    pub event: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyReport {
    pub holds: bool,
    pub labels: Vec<LabelSets>,
    pub findings: Vec<Finding>,
}

impl StrategyReport {
    pub fn rules_violated(&self) -> BTreeSet<u8> {
        self.findings.iter().map(|f| f.rule).collect()
    }
}

pub fn check_strategy(chain: &RefinementChain) -> StrategyReport {
    let mut findings = vec![];
    let mut push = |rule: u8, level: usize, event: &str, message: String| {
        findings.push(Finding {
            rule,
            level,
            machine: chain.machines[level].name().to_string(),
            event: event.to_string(),
            message,
        })
    };
    for ev in &chain.machines[0].ast.events {
        if ev.effective_status() != Status::Ordinary {
            push(1, 0, &ev.name, format!("`{}` of the first machine is {}", ev.name, ev.effective_status()));
        }
    }
    for (i, link) in chain.links.iter().enumerate() {
        let (abs, conc) = (&chain.machines[i].ast, &chain.machines[i + 1].ast);
        for a in link.renaming.unrefined() {
            push(2, i, &a, format!("`{a}` of {} is refined by no event of {}", abs.name, conc.name));
        }
        for ev in &conc.events {
            let st = ev.effective_status();
            match link.renaming.apply(&ev.name) {
                None => {
                    if st == Status::Ordinary {
                        push(3, i + 1, &ev.name, format!("new event `{}` is ordinary", ev.name));
                    }
                }
                Some(a) => {
                    let ast = abs.event(a).expect("renaming is checked").effective_status();
                    match ast {
                        Status::Anticipated if st == Status::Ordinary => push(
                            4,
                            i + 1,
                            &ev.name,
                            format!("`{}` refines anticipated `{a}` but is ordinary", ev.name),
                        ),
                        Status::Convergent | Status::Ordinary if st != Status::Ordinary => push(
                            5,
                            i + 1,
                            &ev.name,
                            format!("`{}` refines {ast} `{a}` but is {st}", ev.name),
                        ),
                        _ => {}
                    }
                }
            }
        }
    }
    let n = chain.n();
    for ev in &chain.machines[n].ast.events {
        if ev.effective_status() == Status::Anticipated {
            push(6, n, &ev.name, format!("`{}` is still anticipated in the final machine", ev.name));
        }
    }
    findings.sort_by(|a, b| (a.rule, a.level, &a.event).cmp(&(b.rule, b.level, &b.event)));
    StrategyReport { holds: findings.is_empty(), labels: (0..=n).map(|i| chain.labels(i)).collect(), findings }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("level {i} is outside 1..={max}")]
pub struct LevelError {
    pub i: usize,
    pub max: usize,
}

/// `g_{i,n}`: from the last machine's events to those of machine `i - 1`.
/// `i = n + 1` gives the identity on the last machine's alphabet.
pub fn compose_renamings(chain: &RefinementChain, i: usize) -> Result<RenamingMap, LevelError> {
    let n = chain.n();
    if i == 0 || i > n + 1 {
        return Err(LevelError { i, max: n + 1 });
    }
    let mut g = RenamingMap::identity(&chain.machines[n].ast.alphabet());
    // f_k is links[k - 1]; apply f_n first.
    for k in (i..=n).rev() {
        g = g.then(&chain.links[k - 1].renaming);
    }
    Ok(g)
}
