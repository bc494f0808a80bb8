//! Proof obligations of one refinement step, checked over reachable state pairs.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::dsl::Status;
use crate::sem::{explore_with, ExploreOptions, Limits, Model, SemError, State, StateGraph, Value};

use super::chain::Link;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Po {
    #[serde(rename = "FIS_REF")]
    Fis,
    #[serde(rename = "GRD_REF")]
    Grd,
    #[serde(rename = "INV_REF")]
    Inv,
    #[serde(rename = "WFD_REF")]
    Wfd,
}

impl Po {
    pub const ALL: [Po; 4] = [Po::Fis, Po::Grd, Po::Inv, Po::Wfd];

    pub fn name(self) -> &'static str {
        match self {
            Po::Fis => "FIS_REF",
            Po::Grd => "GRD_REF",
            Po::Inv => "INV_REF",
            Po::Wfd => "WFD_REF",
        }
    }
}

impl fmt::Display for Po {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Raw states behind a witness, for replay.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawWitness {
    pub concrete: Option<State>,
    pub abstract_state: Option<State>,
    pub target: Option<State>,
    pub params: Vec<(String, Value)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub message: String,
    /// Concrete events from `init` to the concrete state.
    pub path: Vec<String>,
    pub concrete_state: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abstract_state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<(i64, i64)>,
    #[serde(skip)]
    pub raw: RawWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoResult {
    pub obligation: Po,
    pub holds: bool,
    /// Instances examined.
    pub checked: usize,
    pub violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoReport {
    pub abstract_machine: String,
    pub concrete_machine: String,
    pub linking: String,
    pub concrete_states: usize,
    pub pairs: usize,
    pub limits: Limits,
    pub obligations: Vec<PoResult>,
}

impl PoReport {
    pub fn holds(&self) -> bool {
        self.obligations.iter().all(|o| o.holds)
    }

    pub fn get(&self, po: Po) -> &PoResult {
        self.obligations.iter().find(|o| o.obligation == po).expect("all obligations reported")
    }

    pub fn failing(&self) -> Vec<Po> {
        self.obligations.iter().filter(|o| !o.holds).map(|o| o.obligation).collect()
    }
}

struct Tally {
    results: HashMap<Po, PoResult>,
}

impl Tally {
    fn new() -> Tally {
        Tally {
            results: Po::ALL
                .iter()
                .map(|&p| (p, PoResult { obligation: p, holds: true, checked: 0, violations: 0, witness: None }))
                .collect(),
        }
    }

    fn check(&mut self, po: Po) {
        self.results.get_mut(&po).unwrap().checked += 1;
    }

    fn fail(&mut self, po: Po, w: impl FnOnce() -> Witness) {
        let r = self.results.get_mut(&po).unwrap();
        r.holds = false;
        r.violations += 1;
        if r.witness.is_none() {
            r.witness = Some(w());
        }
    }

    fn into_vec(mut self) -> Vec<PoResult> {
        Po::ALL.iter().map(|p| self.results.remove(p).unwrap()).collect()
    }
}

fn params_text(p: &[(String, Value)]) -> Option<String> {
    if p.is_empty() {
        return None;
    }
    Some(p.iter().map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(", "))
}

/// Check FIS_REF, GRD_REF, INV_REF and WFD_REF for `concrete` refining `abs` through `link`.
pub fn check_refinement_pair(
    abs: &Arc<Model>,
    concrete: &Arc<Model>,
    link: &Link,
    limits: Limits,
) -> Result<PoReport, SemError> {
    let g = explore_with(
        concrete,
        ExploreOptions { limits, allow_infeasible: true, allow_invariant_violations: true },
    )?;
    let mut t = Tally::new();
    let cvars = &concrete.vars;
    let avars = &abs.vars;

    // FIS_REF: every enabled concrete firing has an outcome.
    t.results.get_mut(&Po::Fis).unwrap().checked = g.edges.len();
    for inf in &g.infeasible {
        t.check(Po::Fis);
        t.fail(Po::Fis, || Witness {
            message: format!("`{}` is enabled but its actions admit no outcome", inf.event),
            path: g.event_path(&g.path_to(inf.state).unwrap_or_default()),
            concrete_state: g.state_text(inf.state),
            abstract_state: None,
            event: Some(inf.event.clone()),
            params: params_text(&inf.params),
            target: None,
            variant: None,
            raw: RawWitness { concrete: Some(g.states[inf.state].clone()), params: inf.params.clone(), ..Default::default() },
        });
    }

    check_wfd(concrete, &g, &mut t)?;

    // Concrete invariant, part of INV_REF.
    for s in 0..g.states.len() {
        t.check(Po::Inv);
        if !concrete.invariant_holds(&g.states[s])? {
            t.fail(Po::Inv, || Witness {
                message: format!("invariant of {} fails", concrete.name()),
                path: g.event_path(&g.path_to(s).unwrap_or_default()),
                concrete_state: g.state_text(s),
                abstract_state: None,
                event: None,
                params: None,
                target: None,
                variant: None,
                raw: RawWitness { concrete: Some(g.states[s].clone()), ..Default::default() },
            });
        }
    }

    // Synchronized exploration over (concrete index, abstract state).
    let abs_init = abs.fire(&abs.ast.init, None)?;
    let mut pairs: Vec<(usize, State)> = vec![];
    let mut index: HashMap<(usize, State), usize> = HashMap::new();
    let mut parent: Vec<Option<(usize, usize)>> = vec![];
    let mut queue = VecDeque::new();
    let mut add = |c: usize, a: State, par: Option<(usize, usize)>, pairs: &mut Vec<(usize, State)>, parent: &mut Vec<Option<(usize, usize)>>, queue: &mut VecDeque<usize>| -> Result<(), SemError> {
        let key = (c, a);
        if index.contains_key(&key) {
            return Ok(());
        }
        if pairs.len() >= limits.max_states {
            return Err(SemError::StateLimit { limit: limits.max_states });
        }
        index.insert(key.clone(), pairs.len());
        queue.push_back(pairs.len());
        pairs.push(key);
        parent.push(par);
        Ok(())
    };
    for &c in &g.initial {
        t.check(Po::Inv);
        let mut any = false;
        for f in &abs_init.enabled {
            if link.linking.holds(concrete, &g.states[c], abs, &f.target)? {
                any = true;
                add(c, f.target.clone(), None, &mut pairs, &mut parent, &mut queue)?;
            }
        }
        if !any {
            t.fail(Po::Inv, || Witness {
                message: format!("no initial state of {} is linked to this initial state", abs.name()),
                path: vec![],
                concrete_state: g.state_text(c),
                abstract_state: None,
                event: Some("init".into()),
                params: None,
                target: None,
                variant: None,
                raw: RawWitness { concrete: Some(g.states[c].clone()), ..Default::default() },
            });
        }
    }

    let path_of = |parent: &[Option<(usize, usize)>], mut p: usize| -> Vec<String> {
        let mut out = vec![];
        while let Some((q, e)) = parent[p] {
            out.push(g.event_name(&g.edges[e]).to_string());
            p = q;
        }
        out.reverse();
        out
    };

    while let Some(p) = queue.pop_front() {
        let (c, a) = pairs[p].clone();
        for &ei in g.out_edge_ids(c) {
            let e = &g.edges[ei];
            let ev_name = g.event_name(e);
            let cev = concrete.ast.event(ev_name).expect("edge of a declared event");
            let target = &g.states[e.target];
            let witness = |message: String, tgt: bool, path: Vec<String>| Witness {
                message,
                path,
                concrete_state: g.state_text(c),
                abstract_state: Some(a.display(avars)),
                event: Some(ev_name.to_string()),
                params: params_text(&e.params),
                target: tgt.then(|| target.display(cvars)),
                variant: None,
                raw: RawWitness {
                    concrete: Some(g.states[c].clone()),
                    abstract_state: Some(a.clone()),
                    target: Some(target.clone()),
                    params: e.params.clone(),
                },
            };
            match link.renaming.apply(ev_name) {
                None => {
                    // New event: refines skip.
                    t.check(Po::Inv);
                    if link.linking.holds(concrete, target, abs, &a)? {
                        add(e.target, a.clone(), Some((p, ei)), &mut pairs, &mut parent, &mut queue)?;
                    } else {
                        t.fail(Po::Inv, || witness(format!("new event `{ev_name}` breaks the linking invariant while the abstract state stays put"), true, path_of(&parent, p)));
                    }
                }
                Some(aname) => {
                    let aev = abs.ast.event(aname).expect("renaming checked against the abstract alphabet");
                    // Abstract parameters that share a name with a concrete one are identified.
                    let linked: Vec<&(String, Value)> = e
                        .params
                        .iter()
                        .filter(|(n, _)| cev.params.iter().any(|q| q.name == *n) && aev.params.iter().any(|q| q.name == *n))
                        .collect();
                    let consistent = |ps: &[(String, Value)]| {
                        linked.iter().all(|(n, v)| ps.iter().find(|(m, _)| m == n).is_none_or(|(_, w)| w == v))
                    };
                    t.check(Po::Grd);
                    let mut enabled = false;
                    for b in abs.bindings(&aev.params)? {
                        if consistent(&b) && abs.guard_holds(aev, &a, &b)? {
                            enabled = true;
                            break;
                        }
                    }
                    if !enabled {
                        t.fail(Po::Grd, || {
                            witness(format!("`{ev_name}` is enabled but the abstract event `{aname}` is not"), false, path_of(&parent, p))
                        });
                        continue;
                    }
                    t.check(Po::Inv);
                    let mut matched = false;
                    for f in abs.fire(aev, Some(&a))?.enabled {
                        let event_params = &f.params[..aev.params.len()];
                        if !consistent(event_params) {
                            continue;
                        }
                        if link.linking.holds(concrete, target, abs, &f.target)? {
                            matched = true;
                            add(e.target, f.target, Some((p, ei)), &mut pairs, &mut parent, &mut queue)?;
                        }
                    }
                    if !matched {
                        t.fail(Po::Inv, || {
                            witness(format!("no step of the abstract event `{aname}` re-establishes the linking invariant"), true, path_of(&parent, p))
                        });
                    }
                }
            }
        }
    }

    Ok(PoReport {
        abstract_machine: abs.name().to_string(),
        concrete_machine: concrete.name().to_string(),
        linking: link.linking.text(),
        concrete_states: g.states.len(),
        pairs: pairs.len(),
        limits,
        obligations: t.into_vec(),
    })
}

/// WFD_REF on the concrete graph: variant natural everywhere, decreased by convergent events,
/// not increased by anticipated ones.
fn check_wfd(m: &Model, g: &StateGraph, t: &mut Tally) -> Result<(), SemError> {
    if m.ast.variant.is_none() {
        return Ok(());
    }
    let values: Vec<i64> = g.states.iter().map(|s| m.variant_at(s).map(|v| v.unwrap())).collect::<Result<_, _>>()?;
    for (s, &v) in values.iter().enumerate() {
        t.check(Po::Wfd);
        if v < 0 {
            t.fail(Po::Wfd, || Witness {
                message: format!("variant is negative ({v})"),
                path: g.event_path(&g.path_to(s).unwrap_or_default()),
                concrete_state: g.state_text(s),
                abstract_state: None,
                event: None,
                params: None,
                target: None,
                variant: Some((v, v)),
                raw: RawWitness { concrete: Some(g.states[s].clone()), ..Default::default() },
            });
        }
    }
    for e in &g.edges {
        let name = g.event_name(e);
        let status = m.ast.event(name).expect("declared event").effective_status();
        let (before, after) = (values[e.source], values[e.target]);
        let bad = match status {
            Status::Convergent => after >= before,
            Status::Anticipated => after > before,
            Status::Ordinary => continue,
        };
        t.check(Po::Wfd);
        if bad {
            t.fail(Po::Wfd, || Witness {
                message: format!(
                    "{status} event `{name}` {} the variant",
                    if status == Status::Convergent { "does not decrease" } else { "increases" }
                ),
                path: g.event_path(&g.path_to(e.source).unwrap_or_default()),
                concrete_state: g.state_text(e.source),
                abstract_state: None,
                event: Some(name.to_string()),
                params: params_text(&e.params),
                target: Some(g.state_text(e.target)),
                variant: Some((before, after)),
                raw: RawWitness {
                    concrete: Some(g.states[e.source].clone()),
                    target: Some(g.states[e.target].clone()),
                    params: e.params.clone(),
                    ..Default::default()
                },
            });
        }
    }
    Ok(())
}
