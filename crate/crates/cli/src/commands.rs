use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use ebltl::exec::Exec;
use ebltl::ltl::{model_check, Verdict};
use ebltl::oracle::{corpus_root, cross_validate, load_corpus, random_differential, OracleBounds};
use ebltl::preserve::{
    apply_lemma_gf, apply_preservation, check_beta_dependent, translate_formula, BetaBounds, Certificate,
    DependenceStatus, PreserveOptions,
};
use ebltl::refine::{check_refinement_pair, check_strategy, check_theorem1, compose_renamings, PoReport};
use ebltl::sem::{check_deadlock_free, check_invariant, explore, Limits};

use crate::failure::{Failure, FailureKind};
use crate::{inputs, Command, Common};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Blocked,
    Error,
    Bound,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Blocked => 2,
            Status::Error => 3,
            Status::Bound => 4,
        }
    }

    fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

pub struct Outcome {
    pub status: Status,
    pub report: Value,
    pub text: String,
    pub failure: Option<Failure>,
}

impl Outcome {
    fn new(status: Status, report: impl Serialize, text: String) -> Outcome {
        Outcome { status, report: serde_json::to_value(report).expect("reports serialize"), text, failure: None }
    }

    pub fn from_failure(f: Failure) -> Outcome {
        let status = match f.kind {
            FailureKind::Usage | FailureKind::Parse => Status::Error,
            FailureKind::Model => Status::Fail,
            FailureKind::Bound => Status::Bound,
        };
        Outcome { status, report: Value::Null, text: String::new(), failure: Some(f) }
    }

    pub fn emit(&self, command: &str, as_json: bool) {
        if as_json {
            let mut doc = json!({
                "command": command,
                "status": self.status,
                "exit_code": self.status.code(),
            });
            if !self.report.is_null() {
                doc["report"] = self.report.clone();
            }
            if let Some(f) = &self.failure {
                doc["error"] = serde_json::to_value(f).expect("failure serializes");
            }
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&doc).expect("json"));
            return;
        }
        let _ = write!(std::io::stdout(), "{}", self.text);
        if let Some(f) = &self.failure {
            eprintln!("error: {}", f.message);
        }
    }
}

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Parse { .. } => "parse",
        Command::Explore { .. } => "explore",
        Command::Po { .. } => "po",
        Command::Strategy { .. } => "strategy",
        Command::Mc { .. } => "mc",
        Command::Beta { .. } => "beta",
        Command::Translate { .. } => "translate",
        Command::Gf { .. } => "gf",
        Command::Preserve { .. } => "preserve",
        Command::Oracle { .. } => "oracle",
    }
}

fn limits(c: &Common) -> Result<Limits, Failure> {
    if c.bound_states == 0 {
        return Err(Failure::usage("--bound-states must be positive"));
    }
    Ok(Limits { max_states: c.bound_states })
}

fn beta_bounds(c: &Common) -> Result<BetaBounds, Failure> {
    if c.lasso_cycle == 0 {
        return Err(Failure::usage("--lasso-cycle must be positive"));
    }
    Ok(BetaBounds::new(c.lasso_prefix, c.lasso_cycle))
}

fn set_text(s: &BTreeSet<String>) -> String {
    format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(", "))
}

fn verdict_text(out: &mut String, v: &Verdict) {
    for w in &v.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    if let Some(cx) = &v.counterexample {
        let _ = writeln!(out, "counterexample: {cx}");
    }
}

pub fn run(cmd: &Command, common: &Common) -> Result<Outcome, Failure> {
    match cmd {
        Command::Parse { file, prop } => parse(file.as_deref(), prop.as_deref()),
        Command::Explore { file, graph } => {
            let m = inputs::machine(file)?;
            let g = explore(&m, limits(common)?)?;
            let inv = check_invariant(&g)?;
            let dl = check_deadlock_free(&g);
            let mut text = format!(
                "{}: {} states, {} transitions, {} deadlock states\n",
                g.name,
                g.states.len(),
                g.edges.len(),
                g.deadlocks.len()
            );
            if let Some(d) = &dl.deadlock {
                let _ = writeln!(text, "first deadlock: {} after {}", d.valuation, path_text(&d.path));
            }
            let _ = writeln!(text, "invariant: {}", if inv.holds { "holds" } else { "violated" });
            let report = json!({
                "machine": g.name,
                "states": g.states.len(),
                "transitions": g.edges.len(),
                "deadlock_states": g.deadlocks.len(),
                "invariant": inv,
                "deadlock_free": dl,
                "graph": if *graph { g.to_json() } else { Value::Null },
            });
            Ok(Outcome::new(Status::from_bool(inv.holds), strip_nulls(report), text))
        }
        Command::Po { chain, step } => {
            let ch = inputs::chain(chain)?;
            let steps: Vec<usize> = match step {
                Some(k) if *k >= 1 && *k <= ch.n() => vec![*k],
                Some(k) => return Err(Failure::usage(format!("--step {k} is outside 1..={}", ch.n()))),
                None => (1..=ch.n()).collect(),
            };
            let l = limits(common)?;
            let mut reports: Vec<PoReport> = vec![];
            let mut text = String::new();
            for k in steps {
                let r = check_refinement_pair(&ch.machines[k - 1], &ch.machines[k], &ch.links[k - 1], l)?;
                let _ = writeln!(text, "{} refines {} ({} linked pairs)", r.concrete_machine, r.abstract_machine, r.pairs);
                for o in &r.obligations {
                    let _ = writeln!(
                        text,
                        "  {:<8} {} ({} checked)",
                        o.obligation.name(),
                        if o.holds { "ok" } else { "FAILS" },
                        o.checked
                    );
                    if let Some(w) = &o.witness {
                        let _ = writeln!(text, "    {}", w.message);
                        let _ = writeln!(text, "    after {}", path_text(&w.path));
                    }
                }
                reports.push(r);
            }
            let ok = reports.iter().all(PoReport::holds);
            Ok(Outcome::new(Status::from_bool(ok), json!({ "chain": ch.name, "steps": reports }), text))
        }
        Command::Strategy { chain, divergence } => {
            let ch = inputs::chain(chain)?;
            let r = check_strategy(&ch);
            let mut text = String::new();
            for l in &r.labels {
                let _ = writeln!(
                    text,
                    "{}: convergent {} anticipated {}",
                    l.machine,
                    set_text(&l.convergent),
                    set_text(&l.anticipated)
                );
            }
            for f in &r.findings {
                let _ = writeln!(text, "rule {} violated by `{}` in {}: {}", f.rule, f.event, f.machine, f.message);
            }
            let _ = writeln!(text, "strategy: {}", if r.holds { "holds" } else { "fails" });
            let mut ok = r.holds;
            let mut report = json!({ "chain": ch.name, "strategy": r });
            if *divergence {
                let l = limits(common)?;
                let g = explore(ch.machines.last().unwrap(), l)?;
                let t = check_theorem1(&ch, &g, l)?;
                let _ = writeln!(text, "C* = {}, O* = {}", set_text(&t.c_star), set_text(&t.o_star));
                let _ = writeln!(text, "derived guarantee: {}", if t.hypotheses_hold { "holds" } else { "not derived" });
                let _ = writeln!(text, "direct check: {}", if t.direct.holds { "holds" } else { "fails" });
                if let Some(w) = &t.direct.witness {
                    let _ = writeln!(text, "divergent run: {w}");
                }
                ok = ok && t.direct.holds && !t.disagreement;
                report["divergence"] = serde_json::to_value(&t).expect("json");
            }
            Ok(Outcome::new(Status::from_bool(ok), report, text))
        }
        Command::Mc { file, chain, at, prop } => {
            let (m, props) = inputs::machine_or_level(file.as_deref(), chain.as_deref(), *at)?;
            let p = inputs::property(prop, props.as_deref())?;
            let g = explore(&m, limits(common)?)?;
            let v = model_check(&g, &p.formula)?;
            let mut text = format!(
                "{} {} {}\n",
                g.name,
                if v.holds { "satisfies" } else { "violates" },
                p.name.clone().unwrap_or_else(|| p.formula.to_string())
            );
            verdict_text(&mut text, &v);
            let report = json!({
                "machine": g.name,
                "states": g.states.len(),
                "property": p.name,
                "formula": p.formula,
                "verdict": v,
            });
            Ok(Outcome::new(Status::from_bool(v.holds), strip_nulls(report), text))
        }
        Command::Beta { prop, beta, file, chain, at } => {
            let (sigma, props) = match (file, chain) {
                (None, None) => (None, None),
                _ => {
                    let (m, props) = inputs::machine_or_level(file.as_deref(), chain.as_deref(), *at)?;
                    (Some(m.ast.alphabet()), props)
                }
            };
            let p = inputs::property(prop, props.as_deref())?;
            let beta = inputs::event_set(beta).unwrap_or_else(|| p.formula.alphabet());
            let sigma = sigma.unwrap_or_else(|| {
                // Without a machine, one event outside beta stands for all of them.
                let mut s = beta.clone();
                s.insert("_other".into());
                s
            });
            let v = check_beta_dependent(&p.formula, &beta, &sigma, beta_bounds(common)?)?;
            let status = match v.status {
                DependenceStatus::Certified => Status::Pass,
                DependenceStatus::Refuted => Status::Fail,
                DependenceStatus::Unknown => Status::Bound,
            };
            let mut text = format!("{} is {} for beta = {}", p.formula, status_word(v.status), set_text(&beta));
            let _ = writeln!(text, " ({})", serde_json::to_value(v.method).unwrap().as_str().unwrap_or(""));
            if let Some(w) = &v.witness {
                let _ = writeln!(text, "witness: {w}");
                let _ = writeln!(text, "projection: {}", w.project(&beta));
            }
            Ok(Outcome::new(status, v, text))
        }
        Command::Translate { chain, at, prop } => {
            let ch = inputs::chain(chain)?;
            if *at > ch.n() {
                return Err(Failure::usage(format!("--at {at} is outside 0..={}", ch.n())));
            }
            let p = inputs::property(prop, ch.properties.as_deref())?;
            let g = compose_renamings(&ch, at + 1)?;
            let t = translate_formula(&p.formula, &g);
            let text = format!("{t}\n");
            let report = json!({
                "chain": ch.name,
                "from": ch.machines[*at].name(),
                "to": ch.machines[ch.n()].name(),
                "formula": p.formula,
                "renaming": g.forward,
                "translated": t,
            });
            Ok(Outcome::new(Status::Pass, report, text))
        }
        Command::Gf { chain, no_cross_validate } => {
            let ch = inputs::chain(chain)?;
            let opts = PreserveOptions {
                limits: limits(common)?,
                beta_bounds: beta_bounds(common)?,
                accept_bounded: false,
                cross_validate: !no_cross_validate,
            };
            certificate(apply_lemma_gf(&ch, &opts)?)
        }
        Command::Preserve { chain, at, prop, beta, accept_bounded, no_cross_validate } => {
            let ch = inputs::chain(chain)?;
            let p = inputs::property(prop, ch.properties.as_deref())?;
            let opts = PreserveOptions {
                limits: limits(common)?,
                beta_bounds: beta_bounds(common)?,
                accept_bounded: *accept_bounded,
                cross_validate: !no_cross_validate,
            };
            certificate(apply_preservation(&ch, *at, &p.formula, inputs::event_set(beta).as_ref(), &opts)?)
        }
        Command::Oracle { corpus, random, seed } => {
            let root = corpus.clone().unwrap_or_else(corpus_root);
            let entries = load_corpus(&root)?;
            let table = cross_validate(&entries, limits(common)?, OracleBounds::default(), Exec::default())?;
            let rand = random_differential(*random, *seed, OracleBounds::default(), Exec::default());
            let mut text = String::new();
            for r in &table.rows {
                if !r.agree || !r.matches_expected || r.error.is_some() {
                    let _ = writeln!(text, "MISMATCH {}/{} {}: {:?}", r.entry, r.machine, r.property, r.error);
                }
            }
            for c in &rand.disagreements {
                let _ = writeln!(text, "MISMATCH random #{}: {}", c.index, c.formula);
            }
            let _ = writeln!(
                text,
                "corpus: {} rows, {} disagreements, {} unexpected verdicts",
                table.rows.len(),
                table.disagreements,
                table.unexpected
            );
            let _ = writeln!(text, "random: {} pairs, {} disagreements", rand.pairs, rand.disagreements.len());
            let ok = table.passed() && rand.passed();
            Ok(Outcome::new(Status::from_bool(ok), json!({ "corpus": table, "random": rand }), text))
        }
    }
}

fn status_word(s: DependenceStatus) -> &'static str {
    match s {
        DependenceStatus::Certified => "beta-dependent",
        DependenceStatus::Refuted => "not beta-dependent",
        DependenceStatus::Unknown => "undecided within bounds",
    }
}

fn path_text(p: &[String]) -> String {
    if p.is_empty() {
        "init".into()
    } else {
        format!("init, {}", p.join(", "))
    }
}

fn strip_nulls(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.retain(|_, x| !x.is_null());
    }
    v
}

fn certificate(c: Certificate) -> Result<Outcome, Failure> {
    let mut text = format!("lemma {} on {}\n", c.lemma, c.machines.join(" < "));
    for h in &c.hypotheses {
        let _ = writeln!(text, "  [{}] {} ({})", if h.holds { "ok" } else { "FAILED" }, h.statement, h.id);
    }
    match &c.conclusion {
        Some(f) => {
            let _ = writeln!(text, "conclusion: {} ⊨ {f}", c.machines.last().unwrap());
        }
        None => {
            let _ = writeln!(text, "blocked: {} ⊨ {} not established", c.machines.last().unwrap(), c.candidate);
        }
    }
    if let Some(v) = &c.cross_validation {
        let _ = writeln!(text, "direct check: {}", if v.holds { "holds" } else { "fails" });
        verdict_text(&mut text, v);
    }
    let status = if !c.consistent {
        Status::Fail
    } else if c.established() {
        Status::Pass
    } else {
        Status::Blocked
    };
    Ok(Outcome::new(status, &c, text))
}

fn parse(file: Option<&std::path::Path>, prop: Option<&str>) -> Result<Outcome, Failure> {
    match (file, prop) {
        (Some(f), _) => {
            let m = inputs::machine(f)?;
            let ast = &m.ast;
            let events: Vec<Value> = ast
                .events
                .iter()
                .map(|e| json!({ "name": e.name, "status": e.status, "refines": e.refines }))
                .collect();
            let text = format!(
                "machine {}: {} variables, {} events\n",
                ast.name,
                ast.variables.len(),
                ast.events.len()
            );
            let report = json!({
                "machine": ast.name,
                "refines": ast.refines,
                "variables": ast.variables.iter().map(|v| v.name.clone()).collect::<Vec<_>>(),
                "events": events,
                "source": ebltl::dsl::print::machine_to_string(ast),
            });
            Ok(Outcome::new(Status::Pass, report, text))
        }
        (None, Some(p)) => {
            let f = ebltl::dsl::parse_formula(p).map_err(|e| Failure::parse(format!("--prop: {e}")))?;
            let text = format!("{f}\n");
            let report = json!({ "formula": f, "alphabet": f.alphabet(), "depth": f.depth() });
            Ok(Outcome::new(Status::Pass, report, text))
        }
        (None, None) => Err(Failure::usage("give a machine file or --prop")),
    }
}
