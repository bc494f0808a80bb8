//! One line per acceptance criterion. Runs without the test harness, so the lines always print.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use serde_json::{json, Value};

use ebltl::dsl::{parse_formula, parse_property_file, Formula};
use ebltl::exec::Exec;
use ebltl::ltl::{holds_on_trace, model_check, Trace};
use ebltl::oracle::random::{random_formula, random_trace, rng, Rng8};
use ebltl::oracle::{cross_validate, load_corpus, random_differential, OracleBounds};
use ebltl::preserve::{
    apply_lemma_gf, apply_preservation, check_beta_dependent, complete_renaming, is_witness, map_trace,
    translate_formula, BetaBounds, Certificate, DependenceStatus, PreserveOptions,
};
use ebltl::refine::{check_refinement_pair, check_strategy, check_theorem1, RefinementChain, RenamingMap};
use ebltl::sem::{explore, Limits, StateGraph};

type Check = Result<String, String>;

fn corpus(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn chain(rel: &str) -> RefinementChain {
    RefinementChain::load(&corpus(rel)).unwrap()
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn prop(name: &str) -> Formula {
    let src = std::fs::read_to_string(corpus("vm/properties.ltl")).unwrap();
    parse_property_file(&src).unwrap().into_iter().find(|p| p.name == name).unwrap().formula
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn strategy_labels() -> Check {
    let r = check_strategy(&chain("vm/chain-vm1.json"));
    ensure(r.holds, || format!("findings on VM1..VM4: {:?}", r.findings))?;
    let c: Vec<_> = r.labels.iter().map(|l| l.convergent.clone()).collect();
    ensure(c[1..] == [set(&["refund"]), set(&["refill"]), set(&["pay"])], || format!("C_i = {c:?}"))?;
    let short = check_strategy(&chain("vm/chain-to-vm3.json"));
    ensure(short.rules_violated() == BTreeSet::from([6]), || format!("VM1..VM3 violates {:?}", short.rules_violated()))?;
    Ok("C1={refund} C2={refill} C3={pay}; VM1..VM3 fails rule 6 only".into())
}

fn failing_obligations(ch: &RefinementChain) -> BTreeSet<(u64, String)> {
    let mut out = BTreeSet::new();
    for (i, link) in ch.links.iter().enumerate() {
        let r = check_refinement_pair(&ch.machines[i], &ch.machines[i + 1], link, Limits::default()).unwrap();
        for o in r.obligations.iter().filter(|o| !o.holds) {
            out.insert((i as u64 + 1, o.obligation.name().to_string()));
        }
    }
    out
}

fn proof_obligations() -> Check {
    let full = chain("vm/chain.json");
    let bad = failing_obligations(&full);
    ensure(bad.is_empty(), || format!("VM chain fails {bad:?}"))?;
    let dir = corpus("vm-mutants");
    let expected: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("expected.json")).unwrap()).unwrap();
    let mutants = expected["mutants"].as_object().unwrap();
    ensure(mutants.len() == 6, || format!("{} mutants shipped", mutants.len()))?;
    for (name, exp) in mutants {
        let ch = RefinementChain::load(&dir.join(format!("{name}.json"))).unwrap();
        let want: BTreeSet<(u64, String)> = exp["obligations"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| (p[0].as_u64().unwrap(), p[1].as_str().unwrap().to_string()))
            .collect();
        let rules: BTreeSet<u8> = exp["rules"].as_array().unwrap().iter().map(|r| r.as_u64().unwrap() as u8).collect();
        let got = failing_obligations(&ch);
        ensure(got == want, || format!("{name}: obligations {got:?}, want {want:?}"))?;
        let got = check_strategy(&ch).rules_violated();
        ensure(got == rules, || format!("{name}: rules {got:?}, want {rules:?}"))?;
    }
    Ok(format!("4 adjacent VM pairs discharge every PO; {} mutants fail only their target", mutants.len()))
}

fn graph(ch: &RefinementChain, i: usize) -> StateGraph {
    explore(&ch.machines[i], Limits::default()).unwrap()
}

fn ltl_table() -> Check {
    let ch = chain("vm/chain-vm1.json");
    let table: [(usize, &[&str], &[&str]); 3] = [
        (0, &["phi1", "phi2", "phi3"], &["phi4", "phi5"]),
        (1, &["phi7"], &["phi6", "phi1", "phi2", "phi3"]),
        (3, &["phi1", "phi2", "phi3", "phi6", "phi7"], &[]),
    ];
    let mut rows = 0;
    let mut replayed = 0;
    for (i, holds, fails) in table {
        let g = graph(&ch, i);
        for (names, expect) in [(holds, true), (fails, false)] {
            for name in names {
                let phi = prop(name);
                let v = model_check(&g, &phi).map_err(|e| e.to_string())?;
                ensure(v.holds == expect, || format!("{} {name}: holds = {}", g.name, v.holds))?;
                rows += 1;
                if !expect {
                    let cx = v.counterexample.ok_or_else(|| format!("{} {name}: no counterexample", g.name))?;
                    ensure(!holds_on_trace(&cx, &phi) && g.realizes(&cx.prefix, &cx.cycle), || {
                        format!("{} {name}: {cx} does not replay", g.name)
                    })?;
                    replayed += 1;
                }
            }
        }
    }
    Ok(format!("{rows} verdicts reproduced, {replayed} counterexamples replayed"))
}

fn established(c: &Certificate) -> Result<(), String> {
    ensure(c.established() && c.consistent, || {
        let failed: Vec<_> = c.failed().iter().map(|h| h.id.clone()).collect();
        format!("lemma {} not established, failed {failed:?}", c.lemma)
    })?;
    ensure(c.cross_validation.as_ref().is_some_and(|v| v.holds), || "cross-validation refutes the conclusion".into())
}

fn gf() -> Check {
    let expected = parse_formula("G F ([dispenseBiscuit] | [dispenseChoc] | [selectBiscuit] | [selectChoc])").unwrap();
    for (rel, lemma) in [("vm/chain-vm1.json", 1), ("vm/chain.json", 3)] {
        let c = apply_lemma_gf(&chain(rel), &PreserveOptions::default()).map_err(|e| e.to_string())?;
        established(&c)?;
        ensure(c.lemma == lemma, || format!("{rel}: lemma {}", c.lemma))?;
        ensure(c.conclusion.as_ref() == Some(&expected), || format!("{rel}: {:?}", c.conclusion))?;
    }
    Ok("VM4 |= GF(sb|sc|db|dc) from VM1..VM4 and, through g_{1,4}^-1, from VM0..VM4".into())
}

fn preserve() -> Check {
    let opts = PreserveOptions::default();
    let vm1 = chain("vm/chain-vm1.json");
    for name in ["phi2", "phi3"] {
        established(&apply_preservation(&vm1, 0, &prop(name), None, &opts).map_err(|e| e.to_string())?)?;
    }
    established(&apply_preservation(&vm1, 1, &prop("phi7"), None, &opts).map_err(|e| e.to_string())?)?;
    let full = chain("vm/chain.json");
    let item = parse_formula("G([selectItem] => F[dispenseItem])").unwrap();
    let c = apply_preservation(&full, 0, &item, None, &opts).map_err(|e| e.to_string())?;
    established(&c)?;
    let want = parse_formula("G([selectBiscuit] | [selectChoc] => F([dispenseBiscuit] | [dispenseChoc]))").unwrap();
    ensure(c.conclusion.as_ref() == Some(&want), || format!("translated to {:?}", c.conclusion))?;
    let c = apply_preservation(&vm1, 0, &prop("phi4"), None, &opts).map_err(|e| e.to_string())?;
    let failed: BTreeSet<String> = c.failed().into_iter().map(|h| h.id.clone()).collect();
    ensure(!c.established() && failed == set(&["satisfies"]), || format!("phi4 failed {failed:?}"))?;
    Ok("VM4 |= phi2, phi3, phi7, trans(item); phi4 blocked on `satisfies`".into())
}

fn theorem1() -> Check {
    let ch = chain("vm/chain-vm1.json");
    let t = check_theorem1(&ch, &graph(&ch, 3), Limits::default()).map_err(|e| e.to_string())?;
    ensure(t.hypotheses_hold && t.direct.holds && !t.disagreement, || format!("{t:?}"))?;
    let bad = chain("vm-mutants/grd-vm4.json");
    let g = graph(&bad, 3);
    let t = check_theorem1(&bad, &g, Limits::default()).map_err(|e| e.to_string())?;
    ensure(!t.direct.holds && !t.disagreement, || format!("{t:?}"))?;
    let w = t.direct.witness.ok_or("no divergence witness")?;
    ensure(g.realizes(&w.prefix, &w.cycle) && w.cycle.iter().all(|e| e == "pay" || e == "refund"), || {
        format!("witness {w} is not a pay/refund loop of the mutant")
    })?;
    Ok(format!("CA(C*,O*) holds on VM4; the refund-loop mutant diverges on {w}"))
}

fn beta() -> Check {
    let sigma = chain("vm/chain.json").machines[4].ast.alphabet();
    let pay = set(&["pay"]);
    let b = BetaBounds::default();
    let v = check_beta_dependent(&parse_formula("G F[pay]").unwrap(), &pay, &sigma, b).map_err(|e| e.to_string())?;
    ensure(v.status == DependenceStatus::Certified, || format!("GF[pay]: {:?}", v.status))?;

    let phi = parse_formula("!G[pay]").unwrap();
    let v = check_beta_dependent(&phi, &pay, &sigma, b).map_err(|e| e.to_string())?;
    let w = v.witness.ok_or("!G[pay]: no witness")?;
    let reference = Trace::lasso(["pay", "refill"], ["pay"]);
    ensure(is_witness(&w, &phi, &pay), || format!("{w} does not separate !G[pay]"))?;
    ensure(w.project(&pay).same_word(&reference.project(&pay)), || format!("{w} projects differently"))?;

    let phi = parse_formula("G([selectBiscuit] | [selectChoc] | [dispenseBiscuit] | [dispenseChoc])").unwrap();
    let o = phi.alphabet();
    let v = check_beta_dependent(&phi, &o, &sigma, b).map_err(|e| e.to_string())?;
    ensure(v.status == DependenceStatus::Refuted, || format!("G(sb|sc|db|dc): {:?}", v.status))?;
    Ok(format!("GF[pay] certified; !G[pay] refuted by {w}; G(sb|sc|db|dc) refuted"))
}

/// A partial renaming from `c0..c4` onto `a0..a2`.
fn random_renaming(r: &mut Rng8) -> RenamingMap {
    let c: Vec<String> = (0..5).map(|i| format!("c{i}")).collect();
    let a: Vec<String> = (0..3).map(|i| format!("a{i}")).collect();
    let mut forward = BTreeMap::new();
    for e in &c {
        if r.gen_bool(0.8) {
            forward.insert(e.clone(), a[r.gen_range(0..3)].clone());
        }
    }
    RenamingMap::new(forward, c.into_iter().collect(), a.into_iter().collect()).unwrap()
}

fn abstract_letters() -> Vec<String> {
    (0..3).map(|i| format!("a{i}")).collect()
}

fn random_event_set(r: &mut Rng8, alphabet: &[String]) -> Formula {
    Formula::any_of(alphabet.iter().filter(|_| r.gen_bool(0.5)).cloned().collect::<Vec<_>>())
}

fn lemma_properties() -> Check {
    let mut r = rng(8);
    let a = abstract_letters();
    let concrete: Vec<String> = (0..5).map(|i| format!("c{i}")).collect();

    for _ in 0..1000 {
        let h = random_renaming(&mut r);
        let phi = random_formula(&mut r, &a, 5);
        ensure(translate_formula(&phi, &h) == translate_formula(&phi, &complete_renaming(&h)), || {
            format!("completion changes the translation of {phi}")
        })?;
    }

    let mut trials = 0;
    while trials < 1000 {
        let h = random_renaming(&mut r);
        let dom: BTreeSet<String> = h.forward.keys().cloned().collect();
        if dom.is_empty() {
            continue;
        }
        let phi = random_formula(&mut r, &a, 5);
        let u = random_trace(&mut r, &concrete).project(&dom);
        let mapped = map_trace(&h, &u).map_err(|e| e.0)?;
        ensure(holds_on_trace(&u, &translate_formula(&phi, &h)) == holds_on_trace(&mapped, &phi), || {
            format!("{phi} under {:?} on {u}", h.forward)
        })?;
        trials += 1;
    }

    let beta: BTreeSet<String> = a.iter().cloned().collect();
    let sigma: BTreeSet<String> = beta.iter().cloned().chain(["x".to_string()]).collect();
    for _ in 0..200 {
        let h = random_renaming(&mut r);
        let d = random_event_set(&mut r, &a);
        let e = random_event_set(&mut r, &a);
        let phi = match r.gen_range(0..4) {
            0 => Formula::globally(Formula::finally(d)),
            1 => Formula::finally(Formula::globally(Formula::not(d))),
            2 => Formula::globally(Formula::implies(d, Formula::finally(e))),
            _ => Formula::finally(d),
        };
        let v = check_beta_dependent(&phi, &beta, &sigma, BetaBounds::default()).map_err(|e| e.to_string())?;
        ensure(v.status == DependenceStatus::Certified, || format!("{phi} not certified"))?;
        let t = translate_formula(&phi, &h);
        let pre = h.preimage(&beta);
        let all: BTreeSet<String> = concrete.iter().cloned().collect();
        let v = check_beta_dependent(&t, &pre, &all, BetaBounds::new(3, 3)).map_err(|e| e.to_string())?;
        ensure(v.status != DependenceStatus::Refuted, || format!("{t} refuted by {:?}", v.witness))?;
    }
    Ok("completion identity x1000, translation vs mapped trace x1000, 200 translated certificates unrefuted".into())
}

fn differential() -> Result<(String, Value), String> {
    let start = Instant::now();
    let entries = load_corpus(&corpus("")).map_err(|e| e.to_string())?;
    let table = cross_validate(&entries, Limits::default(), OracleBounds::default(), Exec::default())
        .map_err(|e| e.to_string())?;
    let random = random_differential(500, 2, OracleBounds::default(), Exec::default());
    let elapsed = start.elapsed();
    ensure(table.passed(), || format!("{} disagreements, {} unexpected", table.disagreements, table.unexpected))?;
    ensure(random.passed(), || format!("{} random disagreements", random.disagreements.len()))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    let line = format!("{} corpus rows and 500 random pairs agree in {:.1}s", table.rows.len(), elapsed.as_secs_f64());
    Ok((line, json!({ "corpus": table, "random": random })))
}

/// Every report the toolkit produces on the corpus, as one JSON document.
fn full_run(oracle: &Value) -> String {
    let opts = PreserveOptions::default();
    let mut doc = BTreeMap::new();
    let mut manifests: Vec<PathBuf> = vec![];
    for dir in ["vm", "vm-mutants", "lift"] {
        for e in std::fs::read_dir(corpus(dir)).unwrap() {
            let p = e.unwrap().path();
            if p.extension().is_some_and(|x| x == "json") && p.file_name().unwrap() != "expected.json" {
                manifests.push(p);
            }
        }
    }
    manifests.sort();
    for m in manifests {
        let ch = RefinementChain::load(&m).unwrap();
        let pos: Vec<_> = (0..ch.n())
            .map(|i| check_refinement_pair(&ch.machines[i], &ch.machines[i + 1], &ch.links[i], Limits::default()).unwrap())
            .collect();
        let last = graph(&ch, ch.n());
        doc.insert(
            m.file_name().unwrap().to_string_lossy().into_owned(),
            json!({
                "po": pos,
                "strategy": check_strategy(&ch),
                "theorem1": check_theorem1(&ch, &last, Limits::default()).unwrap(),
                "gf": apply_lemma_gf(&ch, &opts).unwrap(),
            }),
        );
    }
    let vm1 = chain("vm/chain-vm1.json");
    for name in ["phi1", "phi2", "phi3", "phi4", "phi5"] {
        doc.insert(format!("preserve-{name}"), json!(apply_preservation(&vm1, 0, &prop(name), None, &opts).unwrap()));
    }
    doc.insert("oracle".into(), oracle.clone());
    serde_json::to_string_pretty(&doc).unwrap()
}

fn determinism(first: &Value) -> Check {
    let a = full_run(first);
    let again = differential()?.1;
    let b = full_run(&again);
    ensure(a == b, || "two runs differ".into())?;
    let entries = load_corpus(&corpus("")).map_err(|e| e.to_string())?;
    let seq = cross_validate(&entries, Limits::default(), OracleBounds::default(), Exec::Sequential).unwrap();
    let seq = json!({ "corpus": seq, "random": random_differential(500, 2, OracleBounds::default(), Exec::Sequential) });
    ensure(&seq == first, || "sequential and parallel oracle reports differ".into())?;
    Ok(format!("two full runs give byte-identical JSON ({} bytes); sequential matches", a.len()))
}

fn report(n: usize, what: &str, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    let secs = start.elapsed().as_secs_f64();
    match &result {
        Ok(detail) => println!("criterion {n:>2} PASS  {what}: {detail} [{secs:.1}s]"),
        Err(why) => println!("criterion {n:>2} FAIL  {what}: {why} [{secs:.1}s]"),
    }
    result.is_ok()
}

fn main() -> ExitCode {
    let mut oracle = Value::Null;
    let results = [
        report(1, "strategy labels", strategy_labels),
        report(2, "refinement proof obligations", proof_obligations),
        report(3, "LTL verdict table", ltl_table),
        report(4, "GF lemma", gf),
        report(5, "property preservation", preserve),
        report(6, "divergence freedom", theorem1),
        report(7, "beta-dependence", beta),
        report(8, "lemma properties", lemma_properties),
        report(9, "differential oracle", || {
            differential().map(|(line, v)| {
                oracle = v;
                line
            })
        }),
        report(10, "determinism", || {
            ensure(!oracle.is_null(), || "no oracle report to compare".into())?;
            determinism(&oracle)
        }),
    ];
    let failed: Vec<usize> = (1..=10).filter(|i| !results[i - 1]).collect();
    if failed.is_empty() {
        println!("all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("criteria failed: {failed:?}");
        ExitCode::FAILURE
    }
}
