use std::collections::BTreeSet;
use std::path::PathBuf;

use ebltl::refine::{check_refinement_pair, check_strategy, compose_renamings, Po, RefinementChain};
use ebltl::sem::Limits;

fn corpus(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn adjacent_pairs_discharge_every_obligation() {
    let chain = RefinementChain::load(&corpus("vm/chain.json")).unwrap();
    for (i, link) in chain.links.iter().enumerate() {
        let r = check_refinement_pair(&chain.machines[i], &chain.machines[i + 1], link, Limits::default()).unwrap();
        assert!(r.holds(), "{}", serde_json::to_string_pretty(&r).unwrap());
        for o in &r.obligations {
            if o.obligation != Po::Wfd || chain.machines[i + 1].ast.variant.is_some() {
                assert!(o.checked > 0, "{} vacuous for {}", o.obligation, r.concrete_machine);
            }
        }
    }
}

#[test]
fn strategy_labels() {
    let chain = RefinementChain::load(&corpus("vm/chain-vm1.json")).unwrap();
    let r = check_strategy(&chain);
    assert!(r.holds, "{:?}", r.findings);
    assert_eq!(r.labels[1].convergent, set(&["refund"]));
    assert_eq!(r.labels[2].convergent, set(&["refill"]));
    assert_eq!(r.labels[3].convergent, set(&["pay"]));

    let short = RefinementChain::load(&corpus("vm/chain-to-vm3.json")).unwrap();
    let r = check_strategy(&short);
    assert_eq!(r.rules_violated(), BTreeSet::from([6]));
    assert_eq!(r.findings[0].event, "pay");

    let single = RefinementChain::load(&corpus("vm/chain-vm1.json")).unwrap().sub_chain(0, 0);
    assert!(check_strategy(&single).holds);
}

#[test]
fn composed_renamings() {
    let chain = RefinementChain::load(&corpus("vm/chain.json")).unwrap();
    let g = compose_renamings(&chain, 1).unwrap();
    for (c, a) in [
        ("selectBiscuit", "selectItem"),
        ("selectChoc", "selectItem"),
        ("dispenseBiscuit", "dispenseItem"),
        ("dispenseChoc", "dispenseItem"),
    ] {
        assert_eq!(g.apply(c), Some(a));
    }
    for e in ["pay", "refund", "refill"] {
        assert_eq!(g.apply(e), None);
    }
    let id = compose_renamings(&chain, 5).unwrap();
    assert!(id.forward.iter().all(|(k, v)| k == v));
    assert_eq!(id.forward.len(), chain.machines[4].ast.alphabet().len());
    assert!(compose_renamings(&chain, 0).is_err());
    assert!(compose_renamings(&chain, 6).is_err());
    // Any split point composes to the same map.
    for i in 1..=4 {
        for j in i..=5 {
            let upper = compose_renamings(&chain, j).unwrap();
            let mut lower = upper.clone();
            for k in (i..j).rev() {
                lower = lower.then(&chain.links[k - 1].renaming);
            }
            assert_eq!(lower, compose_renamings(&chain, i).unwrap());
        }
    }
}

/// Every mutant breaks exactly the obligation or rule it was built to break.
#[test]
fn mutants_fail_exactly_their_target() {
    let dir = corpus("vm-mutants");
    let expected: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("expected.json")).unwrap()).unwrap();
    for (name, exp) in expected["mutants"].as_object().unwrap() {
        let chain = RefinementChain::load(&dir.join(format!("{name}.json"))).unwrap();
        let mut failing = BTreeSet::new();
        for (i, link) in chain.links.iter().enumerate() {
            let r = check_refinement_pair(&chain.machines[i], &chain.machines[i + 1], link, Limits::default()).unwrap();
            for o in &r.obligations {
                if !o.holds {
                    failing.insert((i as u64 + 1, o.obligation.name().to_string()));
                    assert!(o.witness.is_some());
                }
            }
        }
        let want: BTreeSet<(u64, String)> = exp["obligations"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| (p[0].as_u64().unwrap(), p[1].as_str().unwrap().to_string()))
            .collect();
        assert_eq!(failing, want, "{name}");
        let rules: BTreeSet<u8> = exp["rules"].as_array().unwrap().iter().map(|r| r.as_u64().unwrap() as u8).collect();
        assert_eq!(check_strategy(&chain).rules_violated(), rules, "{name}");
    }
}

#[test]
fn guard_witness_replays() {
    let chain = RefinementChain::load(&corpus("vm-mutants/grd-vm2.json")).unwrap();
    let (abs, conc) = (&chain.machines[0], &chain.machines[1]);
    let r = check_refinement_pair(abs, conc, &chain.links[0], Limits::default()).unwrap();
    let w = r.get(Po::Grd).witness.clone().unwrap();
    assert_eq!(w.event.as_deref(), Some("selectBiscuit"));
    let (c, a) = (w.raw.concrete.unwrap(), w.raw.abstract_state.unwrap());
    let chosen = a.0[abs.var_index("chosen").unwrap()].as_set().unwrap().clone();
    assert!(chosen.contains("biscuit"));
    assert!(chain.links[0].linking.holds(conc, &c, abs, &a).unwrap());
    let cev = conc.ast.event("selectBiscuit").unwrap();
    assert!(conc.guard_holds(cev, &c, &[]).unwrap());
    assert!(!abs.guard_holds(abs.ast.event("selectBiscuit").unwrap(), &a, &[]).unwrap());
}

#[test]
fn variant_witness_replays() {
    let chain = RefinementChain::load(&corpus("vm-mutants/wfd-vm2.json")).unwrap();
    let conc = &chain.machines[1];
    let r = check_refinement_pair(&chain.machines[0], conc, &chain.links[0], Limits::default()).unwrap();
    let w = r.get(Po::Wfd).witness.clone().unwrap();
    let (s, t) = (w.raw.concrete.unwrap(), w.raw.target.unwrap());
    let (before, after) = (conc.variant_at(&s).unwrap().unwrap(), conc.variant_at(&t).unwrap().unwrap());
    assert_eq!(w.variant, Some((before, after)));
    let ev = conc.ast.event(w.event.as_deref().unwrap()).unwrap();
    let fired = conc.fire(ev, Some(&s)).unwrap();
    assert!(fired.enabled.iter().any(|f| f.target == t));
    match ev.effective_status() {
        ebltl::dsl::Status::Convergent => assert!(after >= before),
        ebltl::dsl::Status::Anticipated => assert!(after > before),
        ebltl::dsl::Status::Ordinary => panic!("ordinary events carry no variant obligation"),
    }
}

/// A machine refines itself under the identity renaming and variable equality.
#[test]
fn identity_refinement() {
    use ebltl::refine::StepManifest;
    use ebltl::sem::Model;
    for f in ["vm0.eb", "vm1.eb", "vm2.eb", "vm3.eb", "vm4.eb"] {
        let mut ast = ebltl::refine::load_model(&corpus(&format!("vm/{f}"))).unwrap().ast;
        ast.refines = None;
        ast.linking = None;
        for e in &mut ast.events {
            e.refines = None;
        }
        let m = Model::new(ast).unwrap();
        let step = StepManifest {
            renaming: Some(m.ast.alphabet().into_iter().map(|e| (e.clone(), e)).collect()),
            linking: None,
        };
        let chain = RefinementChain::build(f.into(), vec![m.clone(), m], &[step]).unwrap();
        let r = check_refinement_pair(&chain.machines[0], &chain.machines[1], &chain.links[0], Limits::default()).unwrap();
        assert!(r.holds(), "{f}: {:?}", r.failing());
    }
}

#[test]
fn divergence_freedom() {
    use ebltl::refine::{check_ca, check_theorem1};
    use ebltl::sem::explore;
    let chain = RefinementChain::load(&corpus("vm/chain-vm1.json")).unwrap();
    let g4 = explore(&chain.machines[3], Limits::default()).unwrap();
    let o0 = set(&["selectBiscuit", "selectChoc", "dispenseBiscuit", "dispenseChoc"]);
    assert!(check_ca(&g4, &set(&["refund", "refill", "pay"]), &o0).holds);

    let t = check_theorem1(&chain, &g4, Limits::default()).unwrap();
    assert_eq!(t.c_star, set(&["refund", "refill", "pay"]));
    assert_eq!(t.o_star, o0);
    assert!(t.hypotheses_hold && t.direct.holds && !t.disagreement);

    let full = RefinementChain::load(&corpus("vm/chain.json")).unwrap();
    let t = check_theorem1(&full, &g4, Limits::default()).unwrap();
    assert_eq!(t.o_star, o0);
    assert!(t.hypotheses_hold && t.direct.holds);

    let single = chain.sub_chain(0, 0);
    let g1 = explore(&single.machines[0], Limits::default()).unwrap();
    let t = check_theorem1(&single, &g1, Limits::default()).unwrap();
    assert!(t.c_star.is_empty() && t.direct.holds);

    // Without the refund guard, pay and refund alternate forever.
    let bad = RefinementChain::load(&corpus("vm-mutants/grd-vm4.json")).unwrap();
    let gb = explore(&bad.machines[3], Limits::default()).unwrap();
    let t = check_theorem1(&bad, &gb, Limits::default()).unwrap();
    assert!(!t.hypotheses_hold && !t.direct.holds && !t.disagreement);
    let w = t.direct.witness.unwrap();
    assert!(w.cycle.iter().all(|e| e == "pay" || e == "refund"));
    assert!(gb.realizes(&w.prefix, &w.cycle));
}

#[test]
fn theorem_and_graph_agree_on_every_chain() {
    use ebltl::refine::check_theorem1;
    use ebltl::sem::explore;
    let mut manifests: Vec<PathBuf> = vec![];
    for dir in ["vm", "vm-mutants"] {
        for e in std::fs::read_dir(corpus(dir)).unwrap() {
            let p = e.unwrap().path();
            if p.extension().is_some_and(|x| x == "json") && p.file_name().unwrap() != "expected.json" {
                manifests.push(p);
            }
        }
    }
    manifests.sort();
    assert!(manifests.len() >= 10);
    for m in manifests {
        let chain = RefinementChain::load(&m).unwrap();
        let g = explore(chain.machines.last().unwrap(), Limits::default()).unwrap();
        let t = check_theorem1(&chain, &g, Limits::default()).unwrap();
        assert!(!t.disagreement, "{}", m.display());
    }
}
