use std::collections::BTreeSet;
use std::path::PathBuf;

use ebltl::dsl::{parse_formula, parse_property_file, Formula};
use ebltl::ltl::{holds_on_trace, model_check};
use ebltl::preserve::{apply_lemma_gf, apply_preservation, Certificate, PreserveError, PreserveOptions};
use ebltl::refine::RefinementChain;
use ebltl::sem::{explore, Limits};

fn corpus(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn chain(rel: &str) -> RefinementChain {
    RefinementChain::load(&corpus(rel)).unwrap()
}

fn prop(name: &str) -> Formula {
    let src = std::fs::read_to_string(corpus("vm/properties.ltl")).unwrap();
    parse_property_file(&src).unwrap().into_iter().find(|p| p.name == name).unwrap().formula
}

fn failed_ids(c: &Certificate) -> BTreeSet<String> {
    c.failed().into_iter().map(|h| h.id.clone()).collect()
}

fn assert_established(c: &Certificate) {
    assert!(c.established(), "{}", serde_json::to_string_pretty(c).unwrap());
    let v = c.cross_validation.as_ref().unwrap();
    assert!(v.holds, "conclusion refuted on the last machine: {:?}", v.counterexample);
    assert!(c.consistent);
}

#[test]
fn gf_on_full_chains() {
    let expected = parse_formula("G F ([dispenseBiscuit] | [dispenseChoc] | [selectBiscuit] | [selectChoc])").unwrap();
    for (rel, lemma) in [("vm/chain-vm1.json", 1), ("vm/chain.json", 3)] {
        let c = apply_lemma_gf(&chain(rel), &PreserveOptions::default()).unwrap();
        assert_established(&c);
        assert_eq!(c.lemma, lemma, "{rel}");
        assert_eq!(c.conclusion.as_ref(), Some(&expected), "{rel}");
    }
}

#[test]
fn gf_blocked_by_anticipated_event() {
    let c = apply_lemma_gf(&chain("vm/chain-to-vm3.json"), &PreserveOptions::default()).unwrap();
    assert!(!c.established());
    let failed = failed_ids(&c);
    assert!(failed.contains("no-anticipated"), "{failed:?}");
    let h = c.hypotheses.iter().find(|h| h.id == "no-anticipated").unwrap();
    assert_eq!(h.evidence, serde_json::json!(["pay"]));
}

#[test]
fn properties_carried_down() {
    let full = chain("vm/chain-vm1.json");
    for name in ["phi2", "phi3"] {
        let c = apply_preservation(&full, 0, &prop(name), None, &PreserveOptions::default()).unwrap();
        assert_established(&c);
        assert_eq!(c.lemma, 2);
        assert_eq!(c.conclusion, Some(prop(name)));
    }
    let c = apply_preservation(&full, 1, &prop("phi7"), None, &PreserveOptions::default()).unwrap();
    assert_established(&c);
    let c = apply_preservation(&chain("vm/chain-vm2.json"), 0, &prop("phi7"), None, &PreserveOptions::default()).unwrap();
    assert_established(&c);
}

#[test]
fn property_translated_through_renaming() {
    let c = apply_preservation(&chain("vm/chain.json"), 0, &prop("item"), None, &PreserveOptions::default()).unwrap();
    assert_established(&c);
    assert_eq!(c.lemma, 4);
    let expected = parse_formula(
        "G(([selectBiscuit] | [selectChoc]) => F([dispenseBiscuit] | [dispenseChoc]))",
    )
    .unwrap();
    assert_eq!(c.conclusion, Some(expected));
}

#[test]
fn unsatisfied_property_is_blocked() {
    let c = apply_preservation(&chain("vm/chain-vm1.json"), 0, &prop("phi4"), None, &PreserveOptions::default()).unwrap();
    assert!(!c.established());
    assert_eq!(failed_ids(&c), BTreeSet::from(["satisfies".to_string()]));
    let h = c.hypotheses.iter().find(|h| h.id == "satisfies").unwrap();
    let u: ebltl::ltl::Trace = serde_json::from_value(h.evidence["counterexample"].clone()).unwrap();
    assert!(!holds_on_trace(&u, &prop("phi4")));
}

#[test]
fn beta_sensitive_property_is_blocked() {
    let phi = parse_formula("!G[pay]").unwrap();
    let c = apply_preservation(&chain("vm/chain-vm2.json"), 0, &phi, None, &PreserveOptions::default()).unwrap();
    assert!(failed_ids(&c).contains("beta-dependent"));
}

#[test]
fn last_level_is_rejected() {
    let ch = chain("vm/chain-vm1.json");
    let r = apply_preservation(&ch, 3, &prop("phi7"), None, &PreserveOptions::default());
    assert!(matches!(r, Err(PreserveError::LastLevel { i: 3, n: 3 })));
}

#[test]
fn negative_controls() {
    let ch = chain("vm/chain-vm1.json");
    let g = explore(&ch.machines[1], Limits::default()).unwrap();
    for name in ["phi1", "phi2", "phi3"] {
        let v = model_check(&g, &prop(name)).unwrap();
        assert!(!v.holds, "VM2 should violate {name}");
    }
}
