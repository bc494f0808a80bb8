use std::path::PathBuf;
use std::sync::Arc;

use ebltl::dsl::formula::{parse_property_file, NamedFormula};
use ebltl::dsl::Formula;
use ebltl::ltl::{holds_on_trace, model_check, Trace};
use ebltl::sem::{explore, Limits, Model, StateGraph};

fn read(rel: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn graph(rel: &str) -> StateGraph {
    explore(&Arc::new(Model::parse(&read(rel)).unwrap()), Limits::default()).unwrap()
}

fn props() -> Vec<NamedFormula> {
    parse_property_file(&read("vm/properties.ltl")).unwrap()
}

fn prop(name: &str) -> Formula {
    props().into_iter().find(|p| p.name == name).unwrap().formula
}

fn check(g: &StateGraph, name: &str, expect: bool) -> Option<Trace> {
    let phi = prop(name);
    let v = model_check(g, &phi).unwrap();
    assert_eq!(v.holds, expect, "{} {name}: {:?}", g.name, v.counterexample.map(|t| t.to_string()));
    if let Some(cx) = &v.counterexample {
        assert!(!holds_on_trace(cx, &phi), "{cx} should refute {name}");
        assert!(g.realizes(&cx.prefix, &cx.cycle), "{cx} is not a trace of {}", g.name);
    }
    v.counterexample
}

#[test]
fn vm1_table() {
    let g = graph("vm/vm1.eb");
    for p in ["phi1", "phi2", "phi3"] {
        check(&g, p, true);
    }
    let cx = check(&g, "phi4", false).unwrap();
    assert!(cx.prefix.iter().chain(&cx.cycle).any(|e| e == "selectChoc"));
    assert!(!cx.cycle.iter().any(|e| e == "dispenseChoc"));
    check(&g, "phi5", false);
}

#[test]
fn vm2_table() {
    let g = graph("vm/vm2.eb");
    check(&g, "phi7", true);
    let cx = check(&g, "phi6", false).unwrap();
    assert!(cx.cycle.iter().all(|e| e == "pay"));
    for p in ["phi1", "phi2", "phi3"] {
        let cx = check(&g, p, false).unwrap();
        assert!(cx.cycle.iter().any(|e| e == "pay"), "{p}: {cx}");
    }
}

#[test]
fn vm4_table() {
    let g = graph("vm/vm4.eb");
    for p in ["phi1", "phi2", "phi3", "phi6", "phi7", "gf0"] {
        check(&g, p, true);
    }
}

#[test]
fn vm0_item_property() {
    check(&graph("vm/vm0.eb"), "item", true);
}

#[test]
fn finite_traces_are_counterexamples() {
    let g = StateGraph::from_labelled_edges("toy", 2, vec![0], &[(0, "a", 1)], &["a"]);
    let v = model_check(&g, &ebltl::dsl::parse_formula("G F [a]").unwrap()).unwrap();
    assert_eq!(v.counterexample, Some(Trace::finite(["a"])));
    let v = model_check(&g, &ebltl::dsl::parse_formula("F [a]").unwrap()).unwrap();
    assert!(v.holds);
}

#[test]
fn foreign_atoms_warn() {
    let g = graph("vm/vm1.eb");
    let v = model_check(&g, &ebltl::dsl::parse_formula("G ![pay]").unwrap()).unwrap();
    assert!(v.holds);
    assert_eq!(v.warnings.len(), 1);
}
