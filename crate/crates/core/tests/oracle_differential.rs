use std::time::Instant;

use ebltl::dsl::Formula;
use ebltl::ltl::{holds_on_trace, model_check};
use ebltl::oracle::random::{letters, random_formula, random_graph, random_trace, rng};
use ebltl::oracle::{oracle_holds_on, oracle_model_check, OracleBounds};
use ebltl::sem::StateGraph;

fn agree(g: &StateGraph, phi: &Formula) {
    let mc = model_check(g, phi).unwrap();
    let or = oracle_model_check(g, phi, OracleBounds::default()).unwrap();
    assert_eq!(mc.holds, or.holds, "{phi} on\n{}", g.to_edge_list());
    for cx in [mc.counterexample, or.counterexample].into_iter().flatten() {
        assert!(!holds_on_trace(&cx, phi), "{cx} satisfies {phi}");
        assert!(!oracle_holds_on(&cx, phi), "{cx} satisfies {phi}");
        assert!(g.realizes(&cx.prefix, &cx.cycle), "{cx} is not a trace of\n{}", g.to_edge_list());
    }
}

#[test]
fn evaluators_agree_on_random_traces() {
    let mut r = rng(1);
    for n in 1..=4 {
        let a = letters(n);
        for _ in 0..250 {
            let u = random_trace(&mut r, &a);
            let phi = random_formula(&mut r, &a, 5);
            assert_eq!(holds_on_trace(&u, &phi), oracle_holds_on(&u, &phi), "{phi} on {u}");
        }
    }
}

#[test]
fn checkers_agree_on_random_graphs() {
    let start = Instant::now();
    let mut r = rng(2);
    for i in 0..500 {
        let a = letters(1 + i % 4);
        let g = random_graph(&mut r, 50, &a);
        let phi = random_formula(&mut r, &a, 5);
        agree(&g, &phi);
    }
    assert!(start.elapsed().as_secs() < 60, "took {:?}", start.elapsed());
}
