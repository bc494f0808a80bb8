use std::time::Instant;

use ebltl::exec::Exec;
use ebltl::oracle::{corpus_root, cross_validate, load_corpus, OracleBounds, Source};
use ebltl::sem::Limits;

#[test]
fn corpus_table_agrees() {
    let t = Instant::now();
    let entries = load_corpus(&corpus_root()).unwrap();
    let names: Vec<&str> = entries.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(names, ["lift", "vm", "vm-mutants"]);
    let r = cross_validate(&entries, Limits::default(), OracleBounds::default(), Exec::default()).unwrap();
    for row in &r.rows {
        assert!(row.error.is_none(), "{}/{} {}: {:?}", row.entry, row.machine, row.property, row.error);
        assert!(row.agree, "{}", serde_json::to_string_pretty(row).unwrap());
        assert!(row.matches_expected, "{}", serde_json::to_string_pretty(row).unwrap());
        // Every refutation is found by lasso enumeration alone; holding rows may need the product.
        assert!(row.checker.holds || row.enumeration_exact, "{}/{} {}", row.entry, row.machine, row.property);
    }
    assert!(r.passed());
    let expected: usize = entries.iter().map(|e| e.verdicts.values().map(|m| m.len()).sum::<usize>()).sum();
    assert_eq!(r.rows.iter().filter(|row| row.expected.is_some()).count(), expected);
    assert!(r.rows.len() >= 45 + 6);
    assert!(t.elapsed().as_secs() < 60);
}

#[test]
fn modes_give_the_same_report() {
    let entries = load_corpus(&corpus_root()).unwrap();
    let a = cross_validate(&entries, Limits::default(), OracleBounds::default(), Exec::Sequential).unwrap();
    let b = cross_validate(&entries, Limits::default(), OracleBounds::default(), Exec::Parallel).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn derived_verdicts_carry_notes() {
    for e in load_corpus(&corpus_root()).unwrap() {
        for row in e.verdicts.values() {
            for v in row.values() {
                assert!(v.source == Source::Reference || v.note.is_some());
            }
        }
    }
}
