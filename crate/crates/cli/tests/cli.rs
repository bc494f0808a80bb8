use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ebltl"))
        .current_dir(root())
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf8"),
        String::from_utf8(out.stderr).expect("utf8"),
    )
}

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(root().join("docs/report.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).expect("schema compiles")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = vec!["--json"];
    a.extend_from_slice(args);
    let (code, out, _) = run(&a);
    let doc: Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}"));
    let v = validator();
    let errors: Vec<String> = v.iter_errors(&doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{args:?} does not match the schema: {errors:?}");
    assert_eq!(doc["exit_code"], code, "{args:?}");
    (code, doc)
}

const CASES: &[(&[&str], i32)] = &[
    (&["parse", "corpus/vm/vm0.eb"], 0),
    (&["parse", "--prop", "G([selectChoc] => F[dispenseChoc])"], 0),
    (&["parse", "--prop", "G[("], 3),
    (&["explore", "corpus/vm/vm4.eb"], 0),
    (&["po", "--chain", "corpus/vm/chain.json"], 0),
    (&["po", "--chain", "corpus/vm-mutants/grd-vm4.json", "--step", "3"], 1),
    (&["strategy", "--chain", "corpus/vm/chain.json"], 0),
    (&["strategy", "--chain", "corpus/vm/chain-to-vm3.json"], 1),
    (&["strategy", "--chain", "corpus/vm-mutants/grd-vm4.json", "--divergence"], 1),
    (&["mc", "corpus/vm/vm1.eb", "--prop", "phi4"], 1),
    (&["mc", "corpus/vm/vm4.eb", "--prop", "phi1"], 0),
    (&["mc", "--chain", "corpus/lift/chain.json", "--prop", "ground_after_top"], 1),
    (&["mc", "--bound-states", "2", "corpus/vm/vm4.eb", "--prop", "phi1"], 4),
    (&["mc", "corpus/vm/missing.eb", "--prop", "phi1"], 3),
    (&["beta", "--prop", "G F[pay]", "corpus/vm/vm2.eb"], 0),
    (&["beta", "--prop", "!G[pay]", "corpus/vm/vm2.eb"], 1),
    (&["translate", "--chain", "corpus/vm/chain.json", "--prop", "item"], 0),
    (&["gf", "--chain", "corpus/vm/chain.json"], 0),
    (&["gf", "--chain", "corpus/vm/chain-vm2.json"], 2),
    (&["preserve", "--chain", "corpus/vm/chain.json", "--at", "1", "--prop", "phi2"], 0),
    (&["preserve", "--chain", "corpus/vm/chain.json", "--at", "1", "--prop", "phi4"], 2),
];

#[test]
fn exit_codes_and_schema() {
    for (args, code) in CASES {
        let (got, doc) = json(args);
        assert_eq!(got, *code, "{args:?}: {doc}");
        let (text_code, _, _) = run(args);
        assert_eq!(text_code, got, "text and json modes disagree on {args:?}");
    }
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(run(&["mc"]).0, 3);
    assert_eq!(run(&["frobnicate"]).0, 3);
    assert_eq!(run(&["--help"]).0, 0);
    let (code, doc) = json(&["po", "--chain", "corpus/vm/chain.json", "--step", "9"]);
    assert_eq!(code, 3);
    assert_eq!(doc["error"]["kind"], "usage");
}

#[test]
fn counterexample_in_both_modes() {
    let args = ["mc", "corpus/vm/vm1.eb", "--prop", "phi4"];
    let (_, doc) = json(&args);
    let cx = &doc["report"]["verdict"]["counterexample"];
    assert_eq!(cx["prefix"], serde_json::json!(["selectChoc"]));
    assert_eq!(cx["cycle"], serde_json::json!(["selectBiscuit", "dispenseBiscuit"]));
    let (_, text, _) = run(&args);
    assert!(text.contains(cx["text"].as_str().unwrap()), "{text}");
}

#[test]
fn json_is_deterministic() {
    for args in [
        &["--json", "gf", "--chain", "corpus/vm/chain.json"][..],
        &["--json", "po", "--chain", "corpus/vm-mutants/wfd-vm2.json"],
        &["--json", "preserve", "--chain", "corpus/vm/chain.json", "--at", "0", "--prop", "item"],
        &["--json", "oracle", "--random", "20"],
    ] {
        let a = run(args).1;
        let b = run(args).1;
        assert_eq!(a, b, "{args:?}");
    }
}
