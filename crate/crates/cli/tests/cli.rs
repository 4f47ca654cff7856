use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::{Command, Output};

use scclab::io::{serialize_params, serialize_scc};
use scclab::models::{generate_scc, ModelParams, ModelSpec, NscParams, RcgParams};
use scclab::{Mask, Prob, Universe};

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("scclab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn scclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scclab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn abc() -> Universe {
    Universe::letters(3).unwrap()
}

fn rcg() -> ModelSpec {
    let m = BTreeMap::from([
        (Mask(0b011), Prob::ratio(1, 2)),
        (Mask(0b100), Prob::ratio(1, 4)),
        (Mask(0b111), Prob::ratio(1, 4)),
    ]);
    ModelSpec::standard(ModelParams::Rcg(RcgParams { m }))
}

fn nsc() -> ModelSpec {
    let sigma = BTreeMap::from([
        (Mask(0b001), Prob::int(1)),
        (Mask(0b010), Prob::int(2)),
        (Mask(0b011), Prob::int(4)),
        (Mask(0b100), Prob::int(3)),
    ]);
    ModelSpec::standard(ModelParams::Nsc(NscParams { nests: vec![Mask(0b011), Mask(0b100)], sigma }))
}

fn scc_file(name: &str, spec: &ModelSpec) -> String {
    let scc = generate_scc(spec, &abc()).unwrap();
    scratch(name, &serialize_scc(&scc)).to_string_lossy().into_owned()
}

#[test]
fn check_on_rcg_data_holds() {
    let path = scc_file("rcg.json", &rcg());
    let o = scclab(&["check", &path, "--axioms", "POS1,REL_ADD"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout(&o);
    assert_eq!(v[0]["axiom"], "POS1");
    assert_eq!(v[1]["holds"], true);
}

#[test]
fn check_reports_failures_with_exit_one() {
    let path = scc_file("nsc-check.json", &nsc());
    let o = scclab(&["check", &path, "--axioms", "REL_ADD", "--witness-cap", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout(&o);
    assert_eq!(v[0]["holds"], false);
    assert_eq!(v[0]["witnesses"].as_array().unwrap().len(), 2);
}

#[test]
fn classify_nsc_example() {
    let path = scc_file("nsc-classify.json", &nsc());
    let o = scclab(&["classify", &path]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout(&o);
    assert_eq!(v["membership"]["nsc"]["verdict"], "holds");
    assert_eq!(v["membership"]["logit"]["verdict"], "fails");
}

#[test]
fn identify_logit_on_nsc_data_is_rejected() {
    let path = scc_file("nsc-identify.json", &nsc());
    let o = scclab(&["identify", &path, "--model", "logit"]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout(&o);
    assert_eq!(v["reason"], "precondition_failed");
    assert_eq!(v["report"]["axiom"], "FULL_SUPPORT");
    let o = scclab(&["identify", &path, "--model", "auto"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o)["model"], "nsc");
}

#[test]
fn gen_and_eval_from_a_parameter_document() {
    let params = scratch("rcg-params.json", &serialize_params(&rcg(), &abc()));
    let params = params.to_str().unwrap();
    let out = std::env::temp_dir().join(format!("scclab-cli-{}", std::process::id())).join("gen.json");
    let o = scclab(&["gen", "--model", "rcg", "--params", params, "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let generated = std::fs::read_to_string(&out).unwrap();
    let expected = serialize_scc(&generate_scc(&rcg(), &abc()).unwrap()) + "\n";
    assert_eq!(generated, expected);

    let o = scclab(&["eval", "--params", params, "--menu", "a,c", "--set", "c"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o)["p"], "1/4");

    let o = scclab(&["gen", "--model", "logit", "--params", params]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn estimate_counts() {
    let counts = scratch("counts.csv", "menu;set;count\na;a;1\nb;b;1\na,b;a;50\na,b;b;25\na,b;a,b;25\n");
    let o = scclab(&["estimate", counts.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let scc = scclab::io::parse_scc(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(scc.lookup(Mask(0b01), Mask(0b11)).unwrap(), Prob::float(0.5));
}

#[test]
fn fuzz_single_model() {
    let o = scclab(&["fuzz", "--model", "ic", "--trials", "5", "--n", "2,3", "--seed", "9"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o)["failures"], 0);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let path = scc_file("nsc-determinism.json", &nsc());
    let a = scclab(&["check", &path, "--axioms", "all"]);
    let b = scclab(&["check", &path, "--axioms", "all"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn malformed_input_exits_two() {
    let bad = scratch("bad.json", "{\"items\": [\"a\"]");
    let o = scclab(&["classify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert_eq!(scclab(&["check"]).status.code(), Some(2));
    let o = scclab(&["check", "/nonexistent/file.json"]);
    assert_eq!(o.status.code(), Some(2));
}
