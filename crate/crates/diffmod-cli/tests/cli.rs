use std::path::PathBuf;
use std::process::{Command, Output};

use diffmod_cli::{corpus, run_source, Report};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn diffmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffmod")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).expect("stdout is a report")
}

fn corpus_file(name: &str) -> String {
    corpus_dir().join(name).display().to_string()
}

#[test]
fn cc_of_ex1_8_is_a_single_row() {
    let out = diffmod(&["cc", &corpus_file("ex1_8.dms")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.schema, 1);
    let rows = r.cases[0].result["conditions"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["text"], "-d12(u) + u + d22(v)");
}

#[test]
fn ext_with_assumption_picks_the_nonzero_branch() {
    let out = diffmod(&["ext", "--i", "1", "--assume", "c!=0", &corpus_file("ex3_2.dms")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.cases.len(), 1);
    assert_eq!(r.cases[0].case, "c!=0");
    let ext = &r.cases[0].result["ext"][0];
    assert_eq!(ext["vanishing"], false);
    assert_eq!(ext["generators"].as_array().unwrap().len(), 1);
}

#[test]
fn undecided_parameter_exits_with_two() {
    let out = diffmod(&["ext", "--i", "2", &corpus_file("ex3_2.dms")]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out).cases[0].error.as_ref().unwrap().kind, "case_split_required");
}

#[test]
fn split_runs_every_branch() {
    let out = diffmod(&["ext", "--i", "2", "--split", &corpus_file("ex3_2.dms")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let got: Vec<(String, bool)> = r
        .cases
        .iter()
        .map(|c| (c.case.clone(), c.result["ext"][0]["vanishing"].as_bool().unwrap()))
        .collect();
    assert_eq!(got, [("c=0".to_string(), false), ("c!=0".to_string(), true)]);
}

#[test]
fn spencer_killing_four() {
    let out = diffmod(&["spencer", "--family", "killing", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = &report(&out).cases[0].result;
    assert_eq!(v["h2"], 20);
    assert_eq!(v["h3"], 20);
}

#[test]
fn parse_errors_exit_with_one_and_a_span() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.dms");
    std::fs::write(&f, "vars x; unknowns y; P: d1(y = u;").unwrap();
    let out = diffmod(&["cc", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let e = report(&out).cases[0].error.clone().unwrap();
    assert_eq!(e.kind, "parse");
    assert!(e.span.is_some());
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(diffmod(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(diffmod(&["ext"]).status.code(), Some(1));
    assert_eq!(diffmod(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_file_exits_with_one() {
    assert_eq!(diffmod(&["cc", "/nonexistent/x.dms"]).status.code(), Some(1));
}

#[test]
fn report_round_trips_through_json() {
    let text = std::fs::read_to_string(corpus_dir().join("ex3_1.dms")).unwrap();
    let r = run_source(None, &text, &diffmod_cli::Command::Ext { index: None }, &[], false);
    let back: Report = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn runs_are_identical_apart_from_timing() {
    let text = std::fs::read_to_string(corpus_dir().join("ex1_7.dms")).unwrap();
    let cmd = diffmod_cli::Command::Sequence { max_steps: None };
    let a = run_source(None, &text, &cmd, &[], false).without_timing();
    let b = run_source(None, &text, &cmd, &[], false).without_timing();
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn out_dir_gets_json_and_markdown() {
    let dir = tempfile::tempdir().unwrap();
    let out = diffmod(&["--out", dir.path().to_str().unwrap(), "complete", &corpus_file("killing2.dms")]);
    assert_eq!(out.status.code(), Some(0));
    let md = std::fs::read_to_string(dir.path().join("report.md")).unwrap();
    assert!(md.contains("Janet board"));
    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let r: Report = serde_json::from_str(&json).unwrap();
    assert_eq!(r.cases[0].result["basis"].as_array().unwrap().len(), 4);
}

#[test]
fn full_corpus_matches_fixtures() {
    let s = corpus::run_corpus(&corpus_dir(), None, false).unwrap();
    assert!(s.entries.len() >= 13, "{}", s.render());
    assert!(s.passed(), "{}", s.render());
}

#[test]
fn corpus_filter_runs_both_branches() {
    let s = corpus::run_corpus(&corpus_dir(), Some("3.2"), false).unwrap();
    let cases: Vec<&str> = s.entries.iter().map(|e| e.case.as_str()).collect();
    assert_eq!(cases, ["c=0", "c!=0"]);
}

#[test]
fn empty_corpus_is_a_success() {
    let dir = tempfile::tempdir().unwrap();
    let s = corpus::run_corpus(dir.path(), None, false).unwrap();
    assert!(s.entries.is_empty());
    assert!(s.passed());
}

#[test]
fn bless_then_detect_drift() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(corpus_dir().join("ex1_8.dms"), dir.path().join("ex1_8.dms")).unwrap();
    let s = corpus::run_corpus(dir.path(), None, false).unwrap();
    assert_eq!(s.entries[0].outcome, corpus::Outcome::Missing);
    corpus::run_corpus(dir.path(), None, true).unwrap();
    assert!(corpus::run_corpus(dir.path(), None, false).unwrap().passed());

    let fixture = dir.path().join("expected/ex1_8.json");
    let text = std::fs::read_to_string(&fixture).unwrap().replace("d22(v)", "d11(v)");
    std::fs::write(&fixture, text).unwrap();
    let s = corpus::run_corpus(dir.path(), None, false).unwrap();
    assert!(!s.passed());
    match &s.entries[0].outcome {
        corpus::Outcome::Mismatch(diff) => assert!(diff.contains("+") && diff.contains("d22(v)")),
        other => panic!("expected a mismatch, got {other:?}"),
    }
}
