//! Command-line driver for `diffmod`.
//!
//! Every command produces a [`Report`]: a versioned JSON document with one
//! entry per case branch. Exit status is 0 on success, 2 when a result
//! depends on a parameter whose vanishing was not decided (rerun with
//! `--split` or `--assume`), and 1 on any other error.

pub mod commands;
pub mod corpus;
pub mod input;
pub mod report;

use std::time::Instant;

use serde_json::Value;

use diffmod::spencer::Family;
use diffmod::Error;

pub use commands::Command;
pub use report::{CaseReport, Diagnostic, InputInfo, Report, Status, SCHEMA};

fn case_report(case: String, outcome: Result<(Value, Vec<String>), Error>, start: Instant) -> CaseReport {
    let timing_us = start.elapsed().as_micros() as u64;
    match outcome {
        Ok((result, provisos)) => {
            CaseReport { case, status: Status::Ok, provisos, result, error: None, timing_us }
        }
        Err(e) => CaseReport {
            case,
            status: if matches!(e, Error::CaseSplitRequired { .. }) { Status::Undecided } else { Status::Error },
            provisos: vec![],
            result: Value::Null,
            error: Some(Diagnostic::from_error(&e)),
            timing_us,
        },
    }
}

/// Runs `cmd` on `.dms` source text.
pub fn run_source(
    path: Option<&str>,
    text: &str,
    cmd: &Command,
    assume: &[String],
    split: bool,
) -> Report {
    let info = InputInfo {
        path: path.map(str::to_string),
        sha256: report::sha256_hex(text.as_bytes()),
        assume: assume.to_vec(),
    };
    let mut cases = Vec::new();
    let start = Instant::now();
    match input::prepare(text, assume) {
        Err(e) => cases.push(case_report("generic".into(), Err(e), start)),
        Ok(inp) => {
            for case in inp.cases(split) {
                let start = Instant::now();
                let outcome = inp.system(&case).and_then(|sys| {
                    let v = commands::run(&sys, cmd)?;
                    Ok((v, commands::provisos_text(&sys.session)))
                });
                cases.push(case_report(input::label(&case), outcome, start));
            }
        }
    }
    Report { schema: SCHEMA, command: cmd.name().into(), input: info, cases }
}

pub fn run_spencer(family: &str, n: usize) -> Report {
    let spec = format!("{family} {n}");
    let start = Instant::now();
    let outcome = family
        .parse::<Family>()
        .and_then(|f| commands::spencer(f, n))
        .map(|v| (v, vec![]));
    Report {
        schema: SCHEMA,
        command: "spencer".into(),
        input: InputInfo { path: None, sha256: report::sha256_hex(spec.as_bytes()), assume: vec![] },
        cases: vec![case_report("generic".into(), outcome, start)],
    }
}
