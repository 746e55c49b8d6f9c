//! Golden-file runner over a directory of `.dms` systems.
//!
//! Each system is run once per case branch through a fixed list of
//! commands; the combined payload is compared with
//! `expected/<stem>.json` (or `expected/<stem>@<case>.json` for split
//! systems).

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use similar::TextDiff;

use crate::commands::{self, Command};
use crate::input;
use crate::report::Diagnostic;

const SUITE: &[(&str, Command)] = &[
    ("complete", Command::Complete),
    ("cc", Command::Cc),
    ("sequence", Command::Sequence { max_steps: None }),
    ("adjoint", Command::Adjoint),
    ("rank", Command::Rank),
    ("duality", Command::Duality),
    ("ext", Command::Ext { index: None }),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Blessed,
    Missing,
    Mismatch(String),
    /// The file itself does not parse or elaborate.
    Broken(String),
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub system: String,
    pub case: String,
    pub fixture: PathBuf,
    pub provisos: Vec<String>,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Default)]
pub struct Summary {
    pub entries: Vec<Entry>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| matches!(e.outcome, Outcome::Pass | Outcome::Blessed))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let tag = match &e.outcome {
                Outcome::Pass => "PASS",
                Outcome::Blessed => "BLESSED",
                Outcome::Missing => "MISSING",
                Outcome::Mismatch(_) => "FAIL",
                Outcome::Broken(_) => "ERROR",
            };
            out.push_str(&format!("{tag} {} [{}]", e.system, e.case));
            if !e.provisos.is_empty() {
                out.push_str(&format!(" provisos: {}", e.provisos.join("; ")));
            }
            out.push('\n');
            match &e.outcome {
                Outcome::Mismatch(d) => out.push_str(d),
                Outcome::Broken(m) => out.push_str(&format!("  {m}\n")),
                Outcome::Missing => out.push_str(&format!("  no fixture at {}\n", e.fixture.display())),
                _ => {}
            }
        }
        let ok = self.entries.iter().filter(|e| matches!(e.outcome, Outcome::Pass | Outcome::Blessed)).count();
        out.push_str(&format!("{ok}/{} passed\n", self.entries.len()));
        out
    }
}

/// `3.2` selects `ex3_2.dms`: dots in the filter match underscores.
pub fn normalize_filter(f: &str) -> String {
    f.replace('.', "_")
}

fn case_slug(label: &str) -> String {
    label.replace("!=0", "-nonzero").replace("=0", "-zero").replace(',', "_")
}

/// Payload of the whole suite for one case of one system.
pub fn payload(text: &str, case: &diffmod::dsl::Case) -> Result<(Value, Vec<String>), diffmod::Error> {
    let inp = input::prepare(text, &[])?;
    let mut results = Map::new();
    let mut provisos: Vec<String> = Vec::new();
    for (name, cmd) in SUITE {
        let sys = inp.system(case)?;
        let v = match commands::run(&sys, cmd) {
            Ok(v) => v,
            Err(e) => json!({ "error": Diagnostic::from_error(&e) }),
        };
        provisos.extend(commands::provisos_text(&sys.session));
        results.insert((*name).into(), v);
    }
    provisos.sort();
    provisos.dedup();
    results.insert("provisos".into(), json!(provisos));
    results.insert("case".into(), json!(input::label(case)));
    Ok((Value::Object(results), provisos))
}

fn run_file(path: &Path, expected_dir: &Path, bless: bool) -> Vec<Entry> {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy().to_string();
    let broken = |msg: String| Entry {
        system: stem.clone(),
        case: "generic".into(),
        fixture: expected_dir.join(format!("{stem}.json")),
        provisos: vec![],
        outcome: Outcome::Broken(msg),
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return vec![broken(e.to_string())],
    };
    let inp = match input::prepare(&text, &[]) {
        Ok(i) => i,
        Err(e) => return vec![broken(e.to_string())],
    };
    let mut out = Vec::new();
    for case in inp.cases(true) {
        let label = input::label(&case);
        let fixture = if case.is_empty() {
            expected_dir.join(format!("{stem}.json"))
        } else {
            expected_dir.join(format!("{stem}@{}.json", case_slug(&label)))
        };
        let (value, provisos) = match payload(&text, &case) {
            Ok(p) => p,
            Err(e) => {
                out.push(Entry { case: label, ..broken(e.to_string()) });
                continue;
            }
        };
        let actual = serde_json::to_string_pretty(&value).expect("payload serializes") + "\n";
        let outcome = if bless {
            match std::fs::create_dir_all(expected_dir).and_then(|_| std::fs::write(&fixture, &actual)) {
                Ok(()) => Outcome::Blessed,
                Err(e) => Outcome::Broken(e.to_string()),
            }
        } else {
            match std::fs::read_to_string(&fixture) {
                Err(_) => Outcome::Missing,
                Ok(exp) if exp == actual => Outcome::Pass,
                Ok(exp) => Outcome::Mismatch(
                    TextDiff::from_lines(&exp, &actual)
                        .unified_diff()
                        .header("expected", "actual")
                        .to_string(),
                ),
            }
        };
        out.push(Entry { system: stem.clone(), case: label, fixture, provisos, outcome });
    }
    out
}

/// Runs every `.dms` file in `dir` whose stem contains the (normalized)
/// filter. Files run concurrently; results come back in file order.
pub fn run_corpus(dir: &Path, filter: Option<&str>, bless: bool) -> std::io::Result<Summary> {
    let filter = filter.map(normalize_filter);
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "dms"))
        .filter(|p| match &filter {
            Some(f) => p.file_stem().is_some_and(|s| s.to_string_lossy().contains(f.as_str())),
            None => true,
        })
        .collect();
    files.sort();
    let expected = dir.join("expected");
    let entries = std::thread::scope(|scope| {
        let handles: Vec<_> =
            files.iter().map(|f| scope.spawn(|| run_file(f, &expected, bless))).collect();
        handles.into_iter().flat_map(|h| h.join().expect("corpus worker panicked")).collect()
    });
    Ok(Summary { entries })
}
