//! Report envelope, JSON and Markdown output.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use diffmod::Error;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub input: InputInfo,
    /// One entry per case branch that was run.
    pub cases: Vec<CaseReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub path: Option<String>,
    pub sha256: String,
    pub assume: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Undecided,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case: String,
    pub status: Status,
    pub provisos: Vec<String>,
    pub result: Value,
    pub error: Option<Diagnostic>,
    /// Wall time in microseconds; the only nondeterministic field.
    pub timing_us: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: String,
    pub message: String,
    pub span: Option<[usize; 2]>,
}

impl Diagnostic {
    pub fn from_error(e: &Error) -> Diagnostic {
        let kind = match e {
            Error::DivisionByZero => "division_by_zero",
            Error::DuplicateName(_) => "duplicate_name",
            Error::PivotNotInvertible(_) => "pivot_not_invertible",
            Error::CaseSplitRequired { .. } => "case_split_required",
            Error::ResourceLimit(_) => "resource_limit",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::Parse { .. } => "parse",
            Error::Linearity { .. } => "linearity",
            Error::UnknownIdentifier { .. } => "unknown_identifier",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::UnsupportedDimension(_) => "unsupported_dimension",
            Error::NotParametrizable(_) => "not_parametrizable",
        };
        Diagnostic { kind: kind.into(), message: e.to_string(), span: e.span().map(|s| [s.start, s.end]) }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    /// 0 when every case succeeded, 2 when some case needs a branch choice
    /// and none failed outright, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.cases.iter().any(|c| c.status == Status::Error) {
            1
        } else if self.cases.iter().any(|c| c.status == Status::Undecided) {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Copy with all timing fields zeroed.
    pub fn without_timing(&self) -> Report {
        let mut r = self.clone();
        for c in &mut r.cases {
            c.timing_us = 0;
        }
        r
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("# diffmod {}\n\n", self.command);
        if let Some(p) = &self.input.path {
            out.push_str(&format!("input: `{p}`  \n"));
        }
        out.push_str(&format!("sha256: `{}`\n", self.input.sha256));
        for c in &self.cases {
            out.push_str(&format!("\n## case {}\n\n", c.case));
            out.push_str(&format!("status: {:?}\n", c.status).to_lowercase());
            if !c.provisos.is_empty() {
                out.push_str("\nprovisos (assumed nonzero):\n\n");
                for p in &c.provisos {
                    out.push_str(&format!("- `{p}`\n"));
                }
            }
            if let Some(e) = &c.error {
                out.push_str(&format!("\nerror ({}): {}\n", e.kind, e.message));
            }
            md_value(&mut out, &c.result, 3);
        }
        out
    }
}

fn md_value(out: &mut String, v: &Value, level: usize) {
    let Value::Object(map) = v else {
        out.push_str(&format!("\n{}\n", scalar(v)));
        return;
    };
    let mut simple = Vec::new();
    for (k, x) in map {
        match x {
            Value::Object(_) => {}
            Value::Array(a) if !a.iter().all(is_scalar) => {}
            _ => simple.push((k, x)),
        }
    }
    if !simple.is_empty() {
        out.push('\n');
    }
    for (k, x) in simple {
        match x {
            Value::String(s) if k == "board" => {
                out.push_str("\nJanet board:\n\n");
                md_board(out, s);
            }
            Value::Array(a) if a.iter().any(|e| e.is_string()) => {
                out.push_str(&format!("{k}:\n\n```text\n"));
                for e in a {
                    out.push_str(&scalar(e));
                    out.push('\n');
                }
                out.push_str("```\n\n");
            }
            _ => out.push_str(&format!("- {k}: {}\n", scalar(x))),
        }
    }
    let hashes = "#".repeat(level.min(6));
    for (k, x) in map {
        match x {
            Value::Object(_) => {
                out.push_str(&format!("\n{hashes} {k}\n"));
                md_value(out, x, level + 1);
            }
            Value::Array(a) if !a.iter().all(is_scalar) => {
                for (i, e) in a.iter().enumerate() {
                    out.push_str(&format!("\n{hashes} {k}[{i}]\n"));
                    md_value(out, e, level + 1);
                }
            }
            _ => {}
        }
    }
}

/// Boards render as rows of boxes, one cell per derivation.
fn md_board(out: &mut String, board: &str) {
    for (i, line) in board.lines().enumerate() {
        let cells: Vec<&str> = line.split_whitespace().collect();
        out.push_str(&format!("| {} |\n", cells.join(" | ")));
        if i == 0 {
            out.push_str(&format!("|{}\n", "---|".repeat(cells.len())));
        }
    }
    out.push('\n');
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Object(_) | Value::Array(_))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}
