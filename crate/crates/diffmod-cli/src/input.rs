//! Reading `.dms` files and choosing case branches.

use diffmod::dsl::{all_cases, case_label, elaborate, parse_system, Branch, Case, System, SystemDecl};
use diffmod::{Error, Span};

/// A parsed input with its branch choices, ready to elaborate per case.
#[derive(Clone, Debug)]
pub struct Input {
    pub ast: SystemDecl,
    /// Branches fixed on the command line.
    pub fixed: Case,
}

fn assume_error(text: &str, message: &str) -> Error {
    Error::Parse {
        message: format!("in --assume `{text}`: {message}"),
        span: Span::default(),
        expected: vec!["EXPR!=0".into(), "PARAM=0".into()],
    }
}

/// Parses `text` and applies `--assume` strings of the form `EXPR!=0`,
/// `EXPR` (same meaning) or `PARAM=0` for a split parameter.
pub fn prepare(text: &str, assume: &[String]) -> Result<Input, Error> {
    let mut ast = parse_system(text)?;
    let mut fixed = Case::new();
    let splits: Vec<String> = ast.splits.iter().map(|s| s.name.clone()).collect();
    for a in assume {
        let compact: String = a.chars().filter(|c| !c.is_whitespace()).collect();
        let (expr, zero) = if let Some(e) = compact.strip_suffix("!=0") {
            (e.to_string(), false)
        } else if let Some(e) = compact.strip_suffix("=0") {
            (e.to_string(), true)
        } else {
            (compact.clone(), false)
        };
        if splits.contains(&expr) {
            let b = if zero { Branch::Zero } else { Branch::NonZero };
            if fixed.insert(expr.clone(), b).is_some_and(|old| old != b) {
                return Err(assume_error(a, "contradicts an earlier --assume"));
            }
            continue;
        }
        if zero {
            return Err(assume_error(a, "only parameters declared with `split` can be set to zero"));
        }
        let decl = parse_system(&format!("assume {expr} != 0;"))
            .map_err(|e| assume_error(a, &e.to_string()))?;
        ast.assumptions.extend(decl.assumptions);
    }
    Ok(Input { ast, fixed })
}

impl Input {
    /// The cases to run: just the fixed choices, or with `split` every
    /// combination of the remaining split parameters.
    pub fn cases(&self, split: bool) -> Vec<Case> {
        if !split {
            return vec![self.fixed.clone()];
        }
        let open: Vec<String> =
            self.ast.splits.iter().map(|s| s.name.clone()).filter(|s| !self.fixed.contains_key(s)).collect();
        all_cases(&open)
            .into_iter()
            .map(|mut c| {
                c.extend(self.fixed.clone());
                c
            })
            .collect()
    }

    pub fn system(&self, case: &Case) -> Result<System, Error> {
        elaborate(&self.ast, case)
    }
}

pub fn label(case: &Case) -> String {
    case_label(case)
}
