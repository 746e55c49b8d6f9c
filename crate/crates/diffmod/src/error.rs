use std::fmt;

/// Byte range into a source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("name `{0}` declared twice")]
    DuplicateName(String),
    #[error("pivot {0} is not invertible")]
    PivotNotInvertible(String),
    #[error("pivot {pivot} vanishes or not depending on {}; choose a case", params.join(", "))]
    CaseSplitRequired { params: Vec<String>, pivot: String },
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("parse error at {span}: {message}; expected one of: {}", expected.join(", "))]
    Parse { message: String, span: Span, expected: Vec<String> },
    #[error("equation is not linear at {span}: {message}")]
    Linearity { message: String, span: Span },
    #[error("unknown identifier `{name}` at {span}")]
    UnknownIdentifier { name: String, span: Span },
    #[error("index {index} out of range 1..={n} at {span}")]
    IndexOutOfRange { index: usize, n: usize, span: Span },
    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),
    #[error("not parametrizable: {0} torsion element(s)")]
    NotParametrizable(usize),
}

impl Error {
    pub fn span(&self) -> Option<Span> {
        match self {
            Error::Parse { span, .. }
            | Error::Linearity { span, .. }
            | Error::UnknownIdentifier { span, .. }
            | Error::IndexOutOfRange { span, .. } => Some(*span),
            _ => None,
        }
    }
}
