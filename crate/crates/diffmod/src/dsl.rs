//! The `.dms` system-description language.
//!
//! ```text
//! file     ::= item*
//! item     ::= 'system' IDENT ';'
//!            | ('vars' | 'params' | 'funcs' | 'split') IDENT (',' IDENT)* ';'
//!            | 'unknowns' unk (',' unk)* ';'          unk ::= IDENT ('[' INT ']')?
//!            | 'assume' expr '!=' '0' ';'
//!            | 'rel' expr '=' expr ';'
//!            | 'order' ('degrevlex' | 'deglex' | 'lex') ';'
//!            | 'priority' IDENT (',' IDENT)* ';'
//!            | IDENT ':' expr '=' IDENT ';'
//! expr     ::= ('+' | '-')? term (('+' | '-') term)*
//! term     ::= factor (('*' | '/') factor)*
//! factor   ::= atom ('^' '-'? INT)?
//! atom     ::= INT | IDENT | '(' expr ')' | '-' atom | deriv '(' expr ')'
//! deriv    ::= 'd' DIGIT+ | 'd' '(' INT (',' INT)* ')'
//! ```
//!
//! `d12(y)` is `d₁d₂y`; `d(1,10)(y)` spells the same thing for indices
//! above nine. Comments run from `#` to the end of the line.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coefficients::{deriv_prefix, DiffField, RatFunc, Session};
use crate::ore::{fmt_row, DMono, MonoOrder, OpMatrix, ScalarOp, TermOrder};
use crate::{Error, Span};

#[derive(Clone, Debug, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Num(BigInt),
    Name(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    /// 1-based derivation indices, repeated.
    Deriv(Vec<usize>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub label: Ident,
    pub lhs: Expr,
    pub rhs: Ident,
}

/// Parsed system, before any name resolution.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SystemDecl {
    pub name: Option<Ident>,
    pub vars: Vec<Ident>,
    pub unknowns: Vec<Ident>,
    pub params: Vec<Ident>,
    pub funcs: Vec<Ident>,
    pub assumptions: Vec<Expr>,
    pub splits: Vec<Ident>,
    pub relations: Vec<(Expr, Expr)>,
    pub equations: Vec<Equation>,
    pub order: Option<(MonoOrder, Span)>,
    pub priority: Option<Vec<Ident>>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    /// `d` followed by digits.
    Deriv(Vec<usize>),
    Sym(&'static str),
    Eof,
}

fn tok_desc(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Int(i) => format!("number {i}"),
        Tok::Deriv(_) => "derivative".into(),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>, Error> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let end_of = |k: usize| chars.get(k).map(|c| c.0).unwrap_or(src.len());
    let mut k = 0;
    while k < chars.len() {
        let (start, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        if c == '#' {
            while k < chars.len() && chars[k].1 != '\n' {
                k += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = k;
            while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_') {
                j += 1;
            }
            let word = &src[start..end_of(j)];
            let span = Span::new(start, end_of(j));
            let digits = &word[1..];
            if word.starts_with('d') && !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let idx = digits.bytes().map(|b| (b - b'0') as usize).collect();
                out.push((Tok::Deriv(idx), span));
            } else {
                out.push((Tok::Ident(word.to_string()), span));
            }
            k = j;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = k;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            let text = &src[start..end_of(j)];
            let v: BigInt = text.parse().expect("digits");
            out.push((Tok::Int(v), Span::new(start, end_of(j))));
            k = j;
            continue;
        }
        let two = if k + 1 < chars.len() { Some((c, chars[k + 1].1)) } else { None };
        if two == Some(('!', '=')) {
            out.push((Tok::Sym("!="), Span::new(start, end_of(k + 2))));
            k += 2;
            continue;
        }
        let sym = match c {
            '+' => "+",
            '-' => "-",
            '*' => "*",
            '/' => "/",
            '^' => "^",
            '(' => "(",
            ')' => ")",
            '[' => "[",
            ']' => "]",
            ',' => ",",
            ';' => ";",
            ':' => ":",
            '=' => "=",
            _ => {
                return Err(Error::Parse {
                    message: format!("unexpected character `{c}`"),
                    span: Span::new(start, end_of(k + 1)),
                    expected: vec![],
                })
            }
        };
        out.push((Tok::Sym(sym), Span::new(start, end_of(k + 1))));
        k += 1;
    }
    out.push((Tok::Eof, Span::new(src.len(), src.len())));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    depth: usize,
}

/// Nesting limit for parentheses, negations and derivatives.
const MAX_DEPTH: usize = 128;
const MAX_EXPONENT: u32 = 64;
/// Largest total degree a power may produce.
const MAX_POWER_DEGREE: u64 = 512;

const KEYWORDS: &[&str] =
    &["system", "vars", "unknowns", "params", "funcs", "assume", "split", "rel", "order", "priority"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].1.end
        }
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, Error> {
        Err(Error::Parse {
            message: format!("found {}", tok_desc(self.peek())),
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn eat(&mut self, s: &'static str) -> bool {
        if self.peek() == &Tok::Sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &'static str) -> Result<Span, Error> {
        if self.peek() == &Tok::Sym(s) {
            Ok(self.bump().1)
        } else {
            self.error(&[s])
        }
    }

    fn ident(&mut self) -> Result<Ident, Error> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().1;
                Ok(Ident { name, span })
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn int(&mut self) -> Result<(BigInt, Span), Error> {
        match self.peek().clone() {
            Tok::Int(v) => {
                let span = self.bump().1;
                Ok((v, span))
            }
            _ => self.error(&["integer"]),
        }
    }

    fn small_int(&mut self) -> Result<(usize, Span), Error> {
        let (v, span) = self.int()?;
        match usize::try_from(&v) {
            Ok(x) if x <= 1_000_000 => Ok((x, span)),
            _ => Err(Error::Parse { message: "integer too large".into(), span, expected: vec![] }),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<Ident>, Error> {
        let mut out = vec![self.ident()?];
        while self.eat(",") {
            out.push(self.ident()?);
        }
        self.expect(";")?;
        Ok(out)
    }

    fn file(&mut self) -> Result<SystemDecl, Error> {
        let mut d = SystemDecl::default();
        loop {
            let word = match self.peek().clone() {
                Tok::Eof => return Ok(d),
                Tok::Ident(w) => w,
                _ => return self.error(&["declaration", "equation label"]),
            };
            if self.peek_at(1) == &Tok::Sym(":") || !KEYWORDS.contains(&word.as_str()) {
                let label = self.ident()?;
                self.expect(":")?;
                let lhs = self.expr()?;
                self.expect("=")?;
                let rhs = self.ident()?;
                self.expect(";")?;
                d.equations.push(Equation { label, lhs, rhs });
                continue;
            }
            let kw = self.bump().1;
            match word.as_str() {
                "system" => {
                    d.name = Some(self.ident()?);
                    self.expect(";")?;
                }
                "vars" => d.vars.extend(self.ident_list()?),
                "params" => d.params.extend(self.ident_list()?),
                "funcs" => d.funcs.extend(self.ident_list()?),
                "split" => d.splits.extend(self.ident_list()?),
                "priority" => d.priority = Some(self.ident_list()?),
                "unknowns" => loop {
                    let id = self.ident()?;
                    if self.eat("[") {
                        let (k, _) = self.small_int()?;
                        let close = self.expect("]")?;
                        for i in 1..=k.min(64) {
                            d.unknowns.push(Ident {
                                name: format!("{}{i}", id.name),
                                span: Span::new(id.span.start, close.end),
                            });
                        }
                    } else {
                        d.unknowns.push(id);
                    }
                    if self.eat(";") {
                        break;
                    }
                    self.expect(",")?;
                },
                "assume" => {
                    let e = self.expr()?;
                    self.expect("!=")?;
                    let (z, span) = self.int()?;
                    if z != BigInt::from(0) {
                        return Err(Error::Parse {
                            message: "assumptions have the form `expr != 0`".into(),
                            span,
                            expected: vec!["0".into()],
                        });
                    }
                    self.expect(";")?;
                    d.assumptions.push(e);
                }
                "rel" => {
                    let l = self.expr()?;
                    self.expect("=")?;
                    let r = self.expr()?;
                    self.expect(";")?;
                    d.relations.push((l, r));
                }
                "order" => {
                    let id = self.ident()?;
                    let k = match id.name.as_str() {
                        "degrevlex" => MonoOrder::DegRevLex,
                        "deglex" => MonoOrder::DegLex,
                        "lex" => MonoOrder::Lex,
                        _ => {
                            return Err(Error::Parse {
                                message: format!("unknown order `{}`", id.name),
                                span: id.span,
                                expected: vec!["degrevlex".into(), "deglex".into(), "lex".into()],
                            })
                        }
                    };
                    self.expect(";")?;
                    d.order = Some((k, Span::new(kw.start, id.span.end)));
                }
                _ => unreachable!("keyword list"),
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, Error> {
        let start = self.span().start;
        let mut lhs = if self.eat("-") {
            let t = self.term()?;
            Expr { span: Span::new(start, t.span.end), kind: ExprKind::Neg(Box::new(t)) }
        } else {
            self.eat("+");
            self.term()?
        };
        loop {
            let neg = if self.eat("+") {
                false
            } else if self.eat("-") {
                true
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            let span = Span::new(start, rhs.span.end);
            let kind = if neg {
                ExprKind::Sub(Box::new(lhs), Box::new(rhs))
            } else {
                ExprKind::Add(Box::new(lhs), Box::new(rhs))
            };
            lhs = Expr { kind, span };
        }
    }

    fn term(&mut self) -> Result<Expr, Error> {
        let start = self.span().start;
        let mut lhs = self.factor()?;
        loop {
            let div = if self.eat("*") {
                false
            } else if self.eat("/") {
                true
            } else {
                return Ok(lhs);
            };
            let rhs = self.factor()?;
            let span = Span::new(start, rhs.span.end);
            let kind = if div {
                ExprKind::Div(Box::new(lhs), Box::new(rhs))
            } else {
                ExprKind::Mul(Box::new(lhs), Box::new(rhs))
            };
            lhs = Expr { kind, span };
        }
    }

    fn factor(&mut self) -> Result<Expr, Error> {
        let start = self.span().start;
        let base = self.atom()?;
        if self.eat("^") {
            let neg = self.eat("-");
            let (e, span) = self.small_int()?;
            if e > MAX_EXPONENT as usize {
                return Err(Error::Parse {
                    message: format!("exponent above {MAX_EXPONENT}"),
                    span,
                    expected: vec![],
                });
            }
            let e = e as i32;
            let e = if neg { -e } else { e };
            return Ok(Expr { kind: ExprKind::Pow(Box::new(base), e), span: Span::new(start, span.end) });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, Error> {
        if self.depth >= MAX_DEPTH {
            return Err(Error::Parse {
                message: format!("expression nested deeper than {MAX_DEPTH}"),
                span: self.span(),
                expected: vec![],
            });
        }
        self.depth += 1;
        let r = self.atom_inner();
        self.depth -= 1;
        r
    }

    fn atom_inner(&mut self) -> Result<Expr, Error> {
        let start = self.span().start;
        match self.peek().clone() {
            Tok::Int(v) => {
                let span = self.bump().1;
                Ok(Expr { kind: ExprKind::Num(v), span })
            }
            Tok::Ident(name) if name == "d" && self.peek_at(1) == &Tok::Sym("(") => {
                self.bump();
                self.expect("(")?;
                let mut idx = vec![self.small_int()?];
                while self.eat(",") {
                    idx.push(self.small_int()?);
                }
                self.expect(")")?;
                self.deriv_arg(start, idx)
            }
            Tok::Ident(name) => {
                let span = self.bump().1;
                Ok(Expr { kind: ExprKind::Name(name), span })
            }
            Tok::Deriv(idx) => {
                let span = self.bump().1;
                let idx = idx.into_iter().map(|i| (i, span)).collect();
                self.deriv_arg(start, idx)
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(Expr { kind: e.kind, span: Span::new(start, self.prev_end()) })
            }
            Tok::Sym("-") => {
                self.bump();
                let a = self.atom()?;
                Ok(Expr { span: Span::new(start, a.span.end), kind: ExprKind::Neg(Box::new(a)) })
            }
            _ => self.error(&["number", "identifier", "derivative", "`(`"]),
        }
    }

    fn deriv_arg(&mut self, start: usize, idx: Vec<(usize, Span)>) -> Result<Expr, Error> {
        for &(i, span) in &idx {
            if i == 0 {
                return Err(Error::Parse {
                    message: "derivation indices start at 1".into(),
                    span,
                    expected: vec![],
                });
            }
        }
        self.expect("(")?;
        let e = self.expr()?;
        self.expect(")")?;
        Ok(Expr {
            kind: ExprKind::Deriv(idx.into_iter().map(|p| p.0).collect(), Box::new(e)),
            span: Span::new(start, self.prev_end()),
        })
    }
}

/// Parses `.dms` source text.
pub fn parse_system(text: &str) -> Result<SystemDecl, Error> {
    let toks = lex(text)?;
    Parser { toks, pos: 0, depth: 0 }.file()
}

/// Chosen branch for a split parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Zero,
    NonZero,
}

/// A consistent choice of branches, keyed by parameter name.
pub type Case = BTreeMap<String, Branch>;

pub fn case_label(case: &Case) -> String {
    if case.is_empty() {
        return "generic".into();
    }
    case.iter()
        .map(|(k, b)| match b {
            Branch::Zero => format!("{k}=0"),
            Branch::NonZero => format!("{k}!=0"),
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// All combinations of branches for the given split parameters.
pub fn all_cases(splits: &[String]) -> Vec<Case> {
    let mut out = vec![Case::new()];
    for s in splits {
        let mut next = Vec::new();
        for c in &out {
            for b in [Branch::Zero, Branch::NonZero] {
                let mut c = c.clone();
                c.insert(s.clone(), b);
                next.push(c);
            }
        }
        out = next;
    }
    out
}

/// A resolved system ready for computation.
#[derive(Clone, Debug)]
pub struct System {
    pub name: String,
    pub session: Session,
    pub matrix: OpMatrix,
    pub equation_labels: Vec<String>,
    pub order: TermOrder,
    pub splits: Vec<String>,
    pub case: Case,
    /// Relations as declared, with their right-hand sides in field symbols.
    pub relation_heads: Vec<(usize, Vec<u32>)>,
    pub assumptions: Vec<RatFunc>,
}

impl System {
    pub fn field(&self) -> &DiffField {
        self.session.field()
    }
}

/// Value of a subexpression: a coefficient plus a linear part in the unknowns.
#[derive(Clone, Debug)]
struct Val {
    scalar: RatFunc,
    lin: Vec<ScalarOp>,
    span: Span,
}

impl Val {
    fn is_scalar(&self) -> bool {
        self.lin.iter().all(ScalarOp::is_zero)
    }
}

struct Elab<'a> {
    field: DiffField,
    unknowns: Vec<String>,
    case: &'a Case,
}

impl Elab<'_> {
    fn scalar(&self, f: RatFunc, span: Span) -> Val {
        Val { scalar: f, lin: vec![ScalarOp::zero(); self.unknowns.len()], span }
    }

    fn eval(&self, e: &Expr) -> Result<Val, Error> {
        let n = self.field.n();
        match &e.kind {
            ExprKind::Num(v) => Ok(self.scalar(RatFunc::from_rational(BigRational::from_integer(v.clone())), e.span)),
            ExprKind::Name(name) => {
                if let Some(i) = self.field.var_index(name) {
                    return Ok(self.scalar(self.field.var(i), e.span));
                }
                if let Some(k) = self.field.param_index(name) {
                    let v = match self.case.get(name) {
                        Some(Branch::Zero) => RatFunc::zero(),
                        _ => self.field.param(k),
                    };
                    return Ok(self.scalar(v, e.span));
                }
                if let Some(f) = self.field.func_index(name) {
                    return Ok(self.scalar(self.field.jet(f, &vec![0; n]), e.span));
                }
                if let Some(j) = self.unknowns.iter().position(|u| u == name) {
                    let mut v = self.scalar(RatFunc::zero(), e.span);
                    v.lin[j] = ScalarOp::one(n);
                    return Ok(v);
                }
                Err(Error::UnknownIdentifier { name: name.clone(), span: e.span })
            }
            ExprKind::Neg(a) => {
                let a = self.eval(a)?;
                Ok(Val { scalar: a.scalar.neg(), lin: a.lin.iter().map(ScalarOp::neg).collect(), span: e.span })
            }
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
                let a = self.eval(a)?;
                let mut b = self.eval(b)?;
                if matches!(e.kind, ExprKind::Sub(..)) {
                    b.scalar = b.scalar.neg();
                    b.lin = b.lin.iter().map(ScalarOp::neg).collect();
                }
                Ok(Val {
                    scalar: a.scalar.add(&b.scalar),
                    lin: a.lin.iter().zip(&b.lin).map(|(x, y)| x.add(y)).collect(),
                    span: e.span,
                })
            }
            ExprKind::Mul(a, b) => {
                let a = self.eval(a)?;
                let b = self.eval(b)?;
                let (s, l) = match (a.is_scalar(), b.is_scalar()) {
                    (true, _) => (a, b),
                    (false, true) => (b, a),
                    (false, false) => {
                        return Err(Error::Linearity {
                            message: "product of two expressions in the unknowns".into(),
                            span: e.span,
                        })
                    }
                };
                Ok(Val {
                    scalar: s.scalar.mul(&l.scalar),
                    lin: l.lin.iter().map(|p| p.scale_left(&s.scalar)).collect(),
                    span: e.span,
                })
            }
            ExprKind::Div(a, b) => {
                let a = self.eval(a)?;
                let b = self.eval(b)?;
                if !b.is_scalar() {
                    return Err(Error::Linearity { message: "division by an unknown".into(), span: b.span });
                }
                let inv = b.scalar.inv().map_err(|_| Error::Parse {
                    message: "division by zero".into(),
                    span: b.span,
                    expected: vec![],
                })?;
                Ok(Val {
                    scalar: a.scalar.mul(&inv),
                    lin: a.lin.iter().map(|p| p.scale_left(&inv)).collect(),
                    span: e.span,
                })
            }
            ExprKind::Pow(a, k) => {
                let a = self.eval(a)?;
                if !a.is_scalar() {
                    if *k == 1 {
                        return Ok(a);
                    }
                    return Err(Error::Linearity { message: "power of an unknown".into(), span: e.span });
                }
                let deg = a.scalar.numer().total_degree().max(a.scalar.denom().total_degree()) as u64;
                if deg * k.unsigned_abs() as u64 > MAX_POWER_DEGREE {
                    return Err(Error::Parse {
                        message: format!("power has degree above {MAX_POWER_DEGREE}"),
                        span: e.span,
                        expected: vec![],
                    });
                }
                let v = a.scalar.pow(*k).map_err(|_| Error::Parse {
                    message: "negative power of zero".into(),
                    span: e.span,
                    expected: vec![],
                })?;
                Ok(self.scalar(v, e.span))
            }
            ExprKind::Deriv(idx, a) => {
                for &i in idx {
                    if i == 0 || i > n {
                        return Err(Error::IndexOutOfRange { index: i, n, span: e.span });
                    }
                }
                let a = self.eval(a)?;
                let nu = DMono::from_indices(n, &idx.iter().map(|i| i - 1).collect::<Vec<_>>());
                Ok(Val {
                    scalar: self.field.derive_multi(&nu.0, &a.scalar),
                    lin: a.lin.iter().map(|p| p.d_left(&self.field, &nu)).collect(),
                    span: e.span,
                })
            }
        }
    }

    fn eval_scalar(&self, e: &Expr) -> Result<RatFunc, Error> {
        let v = self.eval(e)?;
        if !v.is_scalar() {
            return Err(Error::Linearity { message: "unknowns are not allowed here".into(), span: e.span });
        }
        Ok(v.scalar)
    }

    /// Splits `d^ν f` into the function index and ν.
    fn jet_head(&self, e: &Expr) -> Result<(usize, Vec<u32>), Error> {
        let n = self.field.n();
        let (idx, inner) = match &e.kind {
            ExprKind::Deriv(idx, inner) => (idx.clone(), inner.as_ref()),
            _ => (vec![], e),
        };
        match &inner.kind {
            ExprKind::Name(name) => {
                let f = self.field.func_index(name).ok_or_else(|| Error::UnknownIdentifier {
                    name: name.clone(),
                    span: inner.span,
                })?;
                let mut nu = vec![0; n];
                for i in idx {
                    if i == 0 || i > n {
                        return Err(Error::IndexOutOfRange { index: i, n, span: e.span });
                    }
                    nu[i - 1] += 1;
                }
                Ok((f, nu))
            }
            _ => Err(Error::Parse {
                message: "left side of a relation must be a function or one of its derivatives".into(),
                span: e.span,
                expected: vec!["function".into()],
            }),
        }
    }
}

fn check_unique(ids: &[&Ident]) -> Result<(), Error> {
    let mut seen = std::collections::HashSet::new();
    for id in ids {
        if !seen.insert(id.name.as_str()) {
            return Err(Error::Parse {
                message: format!("`{}` declared twice", id.name),
                span: id.span,
                expected: vec![],
            });
        }
        let d = id.name.strip_prefix('d').unwrap_or("x");
        if id.name == "d" || (!d.is_empty() && d.bytes().all(|b| b.is_ascii_digit())) || KEYWORDS.contains(&id.name.as_str()) {
            return Err(Error::Parse {
                message: format!("`{}` is reserved", id.name),
                span: id.span,
                expected: vec![],
            });
        }
    }
    Ok(())
}

/// Resolves names and builds the operator matrix for one case.
pub fn elaborate(ast: &SystemDecl, case: &Case) -> Result<System, Error> {
    let all: Vec<&Ident> = ast.vars.iter().chain(&ast.params).chain(&ast.funcs).chain(&ast.unknowns).collect();
    check_unique(&all)?;
    let names = |v: &[Ident]| v.iter().map(|i| i.name.clone()).collect::<Vec<_>>();
    let field = DiffField::from_names(names(&ast.vars), names(&ast.params), names(&ast.funcs))?;
    let n = field.n();
    let mut session = Session::new(field.clone());
    let el = Elab { field: field.clone(), unknowns: names(&ast.unknowns), case };

    let mut splits = Vec::new();
    for s in &ast.splits {
        let k = field.param_index(&s.name).ok_or_else(|| Error::UnknownIdentifier {
            name: s.name.clone(),
            span: s.span,
        })?;
        splits.push(s.name.clone());
        match case.get(&s.name) {
            Some(Branch::NonZero) => session.assume(&field.param(k))?,
            Some(Branch::Zero) => {}
            None => session.mark_split(k),
        }
    }
    for name in case.keys() {
        if !splits.contains(name) {
            return Err(Error::UnknownIdentifier { name: name.clone(), span: Span::default() });
        }
    }

    let mut relation_heads = Vec::new();
    for (l, r) in &ast.relations {
        let (f, nu) = el.jet_head(l)?;
        let rhs = el.eval_scalar(r)?;
        field.add_relation(f, &nu, rhs);
        relation_heads.push((f, nu));
    }
    let mut assumptions = Vec::new();
    for a in &ast.assumptions {
        let v = el.eval_scalar(a)?;
        if v.is_zero() {
            return Err(Error::Parse {
                message: "assumption is identically zero in this case".into(),
                span: a.span,
                expected: vec![],
            });
        }
        session.assume(&v)?;
        assumptions.push(v);
    }

    let m = ast.unknowns.len();
    let mut matrix = OpMatrix::zero(n, 0, m).with_col_labels(names(&ast.unknowns));
    let mut labels = Vec::new();
    for eq in &ast.equations {
        let v = el.eval(&eq.lhs)?;
        if !v.scalar.is_zero() {
            return Err(Error::Linearity {
                message: "term without an unknown; equations must be homogeneous in the unknowns".into(),
                span: eq.lhs.span,
            });
        }
        if el.unknowns.contains(&eq.rhs.name) || field.var_index(&eq.rhs.name).is_some() {
            return Err(Error::Parse {
                message: format!("`{}` cannot name a second member", eq.rhs.name),
                span: eq.rhs.span,
                expected: vec!["fresh identifier".into()],
            });
        }
        matrix.push_row(v.lin, Some(eq.rhs.name.clone()));
        labels.push(eq.label.name.clone());
    }

    let mut order = TermOrder::new(n, m);
    if let Some((k, _)) = ast.order {
        order = order.with_kind(k);
    }
    if let Some(pr) = &ast.priority {
        let mut p = Vec::new();
        for id in pr {
            let i = field.var_index(&id.name).ok_or_else(|| Error::UnknownIdentifier {
                name: id.name.clone(),
                span: id.span,
            })?;
            if p.contains(&i) {
                return Err(Error::Parse { message: "variable listed twice".into(), span: id.span, expected: vec![] });
            }
            p.push(i);
        }
        if p.len() != n {
            return Err(Error::Parse {
                message: "priority must list every variable".into(),
                span: pr[0].span,
                expected: vec![],
            });
        }
        order = order.with_priority(p);
    }
    let name = ast.name.as_ref().map(|i| i.name.clone()).unwrap_or_else(|| "system".into());
    Ok(System {
        name,
        session,
        matrix,
        equation_labels: labels,
        order,
        splits,
        case: case.clone(),
        relation_heads,
        assumptions,
    })
}

/// Parses and elaborates in the generic case (no branch chosen).
pub fn load(text: &str) -> Result<System, Error> {
    elaborate(&parse_system(text)?, &Case::new())
}

/// Renders a system back to `.dms` text. The output reparses to the same
/// matrix; a chosen case is baked in (zero parameters vanish, nonzero ones
/// become assumptions).
pub fn render(sys: &System) -> String {
    let k = sys.field();
    let mut out = String::new();
    out.push_str(&format!("system {};\n", sys.name));
    out.push_str(&format!("vars {};\n", k.vars().join(", ")));
    if !k.params().is_empty() {
        out.push_str(&format!("params {};\n", k.params().join(", ")));
    }
    if !k.funcs().is_empty() {
        out.push_str(&format!("funcs {};\n", k.funcs().join(", ")));
    }
    if sys.matrix.cols() > 0 {
        out.push_str(&format!("unknowns {};\n", sys.matrix.col_labels.join(", ")));
    }
    let unsplit: Vec<&String> = sys.splits.iter().filter(|s| !sys.case.contains_key(*s)).collect();
    if !unsplit.is_empty() {
        out.push_str(&format!("split {};\n", unsplit.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")));
    }
    match sys.order.kind {
        MonoOrder::DegRevLex => {}
        MonoOrder::DegLex => out.push_str("order deglex;\n"),
        MonoOrder::Lex => out.push_str("order lex;\n"),
    }
    if sys.order.priority != TermOrder::new(k.n(), 0).priority {
        let names: Vec<&str> = sys.order.priority.iter().map(|&i| k.vars()[i].as_str()).collect();
        out.push_str(&format!("priority {};\n", names.join(", ")));
    }
    for (f, nu, rhs) in k.relations() {
        let head = if nu.iter().all(|&e| e == 0) {
            k.funcs()[f].clone()
        } else {
            format!("{}({})", deriv_prefix(&nu), k.funcs()[f])
        };
        out.push_str(&format!("rel {head} = {};\n", k.fmt(&rhs)));
    }
    for (name, b) in &sys.case {
        if *b == Branch::NonZero {
            out.push_str(&format!("assume {name} != 0;\n"));
        }
    }
    for a in &sys.assumptions {
        out.push_str(&format!("assume {} != 0;\n", k.fmt(a)));
    }
    for i in 0..sys.matrix.rows() {
        let lhs = fmt_row(k, sys.matrix.row(i), &sys.matrix.col_labels);
        out.push_str(&format!(
            "{}: {} = {};\n",
            sys.equation_labels.get(i).cloned().unwrap_or_else(|| format!("E{}", i + 1)),
            lhs,
            sys.matrix.row_labels[i]
        ));
    }
    out
}

/// Matrix `a` over field `from` rewritten over field `to`, matching symbols by name.
pub fn translate_matrix(a: &OpMatrix, from: &DiffField, to: &DiffField) -> Result<OpMatrix, Error> {
    let mut out = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let mut p = ScalarOp::zero();
            for (mu, c) in a.entry(i, j).terms() {
                p.add_term(mu.clone(), &from.translate(c, to)?);
            }
            *out.entry_mut(i, j) = p;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX16: &str = "system ex1_6;\nvars x1, x2;\nunknowns y;\nP: d222(y) + x2*y = u;\nQ: d2(y) + d1(y) = v;\n";

    #[test]
    fn parses_commutator_system() {
        let s = load(EX16).unwrap();
        assert_eq!(s.matrix.rows(), 2);
        assert_eq!(s.matrix.row_order(0), Some(3));
        assert_eq!(s.matrix.row_order(1), Some(1));
    }

    #[test]
    fn rejects_products_of_unknowns() {
        let e = load("vars x; unknowns y; P: y*y = u;").unwrap_err();
        assert!(matches!(e, Error::Linearity { .. }));
    }

    #[test]
    fn round_trip() {
        let s = load(EX16).unwrap();
        let t = load(&render(&s)).unwrap();
        let back = translate_matrix(&t.matrix, t.field(), s.field()).unwrap();
        assert_eq!(back, s.matrix);
    }

    #[test]
    fn multi_digit_indices() {
        let s = load("vars x1, x2; unknowns y; E: d(1,2,2)(y) - d122(y) = u;").unwrap();
        assert!(s.matrix.is_zero());
    }

    #[test]
    fn error_spans_inside_input() {
        let src = "vars x; unknowns y; P: d2(y) = u;";
        let e = load(src).unwrap_err();
        let sp = e.span().unwrap();
        assert!(sp.end <= src.len());
        assert!(matches!(e, Error::IndexOutOfRange { index: 2, .. }));
    }

    #[test]
    fn deep_nesting_is_an_error() {
        let src = format!("vars x; unknowns y; P: {}y{} = u;", "(".repeat(100_000), ")".repeat(100_000));
        assert!(matches!(parse_system(&src), Err(Error::Parse { .. })));
        let ok = format!("vars x; unknowns y; P: {}y{} = u;", "(".repeat(50), ")".repeat(50));
        assert!(load(&ok).is_ok());
    }
}
