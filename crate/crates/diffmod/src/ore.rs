//! The ring D = K[d₁…dₙ] of linear differential operators and matrices over it.
//!
//! Coefficients always sit to the left of the derivative monomial, so
//! `d_i a = a d_i + ∂_i a` is applied eagerly by every product.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::coefficients::{deriv_prefix, DiffField, RatFunc};
use crate::Error;

/// Multi-index μ of a derivative `d^μ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct DMono(pub Vec<u32>);

impl DMono {
    pub fn one(n: usize) -> DMono {
        DMono(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> DMono {
        let mut v = vec![0; n];
        v[i] = 1;
        DMono(v)
    }

    /// Multi-index from a list of 0-based derivation indices, e.g. `[1, 1, 0]` is `d₁d₂²`.
    pub fn from_indices(n: usize, idx: &[usize]) -> DMono {
        let mut v = vec![0; n];
        for &i in idx {
            v[i] += 1;
        }
        DMono(v)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &DMono) -> DMono {
        DMono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &DMono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &DMono) -> Option<DMono> {
        if other.divides(self) {
            Some(DMono(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
        } else {
            None
        }
    }

    pub fn bump(&self, i: usize) -> DMono {
        let mut v = self.0.clone();
        v[i] += 1;
        DMono(v)
    }

    /// All γ ≤ self.
    pub fn divisors(&self) -> Vec<DMono> {
        let mut out = vec![Vec::new()];
        for &e in &self.0 {
            let mut next = Vec::new();
            for prefix in &out {
                for k in 0..=e {
                    let mut p: Vec<u32> = prefix.clone();
                    p.push(k);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(DMono).collect()
    }

    /// Π C(μᵢ, γᵢ).
    pub fn binomial(&self, gamma: &DMono) -> BigInt {
        let mut acc = BigInt::one();
        for (&m, &g) in self.0.iter().zip(&gamma.0) {
            acc *= binom(m, g);
        }
        acc
    }
}

fn binom(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// A scalar operator Σ a_μ d^μ.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ScalarOp {
    terms: BTreeMap<DMono, RatFunc>,
}

impl ScalarOp {
    pub fn zero() -> ScalarOp {
        ScalarOp::default()
    }

    pub fn one(n: usize) -> ScalarOp {
        ScalarOp::term(DMono::one(n), RatFunc::one())
    }

    pub fn coeff(n: usize, a: RatFunc) -> ScalarOp {
        ScalarOp::term(DMono::one(n), a)
    }

    pub fn d(n: usize, i: usize) -> ScalarOp {
        ScalarOp::term(DMono::var(n, i), RatFunc::one())
    }

    pub fn term(mu: DMono, a: RatFunc) -> ScalarOp {
        let mut terms = BTreeMap::new();
        if !a.is_zero() {
            terms.insert(mu, a);
        }
        ScalarOp { terms }
    }

    pub fn terms(&self) -> &BTreeMap<DMono, RatFunc> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(DMono::order).max()
    }

    pub fn get(&self, mu: &DMono) -> Option<&RatFunc> {
        self.terms.get(mu)
    }

    pub fn add_term(&mut self, mu: DMono, a: &RatFunc) {
        if a.is_zero() {
            return;
        }
        match self.terms.get_mut(&mu) {
            Some(c) => {
                *c = c.add(a);
                if c.is_zero() {
                    self.terms.remove(&mu);
                }
            }
            None => {
                self.terms.insert(mu, a.clone());
            }
        }
    }

    pub fn add(&self, other: &ScalarOp) -> ScalarOp {
        let mut out = self.clone();
        for (mu, a) in &other.terms {
            out.add_term(mu.clone(), a);
        }
        out
    }

    pub fn neg(&self) -> ScalarOp {
        ScalarOp { terms: self.terms.iter().map(|(m, a)| (m.clone(), a.neg())).collect() }
    }

    pub fn sub(&self, other: &ScalarOp) -> ScalarOp {
        self.add(&other.neg())
    }

    /// `a · P` (coefficient on the left, no differentiation).
    pub fn scale_left(&self, a: &RatFunc) -> ScalarOp {
        if a.is_zero() {
            return ScalarOp::zero();
        }
        ScalarOp { terms: self.terms.iter().map(|(m, c)| (m.clone(), a.mul(c))).collect() }
    }

    /// `d^ν ∘ P`.
    pub fn d_left(&self, field: &DiffField, nu: &DMono) -> ScalarOp {
        let mut out = ScalarOp::zero();
        let gammas = nu.divisors();
        for (beta, b) in &self.terms {
            for g in &gammas {
                let rest = nu.div(g).expect("divisor");
                let db = field.derive_multi(&rest.0, b);
                if db.is_zero() {
                    continue;
                }
                let c = nu.binomial(g);
                out.add_term(g.mul(beta), &db.scale(&BigRational::from_integer(c)));
            }
        }
        out
    }

    /// The product `P ∘ Q`.
    pub fn mul(&self, field: &DiffField, other: &ScalarOp) -> ScalarOp {
        let mut out = ScalarOp::zero();
        for (alpha, a) in &self.terms {
            let t = other.d_left(field, alpha).scale_left(a);
            out = out.add(&t);
        }
        out
    }

    /// Formal adjoint Σ (−1)^{|μ|} d^μ ∘ a_μ.
    pub fn adjoint(&self, field: &DiffField) -> ScalarOp {
        let n = field.n();
        let mut out = ScalarOp::zero();
        for (mu, a) in &self.terms {
            let t = ScalarOp::coeff(n, a.clone()).d_left(field, mu);
            out = if mu.order() % 2 == 0 { out.add(&t) } else { out.sub(&t) };
        }
        out
    }

    /// Applies the operator to a function.
    pub fn apply(&self, field: &DiffField, f: &RatFunc) -> RatFunc {
        let mut acc = RatFunc::zero();
        for (mu, a) in &self.terms {
            acc = acc.add(&a.mul(&field.derive_multi(&mu.0, f)));
        }
        acc
    }
}

/// Monomial order on the derivatives dᵢ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonoOrder {
    DegRevLex,
    DegLex,
    Lex,
}

/// How module terms compare across positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PositionRule {
    /// Term over position: compare derivatives first.
    Top,
    /// Position over term.
    Pot,
}

/// A term order on module monomials `d^μ e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermOrder {
    pub kind: MonoOrder,
    /// Derivation indices from highest to lowest priority.
    pub priority: Vec<usize>,
    pub rule: PositionRule,
    /// Positions from highest to lowest priority.
    pub positions: Vec<usize>,
    /// Elimination blocks per position; a larger block dominates any smaller one.
    pub blocks: Vec<u32>,
}

impl TermOrder {
    /// Degree reverse lexicographic with `dₙ > … > d₁`, term over position, `e₁ > e₂ > …`.
    pub fn new(n: usize, m: usize) -> TermOrder {
        TermOrder {
            kind: MonoOrder::DegRevLex,
            priority: (0..n).rev().collect(),
            rule: PositionRule::Top,
            positions: (0..m).collect(),
            blocks: vec![0; m],
        }
    }

    pub fn n(&self) -> usize {
        self.priority.len()
    }

    pub fn m(&self) -> usize {
        self.positions.len()
    }

    pub fn with_kind(mut self, kind: MonoOrder) -> TermOrder {
        self.kind = kind;
        self
    }

    pub fn with_priority(mut self, priority: Vec<usize>) -> TermOrder {
        self.priority = priority;
        self
    }

    pub fn with_rule(mut self, rule: PositionRule) -> TermOrder {
        self.rule = rule;
        self
    }

    /// Same order on a module with `m` positions, keeping the derivative part.
    pub fn resized(&self, m: usize) -> TermOrder {
        TermOrder { positions: (0..m).collect(), blocks: vec![0; m], ..self.clone() }
    }

    /// Appends `extra` positions in a lower elimination block.
    pub fn extended_below(&self, extra: usize) -> TermOrder {
        let m = self.m();
        let mut positions = self.positions.clone();
        positions.extend(m..m + extra);
        let mut blocks: Vec<u32> = self.blocks.iter().map(|b| b + 1).collect();
        blocks.extend(std::iter::repeat(0).take(extra));
        TermOrder { positions, blocks, ..self.clone() }
    }

    fn mono_key(&self, mu: &DMono, out: &mut Vec<i64>) {
        let e: Vec<i64> = self.priority.iter().map(|&i| mu.0[i] as i64).collect();
        match self.kind {
            MonoOrder::DegRevLex => {
                out.push(mu.order() as i64);
                out.extend(e.iter().rev().map(|x| -x));
            }
            MonoOrder::DegLex => {
                out.push(mu.order() as i64);
                out.extend(e);
            }
            MonoOrder::Lex => out.extend(e),
        }
    }

    /// A vector whose lexicographic order is the term order.
    pub fn key(&self, pos: usize, mu: &DMono) -> Vec<i64> {
        let rank = self.positions.iter().position(|&p| p == pos).expect("position") as i64;
        let mut out = vec![self.blocks[pos] as i64];
        match self.rule {
            PositionRule::Top => {
                self.mono_key(mu, &mut out);
                out.push(-rank);
            }
            PositionRule::Pot => {
                out.push(-rank);
                self.mono_key(mu, &mut out);
            }
        }
        out
    }

    pub fn cmp(&self, a: (usize, &DMono), b: (usize, &DMono)) -> Ordering {
        self.key(a.0, a.1).cmp(&self.key(b.0, b.1))
    }

    /// Derivation indices from lowest to highest priority, the order the
    /// Janet boards are printed in.
    pub fn display_vars(&self) -> Vec<usize> {
        self.priority.iter().rev().cloned().collect()
    }
}

/// A p×m matrix over D acting on columns of unknowns.
#[derive(Clone, Debug)]
pub struct OpMatrix {
    n: usize,
    cols: usize,
    entries: Vec<Vec<ScalarOp>>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl PartialEq for OpMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.cols == other.cols && self.entries == other.entries
    }
}

fn default_labels(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

impl OpMatrix {
    pub fn zero(n: usize, rows: usize, cols: usize) -> OpMatrix {
        OpMatrix {
            n,
            cols,
            entries: vec![vec![ScalarOp::zero(); cols]; rows],
            row_labels: default_labels("eta", rows),
            col_labels: default_labels("y", cols),
        }
    }

    pub fn identity(n: usize, m: usize) -> OpMatrix {
        let mut a = OpMatrix::zero(n, m, m);
        for i in 0..m {
            a.entries[i][i] = ScalarOp::one(n);
        }
        a
    }

    pub fn from_rows(n: usize, cols: usize, rows: Vec<Vec<ScalarOp>>) -> OpMatrix {
        let mut a = OpMatrix::zero(n, 0, cols);
        for r in rows {
            a.push_row(r, None);
        }
        a
    }

    pub fn push_row(&mut self, row: Vec<ScalarOp>, label: Option<String>) {
        assert_eq!(row.len(), self.cols, "row length");
        self.entries.push(row);
        let k = self.entries.len();
        self.row_labels.push(label.unwrap_or_else(|| format!("eta{k}")));
    }

    pub fn with_col_labels(mut self, labels: Vec<String>) -> OpMatrix {
        assert_eq!(labels.len(), self.cols);
        self.col_labels = labels;
        self
    }

    pub fn with_row_labels(mut self, labels: Vec<String>) -> OpMatrix {
        assert_eq!(labels.len(), self.entries.len());
        self.row_labels = labels;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarOp {
        &self.entries[i][j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut ScalarOp {
        &mut self.entries[i][j]
    }

    pub fn row(&self, i: usize) -> &[ScalarOp] {
        &self.entries[i]
    }

    pub fn row_vec(&self) -> Vec<Vec<ScalarOp>> {
        self.entries.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(ScalarOp::is_zero)
    }

    pub fn order(&self) -> Option<u32> {
        self.entries.iter().flatten().filter_map(ScalarOp::order).max()
    }

    pub fn row_order(&self, i: usize) -> Option<u32> {
        self.entries[i].iter().filter_map(ScalarOp::order).max()
    }

    pub fn select_rows(&self, idx: &[usize]) -> OpMatrix {
        let mut a = OpMatrix::zero(self.n, 0, self.cols).with_col_labels(self.col_labels.clone());
        for &i in idx {
            a.push_row(self.entries[i].clone(), Some(self.row_labels[i].clone()));
        }
        a
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &OpMatrix) -> Result<OpMatrix, Error> {
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "stacking {} columns on {} columns",
                other.cols, self.cols
            )));
        }
        let mut a = self.clone();
        for i in 0..other.rows() {
            a.push_row(other.entries[i].clone(), Some(other.row_labels[i].clone()));
        }
        Ok(a)
    }

    pub fn add(&self, other: &OpMatrix) -> Result<OpMatrix, Error> {
        if self.rows() != other.rows() || self.cols != other.cols {
            return Err(Error::ShapeMismatch("sum of different shapes".into()));
        }
        let mut a = self.clone();
        for i in 0..self.rows() {
            for j in 0..self.cols {
                a.entries[i][j] = self.entries[i][j].add(&other.entries[i][j]);
            }
        }
        Ok(a)
    }

    /// The product `self ∘ a`.
    pub fn compose(&self, field: &DiffField, a: &OpMatrix) -> Result<OpMatrix, Error> {
        if self.cols != a.rows() {
            return Err(Error::ShapeMismatch(format!(
                "compose: {} columns against {} rows",
                self.cols,
                a.rows()
            )));
        }
        let mut out = OpMatrix::zero(self.n, self.rows(), a.cols)
            .with_col_labels(a.col_labels.clone())
            .with_row_labels(self.row_labels.clone());
        for i in 0..self.rows() {
            for k in 0..self.cols {
                let b = &self.entries[i][k];
                if b.is_zero() {
                    continue;
                }
                for j in 0..a.cols {
                    let t = b.mul(field, &a.entries[k][j]);
                    if !t.is_zero() {
                        out.entries[i][j] = out.entries[i][j].add(&t);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Formal adjoint: an m×p matrix with entry (k, τ) = ad(a_{τk}).
    pub fn adjoint(&self, field: &DiffField) -> OpMatrix {
        let mut out = OpMatrix::zero(self.n, self.cols, self.rows());
        out.row_labels = self.col_labels.clone();
        out.col_labels = (1..=self.rows()).map(|i| format!("mu{i}")).collect();
        for t in 0..self.rows() {
            for k in 0..self.cols {
                out.entries[k][t] = self.entries[t][k].adjoint(field);
            }
        }
        out
    }

    /// Applies the operator to a column of functions.
    pub fn apply_to_section(&self, field: &DiffField, s: &[RatFunc]) -> Result<Vec<RatFunc>, Error> {
        if s.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "section of length {} for {} columns",
                s.len(),
                self.cols
            )));
        }
        Ok(self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .zip(s)
                    .fold(RatFunc::zero(), |acc, (p, f)| acc.add(&p.apply(field, f)))
            })
            .collect())
    }

    /// Substitutes a value for a parameter-like symbol in every coefficient.
    pub fn map_coeffs(&self, f: &dyn Fn(&RatFunc) -> RatFunc) -> OpMatrix {
        let mut a = self.clone();
        for row in a.entries.iter_mut() {
            for e in row.iter_mut() {
                let mut out = ScalarOp::zero();
                for (mu, c) in e.terms() {
                    out.add_term(mu.clone(), &f(c));
                }
                *e = out;
            }
        }
        a
    }
}

/// Renders a coefficient so that it reparses as a single factor.
pub fn fmt_coeff(field: &DiffField, a: &RatFunc) -> (bool, String) {
    let neg = a.numer().leading().map(|(_, c)| c.is_negative()).unwrap_or(false)
        && a.numer().len() == 1;
    let b = if neg { a.neg() } else { a.clone() };
    let s = field.fmt(&b);
    let simple = b.is_polynomial() && b.numer().len() == 1;
    if simple || (b.is_polynomial() && b.numer().is_constant()) {
        (neg, s)
    } else {
        (neg, format!("({s})"))
    }
}

/// Renders `Σ a_μ d^μ(unknown)` in the input syntax.
pub fn fmt_row(field: &DiffField, row: &[ScalarOp], unknowns: &[String]) -> String {
    let mut parts: Vec<(bool, String)> = Vec::new();
    for (j, p) in row.iter().enumerate() {
        for (mu, a) in p.terms().iter().rev() {
            let target = if mu.is_one() {
                unknowns[j].clone()
            } else {
                format!("{}({})", deriv_prefix(&mu.0), unknowns[j])
            };
            let (neg, c) = fmt_coeff(field, a);
            let body = if a.is_one() || a.neg().is_one() {
                target
            } else {
                format!("{c}*{target}")
            };
            parts.push((neg, body));
        }
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (neg, body)) in parts.into_iter().enumerate() {
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}
