//! Janet division, involutive completion and normal forms.
//!
//! Rows may carry a second block of positions (the "second members") that
//! records how each row was obtained from the input equations. That block
//! always sits below the equation block in the term order, so a row whose
//! equation part cancels exposes a relation among the inputs.

use std::collections::{BTreeMap, BTreeSet};

use crate::coefficients::{DiffField, RatFunc, Session};
use crate::ore::{DMono, OpMatrix, ScalarOp, TermOrder};
use crate::Error;

/// A module monomial `d^μ e_pos` together with its sort key.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Term {
    key: Vec<i64>,
    pub pos: usize,
    pub mono: DMono,
}

impl Term {
    pub fn new(order: &TermOrder, pos: usize, mono: DMono) -> Term {
        Term { key: order.key(pos, &mono), pos, mono }
    }
}

/// A sparse row over D, sorted by the term order (leading term last).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Row {
    terms: BTreeMap<Term, RatFunc>,
}

impl Row {
    pub fn zero() -> Row {
        Row::default()
    }

    /// Row from scalar entries placed at positions `offset..`.
    pub fn from_ops(order: &TermOrder, ops: &[ScalarOp], offset: usize) -> Row {
        let mut r = Row::zero();
        for (j, p) in ops.iter().enumerate() {
            for (mu, a) in p.terms() {
                r.add_term(Term::new(order, offset + j, mu.clone()), a);
            }
        }
        r
    }

    pub fn unit(order: &TermOrder, pos: usize) -> Row {
        let mut r = Row::zero();
        r.add_term(Term::new(order, pos, DMono::one(order.n())), &RatFunc::one());
        r
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Term, &RatFunc)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> Option<(&Term, &RatFunc)> {
        self.terms.iter().next_back()
    }

    /// Highest order among terms at positions below `limit`.
    pub fn order_below(&self, limit: usize) -> Option<u32> {
        self.terms.keys().filter(|t| t.pos < limit).map(|t| t.mono.order()).max()
    }

    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|t| t.mono.order()).max()
    }

    pub fn add_term(&mut self, t: Term, a: &RatFunc) {
        if a.is_zero() {
            return;
        }
        match self.terms.get_mut(&t) {
            Some(c) => {
                *c = c.add(a);
                if c.is_zero() {
                    self.terms.remove(&t);
                }
            }
            None => {
                self.terms.insert(t, a.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Row, c: &RatFunc) {
        for (t, a) in &other.terms {
            self.add_term(t.clone(), &c.mul(a));
        }
    }

    pub fn scale_left(&self, c: &RatFunc) -> Row {
        let mut r = Row::zero();
        r.add_scaled(self, c);
        r
    }

    pub fn neg(&self) -> Row {
        self.scale_left(&RatFunc::from_int(-1))
    }

    /// `d_i ∘ self`.
    pub fn prolong(&self, field: &DiffField, order: &TermOrder, i: usize) -> Row {
        let mut r = Row::zero();
        for (t, a) in &self.terms {
            r.add_term(Term::new(order, t.pos, t.mono.bump(i)), a);
            let da = field.derive(i, a);
            r.add_term(t.clone(), &da);
        }
        r
    }

    /// `d^ν ∘ self`.
    pub fn d_left(&self, field: &DiffField, order: &TermOrder, nu: &DMono) -> Row {
        let mut r = self.clone();
        for (i, &k) in nu.0.iter().enumerate() {
            for _ in 0..k {
                r = r.prolong(field, order, i);
            }
        }
        r
    }

    /// `P ∘ self` for a scalar operator `P`.
    pub fn op_left(&self, field: &DiffField, order: &TermOrder, p: &ScalarOp) -> Row {
        let mut out = Row::zero();
        for (mu, a) in p.terms() {
            out.add_scaled(&self.d_left(field, order, mu), a);
        }
        out
    }

    /// Entries at positions `offset..offset + len`, as scalar operators.
    pub fn to_ops(&self, offset: usize, len: usize) -> Vec<ScalarOp> {
        let mut out = vec![ScalarOp::zero(); len];
        for (t, a) in &self.terms {
            if t.pos >= offset && t.pos < offset + len {
                out[t.pos - offset].add_term(t.mono.clone(), a);
            }
        }
        out
    }

    /// Restriction to positions `offset..offset + len`, re-keyed for `order`
    /// with positions shifted down by `offset`.
    pub fn restrict(&self, order: &TermOrder, offset: usize, len: usize) -> Row {
        Row::from_ops(order, &self.to_ops(offset, len), 0)
    }

    pub fn has_pos_below(&self, limit: usize) -> bool {
        self.terms.keys().any(|t| t.pos < limit)
    }
}

/// Janet multiplicative variables for each monomial of `leads`, grouped by
/// position. Variables are scanned from the highest priority down.
pub fn janet_mult(order: &TermOrder, leads: &[(usize, DMono)]) -> Vec<BTreeSet<usize>> {
    let mut out = vec![BTreeSet::new(); leads.len()];
    let positions: BTreeSet<usize> = leads.iter().map(|l| l.0).collect();
    for pos in positions {
        let idx: Vec<usize> = (0..leads.len()).filter(|&k| leads[k].0 == pos).collect();
        janet_rec(order, leads, &idx, 0, &mut out);
    }
    out
}

fn janet_rec(
    order: &TermOrder,
    leads: &[(usize, DMono)],
    idx: &[usize],
    level: usize,
    out: &mut [BTreeSet<usize>],
) {
    if level == order.priority.len() || idx.is_empty() {
        return;
    }
    let v = order.priority[level];
    let max = idx.iter().map(|&k| leads[k].1 .0[v]).max().unwrap();
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for &k in idx {
        let d = leads[k].1 .0[v];
        if d == max {
            out[k].insert(v);
        }
        groups.entry(d).or_default().push(k);
    }
    for g in groups.values() {
        janet_rec(order, leads, g, level + 1, out);
    }
}

/// One row of an involutive basis.
#[derive(Clone, Debug, PartialEq)]
pub struct JanetRow {
    /// Equation part, one scalar operator per unknown.
    pub op: Vec<ScalarOp>,
    pub lead: (usize, DMono),
    /// Multiplicative variables (0-based derivation indices).
    pub mult: BTreeSet<usize>,
    /// The lowest-priority derivation occurring in the leading derivative.
    pub class: usize,
}

/// One step of the completion.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    /// `input k` or `d_i(row)` in 1-based indices.
    pub source: String,
    pub source_order: u32,
    /// Leading term and order of the reduced row, when it did not vanish.
    pub result: Option<((usize, DMono), u32)>,
    pub added: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CompletionTrace {
    pub steps: Vec<TraceStep>,
    /// Rows of lower order than the prolongation that produced them.
    pub integrability_conditions: Vec<Vec<ScalarOp>>,
    pub provisos: Vec<RatFunc>,
}

/// Options for [`complete_with`].
#[derive(Clone, Debug)]
pub struct CompleteOptions {
    pub order: TermOrder,
    /// Track second members so that relations among the inputs are collected.
    pub track: bool,
}

/// An involutive (Janet) basis of the row module of a matrix.
#[derive(Clone, Debug)]
pub struct InvolutiveBasis {
    field: DiffField,
    /// Term order on the equation positions.
    pub order: TermOrder,
    /// Order including the second-member block, if tracked.
    full_order: TermOrder,
    m: usize,
    p: usize,
    rows: Vec<Row>,
    mult: Vec<BTreeSet<usize>>,
    pub trace: CompletionTrace,
    syzygies: Vec<Row>,
    input_involutive: bool,
}

/// Working state shared by completion and reduction.
struct Work<'a> {
    session: &'a Session,
    order: TermOrder,
    m: usize,
    steps: usize,
    max_steps: usize,
}

impl Work<'_> {
    fn tick(&mut self) -> Result<(), Error> {
        self.steps += 1;
        if self.steps > self.max_steps {
            return Err(Error::ResourceLimit(format!(
                "more than {} reduction steps",
                self.max_steps
            )));
        }
        Ok(())
    }

    fn field(&self) -> &DiffField {
        self.session.field()
    }
}

fn leads(rows: &[Row]) -> Vec<(usize, DMono)> {
    rows.iter()
        .map(|r| {
            let t = r.lead().unwrap().0;
            (t.pos, t.mono.clone())
        })
        .collect()
}

/// The reducer of `t` among `basis`, with the multiplier `d^λ`.
fn janet_divisor(
    t: &Term,
    basis: &[Row],
    mult: &[BTreeSet<usize>],
) -> Option<(usize, DMono)> {
    for (k, g) in basis.iter().enumerate() {
        let lt = g.lead().unwrap().0;
        if lt.pos != t.pos {
            continue;
        }
        if let Some(lambda) = t.mono.div(&lt.mono) {
            if lambda.0.iter().enumerate().all(|(i, &e)| e == 0 || mult[k].contains(&i)) {
                return Some((k, lambda));
            }
        }
    }
    None
}

/// Full involutive reduction of the terms at equation positions.
fn reduce(
    w: &mut Work,
    mut r: Row,
    basis: &[Row],
    mult: &[BTreeSet<usize>],
) -> Result<Row, Error> {
    let mut cache: BTreeMap<(usize, DMono), Row> = BTreeMap::new();
    let mut bound: Option<Term> = None;
    loop {
        let found = {
            let mut it: Box<dyn Iterator<Item = (&Term, &RatFunc)>> = match &bound {
                Some(b) => Box::new(r.terms.range(..=b.clone()).rev()),
                None => Box::new(r.terms.iter().rev()),
            };
            it.find_map(|(t, c)| {
                if t.pos >= w.m {
                    return None;
                }
                janet_divisor(t, basis, mult).map(|d| (t.clone(), c.clone(), d))
            })
        };
        let Some((t, c, (k, lambda))) = found else {
            return Ok(r);
        };
        w.tick()?;
        let key = (k, lambda.clone());
        let g = match cache.get(&key) {
            Some(g) => g.clone(),
            None => {
                let g = basis[k].d_left(w.field(), &w.order, &lambda);
                cache.insert(key, g.clone());
                g
            }
        };
        r.add_scaled(&g, &c.neg());
        bound = Some(t);
    }
}

fn make_monic(w: &Work, r: Row) -> Result<Row, Error> {
    let lc = r.lead().unwrap().1.clone();
    if lc.is_one() {
        return Ok(r);
    }
    let inv = w.session.invert(&lc)?;
    Ok(r.scale_left(&inv))
}

/// Completes the rows of `a` to a Janet basis under the default order.
pub fn complete(session: &Session, a: &OpMatrix) -> Result<InvolutiveBasis, Error> {
    let order = TermOrder::new(a.n(), a.cols());
    complete_with(session, a, &CompleteOptions { order, track: false })
}

/// Completes the rows of `a` to a Janet basis.
pub fn complete_with(
    session: &Session,
    a: &OpMatrix,
    opts: &CompleteOptions,
) -> Result<InvolutiveBasis, Error> {
    let m = a.cols();
    let p = if opts.track { a.rows() } else { 0 };
    let full_order = if opts.track { opts.order.extended_below(p) } else { opts.order.clone() };
    let q = a.order().unwrap_or(0);
    let limit = session.budget.order_limit(q);
    let mark = session.proviso_mark();
    let mut w = Work {
        session,
        order: full_order.clone(),
        m,
        steps: 0,
        max_steps: session.budget.max_steps,
    };
    let mut trace = CompletionTrace::default();

    let inputs: Vec<Row> = (0..a.rows())
        .map(|k| {
            let mut r = Row::from_ops(&full_order, a.row(k), 0);
            if opts.track {
                r.add_scaled(&Row::unit(&full_order, m + k), &RatFunc::one());
            }
            r
        })
        .collect();

    // (row, source label, source order, is a prolongation)
    let mut queue: Vec<(Row, String, u32, bool)> = inputs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.has_pos_below(m))
        .map(|(k, r)| (r.clone(), format!("input {}", k + 1), r.order_below(m).unwrap(), false))
        .collect();
    let mut basis: Vec<Row> = Vec::new();
    let mut mult: Vec<BTreeSet<usize>> = Vec::new();
    let mut input_involutive = true;

    loop {
        while !queue.is_empty() {
            // smallest leading term first
            let k = (0..queue.len())
                .min_by(|&i, &j| queue[i].0.lead().unwrap().0.cmp(queue[j].0.lead().unwrap().0))
                .unwrap();
            let (row, source, source_order, prolonged) = queue.swap_remove(k);
            let h = reduce(&mut w, row, &basis, &mult)?;
            if !h.has_pos_below(m) {
                trace.steps.push(TraceStep { source, source_order, result: None, added: false });
                continue;
            }
            let h = make_monic(&w, h)?;
            let h_order = h.order_below(m).unwrap();
            if h_order > limit {
                return Err(Error::ResourceLimit(format!(
                    "prolongation order {h_order} exceeds {limit}"
                )));
            }
            if prolonged && h_order < source_order {
                trace.integrability_conditions.push(h.to_ops(0, m));
            }
            if prolonged {
                input_involutive = false;
            }
            let lt = h.lead().unwrap().0.clone();
            trace.steps.push(TraceStep {
                source,
                source_order,
                result: Some(((lt.pos, lt.mono.clone()), h_order)),
                added: true,
            });
            let mut keep = Vec::new();
            for g in basis.drain(..) {
                let gt = g.lead().unwrap().0;
                if gt.pos == lt.pos && lt.mono.divides(&gt.mono) {
                    let o = g.order_below(m).unwrap();
                    queue.push((g, "requeued".into(), o, false));
                } else {
                    keep.push(g);
                }
            }
            keep.push(h);
            basis = keep;
            mult = janet_mult(&full_order, &leads(&basis));
        }
        // Janet criterion: every nonmultiplicative prolongation reduces to zero.
        let mut pending = Vec::new();
        for (k, g) in basis.iter().enumerate() {
            for v in 0..a.n() {
                if mult[k].contains(&v) {
                    continue;
                }
                let pr = g.prolong(w.field(), &full_order, v);
                let src_order = pr.order_below(m).unwrap_or(0);
                let h = reduce(&mut w, pr.clone(), &basis, &mult)?;
                if h.has_pos_below(m) {
                    pending.push((pr, format!("d{}(row {})", v + 1, k + 1), src_order, true));
                }
            }
        }
        if pending.is_empty() {
            break;
        }
        // Keep only the smallest prolongation; the others are regenerated later.
        let k = (0..pending.len())
            .min_by(|&i, &j| pending[i].0.lead().unwrap().0.cmp(pending[j].0.lead().unwrap().0))
            .unwrap();
        queue.push(pending.swap_remove(k));
    }

    // Tail reduction; leading terms are unchanged since a lead never
    // divides the smaller terms of its own row.
    for k in 0..basis.len() {
        let (lt, lc) = basis[k].lead().map(|(t, c)| (t.clone(), c.clone())).unwrap();
        let mut tail = basis[k].clone();
        tail.terms.remove(&lt);
        let mut r = reduce(&mut w, tail, &basis, &mult)?;
        r.add_term(lt, &lc);
        basis[k] = r;
    }

    let mut syzygies = Vec::new();
    if opts.track {
        for (k, g) in basis.iter().enumerate() {
            for v in 0..a.n() {
                if mult[k].contains(&v) {
                    continue;
                }
                let pr = g.prolong(w.field(), &full_order, v);
                let h = reduce(&mut w, pr, &basis, &mult)?;
                debug_assert!(!h.has_pos_below(m));
                if !h.is_zero() {
                    syzygies.push(h);
                }
            }
        }
        for r in &inputs {
            let h = reduce(&mut w, r.clone(), &basis, &mult)?;
            debug_assert!(!h.has_pos_below(m));
            if !h.is_zero() {
                syzygies.push(h);
            }
        }
    }
    trace.provisos = session.provisos_since(mark);

    let mut order_a = opts.order.clone();
    order_a.blocks = vec![0; m];
    Ok(InvolutiveBasis {
        field: session.field().clone(),
        order: order_a,
        full_order,
        m,
        p,
        rows: basis,
        mult,
        trace,
        syzygies,
        input_involutive,
    })
}

impl InvolutiveBasis {
    pub fn field(&self) -> &DiffField {
        &self.field
    }

    /// Number of unknowns.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Maximal order of the basis rows.
    pub fn q(&self) -> u32 {
        self.rows.iter().filter_map(|r| r.order_below(self.m)).max().unwrap_or(0)
    }

    /// Rows sorted from the largest leading term down.
    fn sorted(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by(|&i, &j| self.rows[j].lead().unwrap().0.cmp(self.rows[i].lead().unwrap().0));
        idx
    }

    pub fn rows(&self) -> Vec<JanetRow> {
        self.sorted()
            .into_iter()
            .map(|k| {
                let t = self.rows[k].lead().unwrap().0;
                JanetRow {
                    op: self.rows[k].to_ops(0, self.m),
                    lead: (t.pos, t.mono.clone()),
                    mult: self.mult[k].clone(),
                    class: class_of(&self.order, &t.mono),
                }
            })
            .collect()
    }

    /// The basis as an operator matrix, largest leading term first.
    pub fn matrix(&self) -> OpMatrix {
        let rows: Vec<Vec<ScalarOp>> = self.rows().into_iter().map(|r| r.op).collect();
        OpMatrix::from_rows(self.field.n(), self.m, rows)
    }

    /// Second members of each basis row, in the order of [`rows`](Self::rows).
    pub fn second_members(&self) -> Vec<Vec<ScalarOp>> {
        self.sorted().into_iter().map(|k| self.rows[k].to_ops(self.m, self.p)).collect()
    }

    /// Raw relations among the input rows collected during completion, as
    /// rows over the second-member block.
    pub fn syzygies(&self) -> Vec<Vec<ScalarOp>> {
        self.syzygies.iter().map(|r| r.to_ops(self.m, self.p)).collect()
    }

    pub fn is_formally_integrable(&self) -> bool {
        self.trace.integrability_conditions.is_empty()
    }

    /// True when no prolongation had to be added: the input (after
    /// autoreduction) already satisfied the Janet criterion.
    pub fn input_was_involutive(&self) -> bool {
        self.input_involutive
    }

    /// Involutive normal form of a row over the unknowns.
    pub fn normal_form(&self, session: &Session, row: &[ScalarOp]) -> Result<Vec<ScalarOp>, Error> {
        let r = Row::from_ops(&self.full_order, row, 0);
        let mut w = Work {
            session,
            order: self.full_order.clone(),
            m: self.m,
            steps: 0,
            max_steps: usize::MAX,
        };
        let h = reduce(&mut w, r, &self.rows, &self.mult)?;
        Ok(h.to_ops(0, self.m))
    }

    pub fn reduces_to_zero(&self, session: &Session, row: &[ScalarOp]) -> Result<bool, Error> {
        Ok(self.normal_form(session, row)?.iter().all(ScalarOp::is_zero))
    }

    /// Normal form together with the quotients: `row = Σ c_k · basis_k + nf`.
    pub fn normal_form_with_quotients(
        &self,
        session: &Session,
        row: &[ScalarOp],
    ) -> Result<(Vec<ScalarOp>, Vec<ScalarOp>), Error> {
        // Track quotients by appending a unit block per basis row.
        let k = self.rows.len();
        let order = self.order.extended_below(k);
        let mut basis = Vec::with_capacity(k);
        for (i, g) in self.rows.iter().enumerate() {
            let mut r = Row::from_ops(&order, &g.to_ops(0, self.m), 0);
            r.add_scaled(&Row::unit(&order, self.m + i), &RatFunc::one());
            basis.push(r);
        }
        let mut w = Work { session, order: order.clone(), m: self.m, steps: 0, max_steps: usize::MAX };
        let h = reduce(&mut w, Row::from_ops(&order, row, 0), &basis, &self.mult)?;
        let nf = h.to_ops(0, self.m);
        let q = h.to_ops(self.m, k);
        let idx = self.sorted();
        let quotients = idx.iter().map(|&i| q[i].neg()).collect();
        Ok((nf, quotients))
    }

    /// Checks the Janet criterion exhaustively.
    pub fn check_criterion(&self, session: &Session) -> Result<bool, Error> {
        let mut w = Work {
            session,
            order: self.full_order.clone(),
            m: self.m,
            steps: 0,
            max_steps: usize::MAX,
        };
        for (k, g) in self.rows.iter().enumerate() {
            for v in 0..self.field.n() {
                if self.mult[k].contains(&v) {
                    continue;
                }
                let pr = g.prolong(&self.field, &self.full_order, v);
                if reduce(&mut w, pr, &self.rows, &self.mult)?.has_pos_below(self.m) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// True when no leading term is Janet-divisible by another one.
    pub fn is_autoreduced(&self) -> bool {
        let l = leads(&self.rows);
        for (i, (pi, mi)) in l.iter().enumerate() {
            for (j, (pj, mj)) in l.iter().enumerate() {
                if i == j || pi != pj {
                    continue;
                }
                if let Some(lambda) = mi.div(mj) {
                    if lambda.0.iter().enumerate().all(|(v, &e)| e == 0 || self.mult[j].contains(&v)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Janet board: per row, the derivation numbers (1-based) in display
    /// order, `None` for nonmultiplicative ones.
    pub fn board(&self) -> Vec<Vec<Option<usize>>> {
        let vars = self.order.display_vars();
        self.rows()
            .iter()
            .map(|r| vars.iter().map(|&v| if r.mult.contains(&v) { Some(v + 1) } else { None }).collect())
            .collect()
    }

    /// The board as text, one row per line, `•` for nonmultiplicative variables.
    pub fn board_text(&self) -> String {
        self.board()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| v.map(|v| v.to_string()).unwrap_or_else(|| "•".into()))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    fn leads_by_pos(&self) -> Vec<Vec<DMono>> {
        let mut out = vec![Vec::new(); self.m];
        for (p, mu) in leads(&self.rows) {
            out[p].push(mu);
        }
        out
    }

    fn is_standard(leads: &[DMono], mu: &DMono) -> bool {
        !leads.iter().any(|l| l.divides(mu))
    }

    /// Number of standard (parametric) derivatives of each order up to `upto`.
    pub fn hilbert(&self, upto: u32) -> Vec<u64> {
        let n = self.field.n();
        let by_pos = self.leads_by_pos();
        let mut out = vec![0u64; upto as usize + 1];
        for (q, slot) in out.iter_mut().enumerate() {
            for mu in monomials_of_order(n, q as u32) {
                for l in &by_pos {
                    if Self::is_standard(l, &mu) {
                        *slot += 1;
                    }
                }
            }
        }
        out
    }

    /// Counts parametric derivatives.
    pub fn count_parametric(&self) -> ParametricCount {
        let n = self.field.n();
        let by_pos = self.leads_by_pos();
        let mut bounds = Vec::new();
        for l in &by_pos {
            let mut b = Vec::with_capacity(n);
            for v in 0..n {
                let pure = l
                    .iter()
                    .filter(|mu| mu.0.iter().enumerate().all(|(i, &e)| i == v || e == 0))
                    .map(|mu| mu.0[v])
                    .min();
                match pure {
                    Some(d) => b.push(d),
                    None => {
                        return ParametricCount {
                            finite_type: false,
                            dim: None,
                            hilbert: self.hilbert(self.q() + 2),
                        }
                    }
                }
            }
            bounds.push(b);
        }
        let mut dim = 0u64;
        for (l, b) in by_pos.iter().zip(&bounds) {
            for mu in box_monomials(b) {
                if Self::is_standard(l, &mu) {
                    dim += 1;
                }
            }
        }
        ParametricCount { finite_type: true, dim: Some(dim), hilbert: self.hilbert(self.q() + 2) }
    }
}

fn class_of(order: &TermOrder, mu: &DMono) -> usize {
    order
        .priority
        .iter()
        .rev()
        .find(|&&v| mu.0[v] > 0)
        .cloned()
        .unwrap_or(order.priority[0])
}

/// Result of [`InvolutiveBasis::count_parametric`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParametricCount {
    pub finite_type: bool,
    /// Dimension over K of the solution jets; `None` for infinitely many.
    pub dim: Option<u64>,
    /// Parametric derivatives per order, from order 0.
    pub hilbert: Vec<u64>,
}

pub fn monomials_of_order(n: usize, q: u32) -> Vec<DMono> {
    if n == 0 {
        return if q == 0 { vec![DMono(vec![])] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=q).rev() {
        for mut rest in monomials_of_order(n - 1, q - first) {
            rest.0.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn box_monomials(bounds: &[u32]) -> Vec<DMono> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        let mut next = Vec::new();
        for p in &out {
            for e in 0..b {
                let mut v: Vec<u32> = p.clone();
                v.push(e);
                next.push(v);
            }
        }
        out = next;
    }
    out.into_iter().map(DMono).collect()
}
