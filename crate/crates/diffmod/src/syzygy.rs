//! Compatibility conditions, formally exact sequences and differential rank.

use crate::coefficients::Session;
use crate::involution::{complete, complete_with, CompleteOptions, InvolutiveBasis};
use crate::ore::{OpMatrix, ScalarOp, TermOrder};
use crate::Error;

/// Compatibility conditions of an operator together with the data that
/// certifies them.
#[derive(Clone, Debug)]
pub struct Compatibility {
    /// Generating compatibility conditions, one row per condition.
    pub matrix: OpMatrix,
    /// Janet basis of the module of all conditions; `None` when there are none.
    pub basis: Option<InvolutiveBasis>,
    /// Janet basis of the input rows.
    pub completed: InvolutiveBasis,
}

impl Compatibility {
    /// True iff `row` (a row over the second members) is a consequence of
    /// the generating conditions.
    pub fn generates(&self, session: &Session, row: &[ScalarOp]) -> Result<bool, Error> {
        match &self.basis {
            Some(b) => b.reduces_to_zero(session, row),
            None => Ok(row.iter().all(ScalarOp::is_zero)),
        }
    }
}

fn term_order_for(a: &OpMatrix) -> TermOrder {
    TermOrder::new(a.n(), a.cols())
}

/// Rows of `basis` that minimally generate its module, lowest order first.
pub fn minimal_generators(session: &Session, basis: &InvolutiveBasis) -> Result<OpMatrix, Error> {
    let all = basis.rows();
    let n = basis.field().n();
    let m = basis.m();
    let mut cand: Vec<Vec<ScalarOp>> = all.into_iter().map(|r| r.op).collect();
    cand.reverse();
    let mut kept: Vec<Vec<ScalarOp>> = Vec::new();
    let mut kept_basis: Option<InvolutiveBasis> = None;
    for r in cand {
        let inside = match &kept_basis {
            Some(b) => b.reduces_to_zero(session, &r)?,
            None => false,
        };
        if !inside {
            kept.push(r);
            let mat = OpMatrix::from_rows(n, m, kept.clone());
            kept_basis = Some(complete(session, &mat)?);
        }
    }
    // Drop rows that the others already generate, largest first.
    let mut k = kept.len();
    while k > 0 {
        k -= 1;
        if kept.len() == 1 {
            break;
        }
        let others: Vec<Vec<ScalarOp>> =
            kept.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, r)| r.clone()).collect();
        let b = complete(session, &OpMatrix::from_rows(n, m, others))?;
        if b.reduces_to_zero(session, &kept[k])? {
            kept.remove(k);
        }
    }
    Ok(OpMatrix::from_rows(n, m, kept))
}

/// Generating compatibility conditions of `a`, in the coordinates of its rows.
pub fn compatibility_conditions(session: &Session, a: &OpMatrix) -> Result<Compatibility, Error> {
    let p = a.rows();
    let opts = CompleteOptions { order: term_order_for(a), track: true };
    let completed = complete_with(session, a, &opts)?;
    let raw = completed.syzygies();
    let labels: Vec<String> = a.row_labels.clone();
    if raw.is_empty() {
        let matrix = OpMatrix::zero(a.n(), 0, p).with_col_labels(labels);
        return Ok(Compatibility { matrix, basis: None, completed });
    }
    let s = OpMatrix::from_rows(a.n(), p, raw);
    let basis = complete(session, &s)?;
    let mut matrix = minimal_generators(session, &basis)?.with_col_labels(labels);
    matrix.row_labels = (1..=matrix.rows()).map(|i| format!("C{i}")).collect();
    Ok(Compatibility { matrix, basis: Some(basis), completed })
}

/// The chain 𝒟, 𝒟₁, 𝒟₂, … of successive compatibility conditions.
#[derive(Clone, Debug)]
pub struct DiffSequence {
    pub ops: Vec<OpMatrix>,
    pub orders: Vec<u32>,
    pub formally_exact: bool,
    pub strictly_exact: bool,
    pub involutive: bool,
    /// `compose(ops[i+1], ops[i]) = 0` for each consecutive pair.
    pub certificates: Vec<bool>,
    /// True if the length cap stopped the iteration before the conditions ran out.
    pub truncated: bool,
}

impl DiffSequence {
    /// Ranks of the free modules from the unknowns onwards: cols(𝒟), rows(𝒟), rows(𝒟₁), …
    pub fn ranks(&self) -> Vec<usize> {
        let mut out = vec![self.ops[0].cols()];
        out.extend(self.ops.iter().map(|o| o.rows()));
        out
    }
}

/// Iterates compatibility conditions until none remain, at most
/// `min(max_steps, n + 1)` operators beyond the first.
pub fn build_sequence(session: &Session, a: &OpMatrix, max_steps: usize) -> Result<DiffSequence, Error> {
    let field = session.field();
    let cap = max_steps.max(1).min(a.n() + 1);
    let mut ops = vec![a.clone()];
    let mut strictly = true;
    let mut involutive = true;
    let mut truncated = false;
    loop {
        let last = ops.last().unwrap();
        let cc = compatibility_conditions(session, last)?;
        strictly &= cc.completed.is_formally_integrable();
        involutive &= cc.completed.input_was_involutive();
        if cc.matrix.rows() == 0 {
            break;
        }
        if ops.len() > cap {
            truncated = true;
            break;
        }
        ops.push(cc.matrix);
    }
    let mut certificates = Vec::new();
    for w in ops.windows(2) {
        certificates.push(w[1].compose(field, &w[0])?.is_zero());
    }
    let orders = ops.iter().map(|o| o.order().unwrap_or(0)).collect();
    Ok(DiffSequence {
        ops,
        orders,
        formally_exact: true,
        strictly_exact: strictly,
        involutive,
        certificates,
        truncated,
    })
}

/// Rank of `a` over D: the number of unknowns carrying a leading term in a
/// Janet basis of its rows.
pub fn differential_rank(session: &Session, a: &OpMatrix) -> Result<usize, Error> {
    if a.rows() == 0 || a.is_zero() {
        return Ok(0);
    }
    let b = complete(session, a)?;
    let mut pos: Vec<usize> = b.rows().iter().map(|r| r.lead.0).collect();
    pos.sort();
    pos.dedup();
    Ok(pos.len())
}

/// Alternating sum of the ranks of a finite free resolution.
pub fn alternating_rank_sum(ranks: &[usize]) -> i64 {
    ranks
        .iter()
        .enumerate()
        .map(|(i, &r)| if i % 2 == 0 { r as i64 } else { -(r as i64) })
        .sum()
}
