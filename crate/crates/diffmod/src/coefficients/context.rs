use std::collections::BTreeSet;
use std::sync::Mutex;

use super::field::DiffField;
use super::poly::{gcd, Poly};
use super::ratfunc::RatFunc;
use crate::Error;

/// Limits on completion work. Values may be overridden by the
/// `DIFFMOD_MAX_ORDER` and `DIFFMOD_MAX_STEPS` environment variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Highest prolongation order; `None` means `2q + 6` for input order `q`.
    pub max_order: Option<u32>,
    pub max_steps: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_order: None, max_steps: 10_000 }
    }
}

impl Budget {
    pub fn from_env() -> Budget {
        let mut b = Budget::default();
        if let Some(v) = std::env::var("DIFFMOD_MAX_ORDER").ok().and_then(|v| v.parse().ok()) {
            b.max_order = Some(v);
        }
        if let Some(v) = std::env::var("DIFFMOD_MAX_STEPS").ok().and_then(|v| v.parse().ok()) {
            b.max_steps = v;
        }
        b
    }

    pub fn order_limit(&self, q: u32) -> u32 {
        self.max_order.unwrap_or(2 * q + 6)
    }
}

/// A computation session: the field, the nonzero assumptions in force, and
/// the provisos consumed so far.
///
/// Provisos only ever grow. Each branch of a case split gets its own session.
pub struct Session {
    field: DiffField,
    assumptions: Vec<Poly>,
    split: BTreeSet<u32>,
    provisos: Mutex<Vec<RatFunc>>,
    pub budget: Budget,
}

impl Clone for Session {
    fn clone(&self) -> Self {
        Session {
            field: self.field.clone(),
            assumptions: self.assumptions.clone(),
            split: self.split.clone(),
            provisos: Mutex::new(self.provisos()),
            budget: self.budget.clone(),
        }
    }
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Session")
            .field("field", &self.field)
            .field("assumptions", &self.assumptions.len())
            .field("provisos", &self.provisos().len())
            .finish()
    }
}

impl Session {
    pub fn new(field: DiffField) -> Session {
        Session {
            field,
            assumptions: Vec::new(),
            split: BTreeSet::new(),
            provisos: Mutex::new(Vec::new()),
            budget: Budget::from_env(),
        }
    }

    pub fn field(&self) -> &DiffField {
        &self.field
    }

    /// Asserts `f ≠ 0` for the rest of the session.
    pub fn assume(&mut self, f: &RatFunc) -> Result<(), Error> {
        if f.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let p = self.strip_generic(f.numer().normalized());
        if !p.is_constant() && !self.assumptions.contains(&p) {
            self.assumptions.push(p);
        }
        Ok(())
    }

    /// Marks a parameter whose vanishing must be decided by an explicit case
    /// split rather than a recorded proviso.
    pub fn mark_split(&mut self, param: usize) {
        self.split.insert(self.field.param_symbol(param));
    }

    pub fn assumptions(&self) -> Vec<RatFunc> {
        self.assumptions.iter().cloned().map(RatFunc::from).collect()
    }

    pub fn provisos(&self) -> Vec<RatFunc> {
        self.provisos.lock().unwrap().clone()
    }

    /// True iff `f` vanishes identically. Assumptions never make a nonzero
    /// element zero; they only decide which pivots may be divided by.
    pub fn is_zero_under(&self, f: &RatFunc) -> bool {
        f.is_zero()
    }

    /// Removes factors that never need a proviso: rational content and
    /// content in the independent variables alone.
    fn strip_generic(&self, p: Poly) -> Poly {
        let p = p.normalized();
        if p.is_constant() {
            return Poly::one();
        }
        let parts = p.split_symbols(&|s| self.field.is_var_symbol(s));
        let mut g = Poly::zero();
        for c in parts.values() {
            g = gcd(&g, c);
            if g.is_constant() {
                break;
            }
        }
        if g.is_constant() {
            p
        } else {
            p.div_exact(&g).expect("content divides").normalized()
        }
    }

    /// The part of the numerator of `f` that is not known to be nonzero.
    pub fn residue(&self, f: &RatFunc) -> Poly {
        let mut p = self.strip_generic(f.numer().clone());
        for a in &self.assumptions {
            while !p.is_constant() {
                match p.div_exact(a) {
                    Some(q) => p = q,
                    None => break,
                }
            }
        }
        p.normalized()
    }

    /// Accepts `f` as an invertible pivot, recording a proviso when needed.
    pub fn check_pivot(&self, f: &RatFunc) -> Result<(), Error> {
        if f.is_zero() {
            return Err(Error::PivotNotInvertible("0".into()));
        }
        let r = self.residue(f);
        if r.is_constant() {
            return Ok(());
        }
        let syms = r.symbols();
        if syms.iter().all(|s| self.split.contains(s)) {
            return Err(Error::CaseSplitRequired {
                params: syms.iter().map(|s| self.field.symbol_name(*s)).collect(),
                pivot: self.field.fmt_poly(&r),
            });
        }
        let r = RatFunc::from(r);
        let mut pv = self.provisos.lock().unwrap();
        if !pv.contains(&r) {
            pv.push(r);
        }
        Ok(())
    }

    /// Inverse of a pivot after [`check_pivot`](Self::check_pivot).
    pub fn invert(&self, f: &RatFunc) -> Result<RatFunc, Error> {
        self.check_pivot(f)?;
        f.inv()
    }

    /// Provisos recorded after the first `mark` entries.
    pub fn provisos_since(&self, mark: usize) -> Vec<RatFunc> {
        self.provisos()[mark..].to_vec()
    }

    /// Same field, assumptions and budget, with no provisos yet.
    pub fn fresh(&self) -> Session {
        Session {
            field: self.field.clone(),
            assumptions: self.assumptions.clone(),
            split: self.split.clone(),
            provisos: Mutex::new(Vec::new()),
            budget: self.budget.clone(),
        }
    }

    /// Appends the provisos of `other` that are not already recorded.
    pub fn absorb(&self, other: &Session) {
        let theirs = other.provisos();
        let mut pv = self.provisos.lock().unwrap();
        for r in theirs {
            if !pv.contains(&r) {
                pv.push(r);
            }
        }
    }

    pub fn proviso_mark(&self) -> usize {
        self.provisos.lock().unwrap().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_content_needs_no_proviso() {
        let k = DiffField::new(&["x"], &[], &["a"]).unwrap();
        let s = Session::new(k.clone());
        let a = k.jet(0, &[0]);
        let pivot = k.var(0).mul(&RatFunc::from_int(3));
        s.check_pivot(&pivot).unwrap();
        assert!(s.provisos().is_empty());
        s.check_pivot(&a.mul(&k.var(0))).unwrap();
        assert_eq!(s.provisos(), vec![a]);
    }

    #[test]
    fn assumed_factors_are_stripped() {
        let k = DiffField::new(&["x"], &["c"], &[]).unwrap();
        let mut s = Session::new(k.clone());
        s.mark_split(0);
        let c = k.param(0);
        assert!(matches!(s.check_pivot(&c), Err(Error::CaseSplitRequired { .. })));
        s.assume(&c).unwrap();
        s.check_pivot(&c.mul(&c)).unwrap();
        assert!(s.provisos().is_empty());
    }

    #[test]
    fn proviso_sign_is_normalized() {
        let k = DiffField::new(&["x"], &["l1", "l2"], &[]).unwrap();
        let s = Session::new(k.clone());
        s.check_pivot(&k.param(1).sub(&k.param(0))).unwrap();
        assert_eq!(s.provisos(), vec![k.param(0).sub(&k.param(1))]);
    }
}
