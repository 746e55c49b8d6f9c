use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::poly::{Mono, Poly};
use super::ratfunc::RatFunc;
use crate::Error;

/// What a symbol index stands for.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    /// Independent variable `x_i` (0-based).
    Var(usize),
    /// Constant parameter, killed by every derivation.
    Param(usize),
    /// Formal derivative `∂^μ f` of an unspecified function.
    Jet(usize, Vec<u32>),
}

#[derive(Clone, Debug)]
struct Relation {
    func: usize,
    nu: Vec<u32>,
    rhs: RatFunc,
}

#[derive(Default)]
struct Table {
    jets: Vec<(usize, Vec<u32>)>,
    index: HashMap<(usize, Vec<u32>), u32>,
    relations: Vec<Relation>,
    values: HashMap<(usize, Vec<u32>), RatFunc>,
}

struct Inner {
    vars: Vec<String>,
    params: Vec<String>,
    funcs: Vec<String>,
    table: Mutex<Table>,
}

/// The differential field ℚ(params)(x₁…xₙ)⟨funcs⟩.
///
/// Cloning is cheap and clones share the jet table, so symbols interned
/// through one handle are visible through the others.
#[derive(Clone)]
pub struct DiffField(Arc<Inner>);

impl fmt::Debug for DiffField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffField")
            .field("vars", &self.0.vars)
            .field("params", &self.0.params)
            .field("funcs", &self.0.funcs)
            .finish()
    }
}

impl DiffField {
    pub fn new(vars: &[&str], params: &[&str], funcs: &[&str]) -> Result<DiffField, Error> {
        let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        DiffField::from_names(own(vars), own(params), own(funcs))
    }

    pub fn from_names(
        vars: Vec<String>,
        params: Vec<String>,
        funcs: Vec<String>,
    ) -> Result<DiffField, Error> {
        let mut seen = std::collections::HashSet::new();
        for name in vars.iter().chain(&params).chain(&funcs) {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        let n = vars.len();
        let field = DiffField(Arc::new(Inner {
            vars,
            params,
            funcs,
            table: Mutex::new(Table::default()),
        }));
        for f in 0..field.0.funcs.len() {
            field.intern(f, &vec![0; n]);
        }
        Ok(field)
    }

    /// Field with `n` variables named `x1 … xn` and nothing else.
    pub fn with_vars(n: usize) -> DiffField {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        DiffField::from_names(names, vec![], vec![]).expect("distinct names")
    }

    pub fn n(&self) -> usize {
        self.0.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn params(&self) -> &[String] {
        &self.0.params
    }

    pub fn funcs(&self) -> &[String] {
        &self.0.funcs
    }

    fn base(&self) -> u32 {
        (self.0.vars.len() + self.0.params.len()) as u32
    }

    pub fn var_symbol(&self, i: usize) -> u32 {
        assert!(i < self.n(), "variable index out of range");
        i as u32
    }

    pub fn param_symbol(&self, k: usize) -> u32 {
        assert!(k < self.0.params.len(), "parameter index out of range");
        (self.n() + k) as u32
    }

    pub fn var(&self, i: usize) -> RatFunc {
        RatFunc::symbol(self.var_symbol(i))
    }

    pub fn param(&self, k: usize) -> RatFunc {
        RatFunc::symbol(self.param_symbol(k))
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.0.params.iter().position(|p| p == name)
    }

    pub fn func_index(&self, name: &str) -> Option<usize> {
        self.0.funcs.iter().position(|p| p == name)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|p| p == name)
    }

    pub fn symbol(&self, s: u32) -> Symbol {
        let n = self.n() as u32;
        if s < n {
            Symbol::Var(s as usize)
        } else if s < self.base() {
            Symbol::Param((s - n) as usize)
        } else {
            let t = self.0.table.lock().unwrap();
            let (f, mu) = t.jets[(s - self.base()) as usize].clone();
            Symbol::Jet(f, mu)
        }
    }

    pub fn is_var_symbol(&self, s: u32) -> bool {
        (s as usize) < self.n()
    }

    pub fn is_param_symbol(&self, s: u32) -> bool {
        s >= self.n() as u32 && s < self.base()
    }

    fn intern(&self, f: usize, mu: &[u32]) -> u32 {
        let mut t = self.0.table.lock().unwrap();
        if let Some(&s) = t.index.get(&(f, mu.to_vec())) {
            return s;
        }
        let s = self.base() + t.jets.len() as u32;
        t.jets.push((f, mu.to_vec()));
        t.index.insert((f, mu.to_vec()), s);
        s
    }

    /// Free jet symbol for `∂^μ f`, bypassing relations.
    pub fn jet_symbol(&self, f: usize, mu: &[u32]) -> u32 {
        assert_eq!(mu.len(), self.n(), "multi-index length");
        self.intern(f, mu)
    }

    /// Declares `∂^ν f = rhs`. Later requests for `∂^μ f` with `ν ≤ μ`
    /// return `∂^{μ-ν} rhs`.
    pub fn add_relation(&self, f: usize, nu: &[u32], rhs: RatFunc) {
        let mut t = self.0.table.lock().unwrap();
        t.relations.push(Relation { func: f, nu: nu.to_vec(), rhs });
        t.values.clear();
    }

    /// Declared relations as `(func, ν, rhs)`.
    pub fn relations(&self) -> Vec<(usize, Vec<u32>, RatFunc)> {
        let t = self.0.table.lock().unwrap();
        t.relations.iter().map(|r| (r.func, r.nu.clone(), r.rhs.clone())).collect()
    }

    /// Rewrites `f` into the symbols of `to`, matching symbols by name.
    pub fn translate(&self, f: &RatFunc, to: &DiffField) -> Result<RatFunc, Error> {
        let map = |p: &Poly| -> Result<RatFunc, Error> {
            let mut acc = RatFunc::zero();
            for (m, c) in p.terms() {
                let mut t = RatFunc::from_rational(c.clone());
                for &(s, e) in m.factors() {
                    let target = match self.symbol(s) {
                        Symbol::Var(i) => to.var_index(&self.0.vars[i]).map(|j| to.var(j)),
                        Symbol::Param(k) => to.param_index(&self.0.params[k]).map(|j| to.param(j)),
                        Symbol::Jet(g, mu) => to
                            .func_index(&self.0.funcs[g])
                            .map(|j| RatFunc::symbol(to.jet_symbol(j, &mu))),
                    };
                    let target = target.ok_or_else(|| Error::UnknownIdentifier {
                        name: self.symbol_name(s),
                        span: Default::default(),
                    })?;
                    t = t.mul(&target.pow(e as i32)?);
                }
                acc = acc.add(&t);
            }
            Ok(acc)
        };
        map(f.numer())?.div(&map(f.denom())?)
    }

    /// Value of `∂^μ f` after relations are applied.
    pub fn jet(&self, f: usize, mu: &[u32]) -> RatFunc {
        assert_eq!(mu.len(), self.n(), "multi-index length");
        let found = {
            let t = self.0.table.lock().unwrap();
            if let Some(v) = t.values.get(&(f, mu.to_vec())) {
                return v.clone();
            }
            t.relations
                .iter()
                .find(|r| r.func == f && r.nu.iter().zip(mu).all(|(a, b)| a <= b))
                .cloned()
        };
        let value = match found {
            None => RatFunc::symbol(self.intern(f, mu)),
            Some(rel) => {
                // Step down one derivative at a time so that the memo table
                // catches the shared intermediate jets.
                match mu.iter().zip(&rel.nu).position(|(a, b)| a > b) {
                    None => rel.rhs.clone(),
                    Some(i) => {
                        let mut lower = mu.to_vec();
                        lower[i] -= 1;
                        let prev = self.jet(f, &lower);
                        self.derive(i, &prev)
                    }
                }
            }
        };
        let mut t = self.0.table.lock().unwrap();
        t.values.insert((f, mu.to_vec()), value.clone());
        value
    }

    /// `∂_i` of a single symbol.
    fn derive_symbol(&self, i: usize, s: u32) -> RatFunc {
        match self.symbol(s) {
            Symbol::Var(j) => {
                if i == j {
                    RatFunc::one()
                } else {
                    RatFunc::zero()
                }
            }
            Symbol::Param(_) => RatFunc::zero(),
            Symbol::Jet(f, mut mu) => {
                mu[i] += 1;
                self.jet(f, &mu)
            }
        }
    }

    fn derive_poly(&self, i: usize, p: &Poly) -> RatFunc {
        let mut acc = RatFunc::zero();
        for s in p.symbols() {
            let ds = self.derive_symbol(i, s);
            if ds.is_zero() {
                continue;
            }
            acc = acc.add(&RatFunc::from(p.diff(s)).mul(&ds));
        }
        acc
    }

    /// The derivation `∂_i` (0-based `i`).
    pub fn derive(&self, i: usize, f: &RatFunc) -> RatFunc {
        assert!(i < self.n(), "derivation index out of range");
        let dn = self.derive_poly(i, f.numer());
        if f.is_polynomial() {
            return dn;
        }
        let den = RatFunc::from(f.denom().clone());
        let dd = self.derive_poly(i, f.denom());
        if dd.is_zero() {
            return dn.div(&den).expect("nonzero denominator");
        }
        let num = dn.mul(&den).sub(&RatFunc::from(f.numer().clone()).mul(&dd));
        num.div(&den.mul(&den)).expect("nonzero denominator")
    }

    /// `∂^μ f`.
    pub fn derive_multi(&self, mu: &[u32], f: &RatFunc) -> RatFunc {
        let mut out = f.clone();
        for (i, &k) in mu.iter().enumerate() {
            for _ in 0..k {
                if out.is_zero() {
                    return out;
                }
                out = self.derive(i, &out);
            }
        }
        out
    }

    /// Human-readable and re-parseable name of a symbol.
    pub fn symbol_name(&self, s: u32) -> String {
        match self.symbol(s) {
            Symbol::Var(i) => self.0.vars[i].clone(),
            Symbol::Param(k) => self.0.params[k].clone(),
            Symbol::Jet(f, mu) => {
                let name = &self.0.funcs[f];
                if mu.iter().all(|&k| k == 0) {
                    name.clone()
                } else {
                    format!("{}({name})", deriv_prefix(&mu))
                }
            }
        }
    }

    pub fn fmt_poly(&self, p: &Poly) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in p.terms().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let factors: Vec<String> = m
                .factors()
                .iter()
                .map(|(s, e)| {
                    let name = self.symbol_name(*s);
                    if *e == 1 {
                        name
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if m.is_one() {
                out.push_str(&fmt_rational(&a));
            } else if a.is_one() {
                out.push_str(&factors.join("*"));
            } else {
                out.push_str(&fmt_rational(&a));
                out.push('*');
                out.push_str(&factors.join("*"));
            }
        }
        out
    }

    pub fn fmt(&self, f: &RatFunc) -> String {
        let num = self.fmt_poly(f.numer());
        if f.is_polynomial() {
            return num;
        }
        let den = self.fmt_poly(f.denom());
        let wrap = |s: String, p: &Poly| {
            if p.len() > 1 || (p.len() == 1 && !p.leading().unwrap().1.is_one()) {
                format!("({s})")
            } else {
                s
            }
        };
        let den = if !den.starts_with('(') && den.contains('*') { format!("({den})") } else { wrap(den, f.denom()) };
        let num = if f.numer().len() > 1 { format!("({num})") } else { num };
        format!("{num}/{den}")
    }

    /// Polynomial with the given monomial and unit coefficient.
    pub fn monomial(&self, powers: &[(u32, u32)]) -> RatFunc {
        let mut m = Mono::one();
        for &(s, e) in powers {
            m = m.mul(&Mono::pow(s, e));
        }
        Poly::term(m, BigRational::one()).into()
    }

    pub fn is_constant(&self, f: &RatFunc) -> bool {
        f.symbols().iter().all(|&s| self.is_param_symbol(s))
    }
}

/// `d12` style prefix for a multi-index, `d(1,1,12)` when some index exceeds 9.
pub fn deriv_prefix(mu: &[u32]) -> String {
    let mut idx = Vec::new();
    for (i, &k) in mu.iter().enumerate() {
        for _ in 0..k {
            idx.push(i + 1);
        }
    }
    if mu.len() <= 9 {
        format!("d{}", idx.iter().map(|i| i.to_string()).collect::<String>())
    } else {
        format!(
            "d({})",
            idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
        )
    }
}

pub fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl PartialEq for DiffField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for DiffField {}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn check<T: Send + Sync>() {}
    check::<DiffField>();
    check::<RatFunc>();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_rule() {
        let k = DiffField::with_vars(2);
        let f = k.var(1).mul(&k.var(0));
        assert_eq!(k.derive(1, &f), k.var(0));
    }

    #[test]
    fn params_are_constants() {
        let k = DiffField::new(&["x"], &["c"], &[]).unwrap();
        assert!(k.derive(0, &k.param(0)).is_zero());
    }

    #[test]
    fn jets_commute() {
        let k = DiffField::new(&["x1", "x2"], &[], &["a"]).unwrap();
        let a = k.jet(0, &[0, 0]);
        let f = a.mul(&k.var(0)).add(&a.mul(&a));
        let d12 = k.derive(0, &k.derive(1, &f));
        let d21 = k.derive(1, &k.derive(0, &f));
        assert_eq!(d12, d21);
        assert_eq!(k.symbol_name(k.jet_symbol(0, &[1, 1])), "d12(a)");
    }

    #[test]
    fn relation_rewrites_jets() {
        // a' = a^2 means a'' = 2 a a' = 2 a^3
        let k = DiffField::new(&["x"], &[], &["a"]).unwrap();
        let a = k.jet(0, &[0]);
        k.add_relation(0, &[1], a.mul(&a));
        let a2 = k.jet(0, &[2]);
        assert_eq!(a2, a.mul(&a).mul(&a).scale(&BigRational::from_integer(2.into())));
    }

    #[test]
    fn quotient_rule() {
        let k = DiffField::with_vars(1);
        let f = RatFunc::one().div(&k.var(0)).unwrap();
        let expect = RatFunc::from_int(-1).div(&k.var(0).mul(&k.var(0))).unwrap();
        assert_eq!(k.derive(0, &f), expect);
    }
}
