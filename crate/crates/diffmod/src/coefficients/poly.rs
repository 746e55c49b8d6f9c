//! Sparse multivariate polynomials over ℚ.
//!
//! Variables are plain `u32` symbol indices; the meaning of a symbol (an
//! independent variable, a constant parameter or a jet of an unspecified
//! function) is kept by [`DiffField`](super::DiffField).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A power product, stored as `(symbol, exponent)` pairs sorted by symbol.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono(Vec<(u32, u32)>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn var(s: u32) -> Mono {
        Mono(vec![(s, 1)])
    }

    pub fn pow(s: u32, e: u32) -> Mono {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(s, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn degree_in(&self, s: u32) -> u32 {
        self.0
            .iter()
            .find(|(v, _)| *v == s)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&(a, ea)), Some(&(b, eb))) => match a.cmp(&b) {
                    Ordering::Less => {
                        out.push((a, ea));
                        i += 1;
                    }
                    Ordering::Greater => {
                        out.push((b, eb));
                        j += 1;
                    }
                    Ordering::Equal => {
                        out.push((a, ea + eb));
                        i += 1;
                        j += 1;
                    }
                },
                (Some(&p), None) => {
                    out.push(p);
                    i += 1;
                }
                (None, Some(&p)) => {
                    out.push(p);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Mono(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if let Some(&(w, f)) = other.0.get(j) {
                if w < v {
                    return None;
                }
                if w == v {
                    if f > e {
                        return None;
                    }
                    if e > f {
                        out.push((v, e - f));
                    }
                    j += 1;
                    continue;
                }
            }
            out.push((v, e));
        }
        if j < other.0.len() {
            return None;
        }
        Some(Mono(out))
    }

    /// Removes symbol `s`, returning its exponent and the rest.
    pub fn split_off(&self, s: u32) -> (u32, Mono) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(v, d)| {
                if *v == s {
                    e = *d;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (e, Mono(rest))
    }
}

impl Ord for Mono {
    // Lexicographic with lower symbol indices more significant.
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(a, ea)), Some(&(b, eb))) => {
                    if a < b {
                        return Ordering::Greater;
                    }
                    if a > b {
                        return Ordering::Less;
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with rational coefficients; the largest monomial is last.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, BigRational>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (v, e) in m.factors() {
                write!(f, "*s{}^{}", v, e)?;
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        Poly { terms }
    }

    pub fn from_int(c: i64) -> Poly {
        Poly::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn var(s: u32) -> Poly {
        Poly::term(Mono::var(s), BigRational::one())
    }

    pub fn term(m: Mono, c: BigRational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Mono::one()))
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Mono::one())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            self.terms.get(&Mono::one()).cloned()
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn symbols(&self) -> BTreeSet<u32> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(v, _)| *v))
            .collect()
    }

    pub fn degree_in(&self, s: u32) -> u32 {
        self.terms.keys().map(|m| m.degree_in(s)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.terms.len() >= other.terms.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Mono, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, d)| (n.mul(m), d * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative with respect to symbol `s`.
    pub fn diff(&self, s: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(s);
            if e > 0 {
                let m2 = rest.mul(&Mono::pow(s, e - 1));
                out.add_term(m2, c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Coefficients with respect to symbol `s`, keyed by degree.
    pub fn coeffs_in(&self, s: u32) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(s);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    pub fn from_coeffs(s: u32, coeffs: &BTreeMap<u32, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (e, p) in coeffs {
            let m = Mono::pow(s, *e);
            for (n, c) in &p.terms {
                out.add_term(n.mul(&m), c.clone());
            }
        }
        out
    }

    /// Leading coefficient with respect to symbol `s`.
    pub fn lead_coeff_in(&self, s: u32) -> Poly {
        let d = self.degree_in(s);
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(s);
            if e == d {
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Exact quotient, or `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        if let Some(c) = other.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        let (lm_b, lc_b) = other.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut q = Poly::zero();
        let mut r = self.clone();
        while let Some((lm_r, lc_r)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let m = lm_r.div(&lm_b)?;
            let c = lc_r / &lc_b;
            r = r.sub(&other.mul_term(&m, &c));
            q.add_term(m, c);
        }
        Some(q)
    }

    /// gcd of numerators over lcm of denominators, signed like the leading coefficient.
    pub fn rational_content(&self) -> BigRational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return BigRational::one();
        }
        let mut content = BigRational::new(num, den);
        if let Some((_, lc)) = self.leading() {
            if lc.is_negative() {
                content = -content;
            }
        }
        content
    }

    /// Integer coefficients without common factor and positive leading coefficient.
    pub fn normalized(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.rational_content().recip())
    }

    /// Pseudo-remainder of `self` by `g` as polynomials in `s`.
    pub fn prem(&self, g: &Poly, s: u32) -> Poly {
        let dg = g.degree_in(s);
        let lcg = g.lead_coeff_in(s);
        let mut r = self.clone();
        while !r.is_zero() {
            let dr = r.degree_in(s);
            if dr < dg {
                break;
            }
            let lcr = r.lead_coeff_in(s);
            let shift = Poly::term(Mono::pow(s, dr - dg), BigRational::one());
            r = r.mul(&lcg).sub(&lcr.mul(&shift).mul(g));
        }
        r
    }

    fn content_in(&self, s: u32) -> Poly {
        let mut g = Poly::zero();
        for c in self.coeffs_in(s).values() {
            g = gcd(&g, c);
            if g.is_constant() {
                return Poly::one();
            }
        }
        g
    }

    /// Substitutes `value` for symbol `s`.
    pub fn subst(&self, s: u32, value: &Poly) -> Poly {
        let mut out = Poly::zero();
        let mut powers: Vec<Poly> = vec![Poly::one()];
        for (e, c) in self.coeffs_in(s) {
            while powers.len() <= e as usize {
                let next = powers.last().unwrap().mul(value);
                powers.push(next);
            }
            out = out.add(&c.mul(&powers[e as usize]));
        }
        out
    }

    /// Evaluates every symbol through `f`.
    pub fn eval(&self, f: &dyn Fn(u32) -> BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.factors() {
                let x = f(*v);
                for _ in 0..*e {
                    t *= &x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Splits into coefficient polynomials over the symbols accepted by `keep`,
    /// indexed by the monomial in the remaining symbols.
    pub fn split_symbols(&self, keep: &dyn Fn(u32) -> bool) -> BTreeMap<Mono, Poly> {
        let mut out: BTreeMap<Mono, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (kept, other): (Vec<_>, Vec<_>) =
                m.factors().iter().cloned().partition(|(v, _)| keep(*v));
            out.entry(Mono(other))
                .or_default()
                .add_term(Mono(kept), c.clone());
        }
        out
    }
}

/// Sets every symbol except `keep` to `val(symbol)`.
fn specialize_except(p: &Poly, keep: u32, val: &dyn Fn(u32) -> BigInt) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in &p.terms {
        let mut c = c.clone();
        let mut e_keep = 0;
        for &(s, e) in m.factors() {
            if s == keep {
                e_keep = e;
            } else {
                c *= BigRational::from_integer(val(s).pow(e));
            }
        }
        out = out.add(&Poly::term(Mono::pow(keep, e_keep), c));
    }
    out
}

/// True if for every symbol `v` some integer specialization of the other
/// symbols keeps both degrees in `v` and leaves coprime images. Then the
/// gcd has degree 0 in every symbol. A `false` answer decides nothing.
fn coprime_by_specialization(a: &Poly, b: &Poly, symbols: &BTreeSet<u32>) -> bool {
    for &v in symbols {
        let (da, db) = (a.degree_in(v), b.degree_in(v));
        let mut decided = false;
        for attempt in 0..3u32 {
            let val = |s: u32| BigInt::from((s.wrapping_mul(7919).wrapping_add(attempt * 104_729)) % 89 + 2);
            let ia = specialize_except(a, v, &val);
            let ib = specialize_except(b, v, &val);
            if ia.degree_in(v) != da || ib.degree_in(v) != db {
                continue;
            }
            if gcd(&ia, &ib).degree_in(v) > 0 {
                return false;
            }
            decided = true;
            break;
        }
        if !decided {
            return false;
        }
    }
    true
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms.values().map(|c| c.numer().abs()).max().unwrap_or_else(BigInt::zero)
}

/// Integer content of a polynomial with integer coefficients.
fn int_content(p: &Poly) -> BigInt {
    p.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c.numer()))
}

/// Heuristic gcd: evaluate one symbol at a large integer, take the gcd of the
/// images and read the candidate back off its `xi`-adic digits. A candidate
/// is only returned once it divides both inputs.
fn heu_gcd(a: &Poly, b: &Poly, v: u32) -> Option<Poly> {
    let a = a.normalized();
    let b = b.normalized();
    let bound = a.degree_in(v).min(b.degree_in(v)) + 1;
    let mut xi: BigInt = max_norm(&a).min(max_norm(&b)) * 2 + 29;
    for _ in 0..6 {
        let at = Poly::constant(BigRational::from_integer(xi.clone()));
        let ea = a.subst(v, &at);
        let eb = b.subst(v, &at);
        if !ea.is_zero() && !eb.is_zero() {
            let image = {
                let c = int_content(&ea).gcd(&int_content(&eb));
                gcd(&ea, &eb).scale(&BigRational::from_integer(c))
            };
            if let Some(h) = xi_adic(&image, &xi, v, bound) {
                let h = h.normalized();
                if h.is_constant() {
                    return Some(Poly::one());
                }
                if a.div_exact(&h).is_some() && b.div_exact(&h).is_some() {
                    return Some(h);
                }
            }
        }
        xi = xi * 73794 / 27011;
    }
    None
}

/// Symmetric `xi`-adic digits of `g` as coefficients of powers of `v`.
fn xi_adic(g: &Poly, xi: &BigInt, v: u32, bound: u32) -> Option<Poly> {
    let half = xi / 2;
    let mut g = g.clone();
    let mut out = Poly::zero();
    let mut i = 0;
    while !g.is_zero() {
        if i >= bound {
            return None;
        }
        let mut digit = Poly::zero();
        for (m, c) in &g.terms {
            let mut r = c.numer().mod_floor(xi);
            if r > half {
                r -= xi;
            }
            digit.add_term(m.clone(), BigRational::from_integer(r));
        }
        let shift = Mono::pow(v, i);
        for (m, c) in &digit.terms {
            out.add_term(m.mul(&shift), c.clone());
        }
        g = g.sub(&digit).scale(&BigRational::new(BigInt::one(), xi.clone()));
        i += 1;
    }
    Some(out)
}

/// Greatest common divisor, normalized; gcd(0, 0) = 0.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.normalized();
    }
    if b.is_zero() {
        return a.normalized();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.normalized();
    }
    let sa = a.symbols();
    let sb = b.symbols();
    if let Some(&v) = sa.iter().find(|v| !sb.contains(v)) {
        return gcd(&a.content_in(v), b);
    }
    if let Some(&v) = sb.iter().find(|v| !sa.contains(v)) {
        return gcd(a, &b.content_in(v));
    }
    // Cheap divisibility checks catch the frequent case of one dividing the other.
    if let Some(_) = a.div_exact(b) {
        return b.normalized();
    }
    if let Some(_) = b.div_exact(a) {
        return a.normalized();
    }
    if sa.len() >= 2 && coprime_by_specialization(a, b, &sa) {
        return Poly::one();
    }
    let v = *sa
        .iter()
        .min_by_key(|v| (a.degree_in(**v).min(b.degree_in(**v)), **v))
        .unwrap();
    if let Some(h) = heu_gcd(a, b, v) {
        return h;
    }
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let c = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let (mut f, mut g) = if pa.degree_in(v) >= pb.degree_in(v) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    loop {
        let r = f.prem(&g, v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(v) == 0 {
            g = Poly::one();
            break;
        }
        f = g;
        let cr = r.content_in(v);
        g = r.div_exact(&cr).expect("content divides").normalized();
    }
    let cg = g.content_in(v);
    let g = g.div_exact(&cg).expect("content divides");
    c.mul(&g).normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(i64, &[(u32, u32)])]) -> Poly {
        let mut out = Poly::zero();
        for (c, m) in terms {
            out = out.add(&Poly::term(
                Mono(m.to_vec()),
                BigRational::from_integer(BigInt::from(*c)),
            ));
        }
        out
    }

    #[test]
    fn lex_is_multiplicative() {
        let a = Mono(vec![(0, 1)]);
        let b = Mono(vec![(1, 1)]);
        assert!(a > b);
        assert!(a.mul(&a) > b.mul(&a));
        assert!(Mono(vec![(0, 2)]) > Mono(vec![(0, 1), (1, 5)]));
    }

    #[test]
    fn exact_division() {
        // (x^2 - 1) / (x - 1) = x + 1
        let num = p(&[(1, &[(0, 2)]), (-1, &[])]);
        let den = p(&[(1, &[(0, 1)]), (-1, &[])]);
        assert_eq!(num.div_exact(&den).unwrap(), p(&[(1, &[(0, 1)]), (1, &[])]));
        assert!(den.div_exact(&num).is_none());
    }

    #[test]
    fn gcd_bivariate() {
        // (x + y)(x - y) and (x + y)^2
        let s = p(&[(1, &[(0, 1)]), (1, &[(1, 1)])]);
        let d = p(&[(1, &[(0, 1)]), (-1, &[(1, 1)])]);
        let g = gcd(&s.mul(&d), &s.mul(&s));
        assert_eq!(g, s.normalized());
        assert!(gcd(&s, &d).is_one());
    }

    #[test]
    fn gcd_with_parameters() {
        // (c x + 1)(x + y) and (c x + 1)(y - c)
        let a = p(&[(1, &[(0, 1), (2, 1)]), (1, &[])]);
        let b = p(&[(1, &[(0, 1)]), (1, &[(1, 1)])]);
        let c = p(&[(1, &[(1, 1)]), (-1, &[(2, 1)])]);
        let g = gcd(&a.mul(&b), &a.mul(&c));
        assert_eq!(g, a.normalized());
    }
}
