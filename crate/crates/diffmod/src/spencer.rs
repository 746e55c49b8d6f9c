//! Symbols of linear systems, their prolongations and Spencer δ-cohomology.
//!
//! An element of `S_t T* ⊗ E` is stored by its jet coordinates `v^k_μ`,
//! `|μ| = t`. The symbol `g_q ⊂ S_q T* ⊗ E` is cut out by linear equations
//! with rational coefficients, evaluated at a point; `g_{q+r}` consists of the
//! `v` all of whose `r`-th derivatives lie in `g_q`. Below the order every
//! level is the full space.
//!
//! ```
//! use diffmod::spencer::SymbolSpace;
//! let g = SymbolSpace::killing(4);
//! assert_eq!(g.dim(), 6);
//! assert_eq!(g.level_dim(2), 0);
//! assert_eq!(g.cohomology_dim(2, 0), 20);
//! ```

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::involution::monomials_of_order;
use crate::ore::DMono;
use crate::Error;

type SparseRow = BTreeMap<usize, BigRational>;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// Incremental row echelon form for exact rank computations.
#[derive(Default)]
struct Echelon {
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    /// Reduces `row` and keeps it if independent. Returns true if kept.
    fn insert(&mut self, mut row: SparseRow) -> bool {
        loop {
            let Some((&col, _)) = row.iter().next() else { return false };
            match self.pivots.get(&col) {
                Some(p) => {
                    let c = row[&col].clone();
                    for (j, a) in p {
                        let e = row.entry(*j).or_insert_with(BigRational::zero);
                        *e -= &c * a;
                        if e.is_zero() {
                            row.remove(j);
                        }
                    }
                }
                None => {
                    let inv = row[&col].recip();
                    for a in row.values_mut() {
                        *a *= &inv;
                    }
                    self.pivots.insert(col, row);
                    return true;
                }
            }
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }
}

fn rank(rows: impl IntoIterator<Item = SparseRow>) -> usize {
    let mut e = Echelon::default();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Basis of `{v : row·v = 0 for every row}` in `ncols` coordinates.
fn nullspace(rows: &[SparseRow], ncols: usize) -> Vec<SparseRow> {
    let mut e = Echelon::default();
    for r in rows {
        e.insert(r.clone());
    }
    // Back-substitute to reduced form.
    let cols: Vec<usize> = e.pivots.keys().rev().copied().collect();
    for &c in &cols {
        let pivot_row = e.pivots[&c].clone();
        for (&other, row) in e.pivots.iter_mut() {
            if other == c {
                continue;
            }
            if let Some(f) = row.get(&c).cloned() {
                for (j, a) in &pivot_row {
                    let x = row.entry(*j).or_insert_with(BigRational::zero);
                    *x -= &f * a;
                    if x.is_zero() {
                        row.remove(j);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !e.pivots.contains_key(c)) {
        let mut v = SparseRow::new();
        v.insert(free, BigRational::one());
        for (&c, row) in &e.pivots {
            if let Some(a) = row.get(&free) {
                v.insert(c, -a.clone());
            }
        }
        out.push(v);
    }
    out
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Increasing index sets of size `s` drawn from `0..n`.
fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, s, &mut Vec::new(), &mut out);
    out
}

/// Coordinates `(k, μ)` of `S_t T* ⊗ E`, unknown-major.
struct Coords {
    list: Vec<(usize, DMono)>,
    index: HashMap<(usize, DMono), usize>,
}

impl Coords {
    fn new(n: usize, m: usize, t: u32) -> Coords {
        let monos = monomials_of_order(n, t);
        let mut list = Vec::new();
        for k in 0..m {
            for mu in &monos {
                list.push((k, mu.clone()));
            }
        }
        let index = list.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        Coords { list, index }
    }

    fn len(&self) -> usize {
        self.list.len()
    }
}

type Level = Arc<(Coords, Vec<SparseRow>)>;

#[derive(Default)]
struct Cache {
    levels: HashMap<u32, Level>,
    deltas: HashMap<(usize, u32), usize>,
}

/// A symbol `g_q ⊂ S_q T* ⊗ E` given by linear equations.
pub struct SymbolSpace {
    pub n: usize,
    pub m: usize,
    pub q: u32,
    /// Each equation maps a coordinate `(k, μ)` of `S_q T* ⊗ E` to its coefficient.
    pub equations: Vec<BTreeMap<(usize, DMono), BigRational>>,
    cache: Mutex<Cache>,
}

impl Clone for SymbolSpace {
    fn clone(&self) -> Self {
        SymbolSpace::new(self.n, self.m, self.q, self.equations.clone())
    }
}

impl std::fmt::Debug for SymbolSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymbolSpace")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("q", &self.q)
            .field("equations", &self.equations.len())
            .finish()
    }
}

impl SymbolSpace {
    pub fn new(n: usize, m: usize, q: u32, equations: Vec<BTreeMap<(usize, DMono), BigRational>>) -> SymbolSpace {
        SymbolSpace { n, m, q, equations, cache: Mutex::default() }
    }

    /// The zero symbol: every coordinate vanishes.
    pub fn zero(n: usize, m: usize, q: u32) -> SymbolSpace {
        let c = Coords::new(n, m, q);
        let equations = c
            .list
            .into_iter()
            .map(|k| BTreeMap::from([(k, BigRational::one())]))
            .collect();
        SymbolSpace::new(n, m, q, equations)
    }

    /// `ω_rj ξ^r_i + ω_ir ξ^r_j - λ ω_ij ξ^r_r = 0` for `i ≤ j`.
    fn metric_symbol(omega: &[Vec<BigRational>], trace: BigRational) -> SymbolSpace {
        let n = omega.len();
        let d = |i: usize| DMono::var(n, i);
        let mut equations = Vec::new();
        for i in 0..n {
            for j in i..n {
                let mut eq: BTreeMap<(usize, DMono), BigRational> = BTreeMap::new();
                let mut add = |k: usize, mu: DMono, a: BigRational| {
                    let e = eq.entry((k, mu)).or_insert_with(BigRational::zero);
                    *e += a;
                };
                for r in 0..n {
                    add(r, d(i), omega[r][j].clone());
                    add(r, d(j), omega[i][r].clone());
                    if !trace.is_zero() {
                        add(r, d(r), -(&trace * &omega[i][j]));
                    }
                }
                eq.retain(|_, a| !a.is_zero());
                equations.push(eq);
            }
        }
        SymbolSpace::new(n, n, 1, equations)
    }

    fn euclidean(n: usize) -> Vec<Vec<BigRational>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect()
    }

    /// Symbol of the Killing operator of a nondegenerate metric.
    pub fn killing_with_metric(omega: &[Vec<BigRational>]) -> SymbolSpace {
        SymbolSpace::metric_symbol(omega, BigRational::zero())
    }

    pub fn killing(n: usize) -> SymbolSpace {
        SymbolSpace::killing_with_metric(&SymbolSpace::euclidean(n))
    }

    /// Symbol of the conformal Killing operator; the trace term carries the
    /// factor `2/n`.
    pub fn conformal_with_metric(omega: &[Vec<BigRational>]) -> SymbolSpace {
        let n = omega.len() as i64;
        SymbolSpace::metric_symbol(omega, q(2, n))
    }

    pub fn conformal(n: usize) -> SymbolSpace {
        SymbolSpace::conformal_with_metric(&SymbolSpace::euclidean(n))
    }

    /// Symbol of `ω_r ξ^r_i - ½ ω_i ξ^r_r = 0` at a point where the contact
    /// density is `ω = dx¹`. Only `n = 3` is supported.
    pub fn contact(n: usize) -> Result<SymbolSpace, Error> {
        if n != 3 {
            return Err(Error::UnsupportedDimension(format!(
                "contact symbol is implemented for n = 3, got n = {n}"
            )));
        }
        let d = |i: usize| DMono::var(n, i);
        let mut equations = Vec::new();
        for i in 0..n {
            let mut eq = BTreeMap::new();
            eq.insert((0, d(i)), BigRational::one());
            if i == 0 {
                for r in 0..n {
                    let e = eq.entry((r, d(r))).or_insert_with(BigRational::zero);
                    *e -= q(1, 2);
                }
            }
            eq.retain(|_, a: &mut BigRational| !a.is_zero());
            equations.push(eq);
        }
        Ok(SymbolSpace::new(n, n, 1, equations))
    }

    /// Equations of `g_{q+r}` in the coordinates of `S_{q+r} T* ⊗ E`.
    fn prolonged_equations(&self, r: u32) -> Vec<BTreeMap<(usize, DMono), BigRational>> {
        let mut out = Vec::new();
        for nu in monomials_of_order(self.n, r) {
            for eq in &self.equations {
                out.push(eq.iter().map(|((k, mu), a)| ((*k, mu.mul(&nu)), a.clone())).collect());
            }
        }
        out
    }

    pub fn prolong(&self, r: u32) -> SymbolSpace {
        SymbolSpace::new(self.n, self.m, self.q + r, self.prolonged_equations(r))
    }

    /// Basis of `g_t`, with `g_t = S_t T* ⊗ E` for `t < q`.
    fn level_basis(&self, t: u32) -> Level {
        if let Some(l) = self.cache.lock().unwrap().levels.get(&t) {
            return l.clone();
        }
        let l = Arc::new(self.compute_level(t));
        self.cache.lock().unwrap().levels.insert(t, l.clone());
        l
    }

    fn compute_level(&self, t: u32) -> (Coords, Vec<SparseRow>) {
        let c = Coords::new(self.n, self.m, t);
        if t < self.q {
            let basis = (0..c.len()).map(|i| BTreeMap::from([(i, BigRational::one())])).collect();
            return (c, basis);
        }
        let rows: Vec<SparseRow> = self
            .prolonged_equations(t - self.q)
            .into_iter()
            .map(|eq| eq.into_iter().map(|(key, a)| (c.index[&key], a)).collect())
            .collect();
        let basis = nullspace(&rows, c.len());
        (c, basis)
    }

    /// `dim g_q`.
    pub fn dim(&self) -> usize {
        self.level_dim(self.q)
    }

    /// `dim g_t`.
    pub fn level_dim(&self, t: u32) -> usize {
        self.level_basis(t).1.len()
    }

    /// Rank of `δ : ∧^s T* ⊗ g_t → ∧^{s+1} T* ⊗ S_{t-1} T* ⊗ E`.
    fn delta_rank(&self, s: usize, t: u32) -> usize {
        if t == 0 || s >= self.n {
            return 0;
        }
        if let Some(&r) = self.cache.lock().unwrap().deltas.get(&(s, t)) {
            return r;
        }
        let r = self.compute_delta_rank(s, t);
        self.cache.lock().unwrap().deltas.insert((s, t), r);
        r
    }

    fn compute_delta_rank(&self, s: usize, t: u32) -> usize {
        let level = self.level_basis(t);
        let (src, basis) = (&level.0, &level.1);
        if basis.is_empty() {
            return 0;
        }
        let tgt = Coords::new(self.n, self.m, t - 1);
        let forms_out = subsets(self.n, s + 1);
        let form_index: HashMap<Vec<usize>, usize> =
            forms_out.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        let width = tgt.len();
        let mut images = Vec::new();
        for form in subsets(self.n, s) {
            for v in basis {
                let mut img = SparseRow::new();
                for i in (0..self.n).filter(|i| !form.contains(i)) {
                    // dx^i ∧ dx^I, sorted with its sign.
                    let pos = form.iter().filter(|&&j| j < i).count();
                    let sign = if pos % 2 == 0 { BigRational::one() } else { -BigRational::one() };
                    let mut j_set = form.clone();
                    j_set.insert(pos, i);
                    let base = form_index[&j_set] * width;
                    for (&ci, a) in v {
                        let (k, mu) = &src.list[ci];
                        if mu.0[i] == 0 {
                            continue;
                        }
                        let mut lam = mu.clone();
                        lam.0[i] -= 1;
                        let col = base + tgt.index[&(*k, lam)];
                        let e = img.entry(col).or_insert_with(BigRational::zero);
                        *e += &sign * a;
                        if e.is_zero() {
                            img.remove(&col);
                        }
                    }
                }
                images.push(img);
            }
        }
        rank(images)
    }

    /// `dim H^s(g_t)` at `∧^s T* ⊗ g_t`.
    pub fn cohomology_at(&self, s: usize, t: u32) -> usize {
        if s > self.n {
            return 0;
        }
        let ambient = binom(self.n, s) * self.level_dim(t);
        let incoming = if s == 0 { 0 } else { self.delta_rank(s - 1, t + 1) };
        ambient - self.delta_rank(s, t) - incoming
    }

    /// `dim H^s(g_{q+r})`.
    pub fn cohomology_dim(&self, s: usize, r: u32) -> usize {
        self.cohomology_at(s, self.q + r)
    }

    /// `dim Z^s(g_t)`, the kernel of δ on `∧^s T* ⊗ g_t`.
    pub fn cocycle_dim(&self, s: usize, t: u32) -> usize {
        binom(self.n, s) * self.level_dim(t) - self.delta_rank(s, t)
    }

    /// Smallest level `t ≥ q` with `g_t = 0`, searched up to `q + n + 1`.
    pub fn vanishing_level(&self) -> Option<u32> {
        (self.q..=self.q + self.n as u32 + 1).find(|&t| self.level_dim(t) == 0)
    }

    /// True iff `H^s(g_{q+r}) = 0` for `1 ≤ s ≤ k` and every `r` up to the
    /// vanishing level (or `n + 1` prolongations for infinite type).
    pub fn is_acyclic(&self, k: usize) -> bool {
        let top = self.vanishing_level().unwrap_or(self.q + self.n as u32 + 1);
        (self.q..=top).all(|t| (1..=k.min(self.n)).all(|s| self.cohomology_at(s, t) == 0))
    }
}

/// δ-sequence of the full spaces `∧^s T* ⊗ S_t T*`, used by the scalar rows
/// of the diagrams below.
fn full_delta_rank(n: usize, s: usize, t: u32) -> usize {
    SymbolSpace::new(n, 1, t + 1, vec![]).delta_rank(s, t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Killing,
    Conformal,
    Contact,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family, Error> {
        match s {
            "killing" => Ok(Family::Killing),
            "conformal" => Ok(Family::Conformal),
            "contact" => Ok(Family::Contact),
            other => Err(Error::UnsupportedDimension(format!("unknown family `{other}`"))),
        }
    }
}

/// Bundle dimensions and operator orders of a Janet-type sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalTable {
    pub family: Family,
    pub n: usize,
    /// `dim E, dim F_0, dim F_1, …`
    pub dims: Vec<usize>,
    /// Order of each operator, starting with `E → F_0`.
    pub orders: Vec<u32>,
}

pub fn family_symbol(family: Family, n: usize) -> Result<SymbolSpace, Error> {
    match family {
        Family::Killing if n >= 2 => Ok(SymbolSpace::killing(n)),
        Family::Conformal if n >= 3 => Ok(SymbolSpace::conformal(n)),
        Family::Contact => SymbolSpace::contact(n),
        _ => Err(Error::UnsupportedDimension(format!("{family:?} needs a larger n, got {n}"))),
    }
}

/// Janet sequence dimensions from `F_r = ⊕_t H^{r+1}(g_t)`. Assumes the
/// system is formally integrable, as for flat metrics.
pub fn classical_dims(family: Family, n: usize) -> Result<ClassicalTable, Error> {
    let g = family_symbol(family, n)?;
    let top = g.vanishing_level().unwrap_or(g.q + n as u32);
    let mut dims = vec![g.m];
    let mut levels: Vec<(u32, u32)> = Vec::new();
    for r in 0..n {
        let mut total = 0;
        let mut lo = u32::MAX;
        let mut hi = 0;
        for t in 0..=top {
            let h = g.cohomology_at(r + 1, t);
            if h > 0 {
                total += h;
                lo = lo.min(t);
                hi = hi.max(t);
            }
        }
        if total == 0 {
            break;
        }
        dims.push(total);
        levels.push((lo, hi));
    }
    let mut orders = Vec::new();
    for (r, &(_, hi)) in levels.iter().enumerate() {
        if r == 0 {
            orders.push(hi + 1);
        } else {
            orders.push(hi - levels[r - 1].0 + 1);
        }
    }
    Ok(ClassicalTable { family, n, dims, orders })
}

/// `n!/((r+2)!(n-r-2)!)`.
pub fn contact_bundle_dim(n: usize, r: usize) -> usize {
    binom(n, r + 2)
}

/// Fiber dimensions in the diagram relating the Killing and conformal
/// symbols at `∧³T*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalDiagram {
    /// `dim Z³(g₁)` for the Killing symbol.
    pub z3_killing: usize,
    /// `dim Z³(ĝ₁)`.
    pub z3_conformal: usize,
    /// `dim H³(ĝ₁)`.
    pub h3_conformal: usize,
    /// `dim ∧²T* ⊗ ĝ₂`.
    pub wedge2_g2: usize,
    /// `dim ∧²T* ⊗ T*`.
    pub wedge2_t: usize,
    /// Rank of `δ : T* ⊗ S₂T* → ∧²T* ⊗ T*`.
    pub delta_s2: usize,
    /// `dim ∧³T*`.
    pub wedge3: usize,
}

pub fn conformal_diagram(n: usize) -> Result<ConformalDiagram, Error> {
    if n < 3 {
        return Err(Error::UnsupportedDimension(format!("conformal diagram needs n ≥ 3, got {n}")));
    }
    let k = SymbolSpace::killing(n);
    let c = SymbolSpace::conformal(n);
    Ok(ConformalDiagram {
        z3_killing: k.cocycle_dim(3, 1),
        z3_conformal: c.cocycle_dim(3, 1),
        h3_conformal: c.cohomology_at(3, 1),
        wedge2_g2: binom(n, 2) * c.level_dim(2),
        wedge2_t: binom(n, 2) * n,
        delta_s2: full_delta_rank(n, 1, 2),
        wedge3: binom(n, 3),
    })
}

/// `(dim Z³(g₁), dim L)` where `L` is the space of tensors `L_{ij,k}`
/// skew in `ij` with vanishing cyclic sum. They agree only for `n = 4`.
pub fn lanczos_comparison(n: usize) -> (usize, usize) {
    let z3 = SymbolSpace::killing(n).cocycle_dim(3, 1);
    let pairs = subsets(n, 2);
    let width = pairs.len() * n;
    let idx = |i: usize, j: usize, k: usize| -> (usize, BigRational) {
        let (a, b, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
        let p = pairs.iter().position(|x| x == &vec![a, b]).unwrap();
        (p * n + k, q(s, 1))
    };
    let mut rows = Vec::new();
    for t in subsets(n, 3) {
        let (i, j, k) = (t[0], t[1], t[2]);
        let mut row = SparseRow::new();
        for (c, a) in [idx(i, j, k), idx(j, k, i), idx(k, i, j)] {
            *row.entry(c).or_insert_with(BigRational::zero) += a;
        }
        rows.push(row);
    }
    (z3, width - rank(rows))
}
