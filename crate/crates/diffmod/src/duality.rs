//! Formal duality: injectivity of operators, the double duality test,
//! torsion elements, parametrizations and the modules ext^i(M).
//!
//! A matrix `A` with `p` rows and `m` columns presents the module
//! `M = D^m / D^p A`. Rows are left multiplied, so a relation among rows is a
//! row `y` with `y A = 0`, which is what
//! [`compatibility_conditions`](crate::syzygy::compatibility_conditions)
//! returns.

use crate::coefficients::{RatFunc, Session};
use crate::involution::{complete, InvolutiveBasis};
use crate::ore::{OpMatrix, ScalarOp};
use crate::syzygy::{compatibility_conditions, differential_rank, DiffSequence};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Injectivity {
    Injective,
    /// Injective provided every listed condition is nonzero.
    Conditional,
    NotInjective,
}

#[derive(Clone, Debug)]
pub struct KernelAnalysis {
    pub injective: Injectivity,
    /// Provisos consumed while solving `A λ = 0`.
    pub conditions: Vec<RatFunc>,
    pub basis: InvolutiveBasis,
}

/// Solves the homogeneous system `A λ = 0` and decides whether `λ = 0` is
/// its only solution.
pub fn kernel_analysis(session: &Session, a: &OpMatrix) -> Result<KernelAnalysis, Error> {
    let local = session.fresh();
    let basis = complete(&local, a)?;
    session.absorb(&local);
    let conditions = local.provisos();
    let units = basis
        .rows()
        .iter()
        .filter(|r| r.lead.1.is_one())
        .map(|r| r.lead.0)
        .collect::<std::collections::BTreeSet<_>>();
    let injective = if units.len() < a.cols() {
        Injectivity::NotInjective
    } else if conditions.is_empty() {
        Injectivity::Injective
    } else {
        Injectivity::Conditional
    };
    Ok(KernelAnalysis { injective, conditions, basis })
}

/// Row module of a matrix, with membership tests.
#[derive(Clone, Debug)]
pub struct RowModule {
    pub cols: usize,
    pub generators: OpMatrix,
    basis: Option<InvolutiveBasis>,
}

impl RowModule {
    pub fn new(session: &Session, generators: &OpMatrix) -> Result<RowModule, Error> {
        let basis = if generators.is_zero() { None } else { Some(complete(session, generators)?) };
        Ok(RowModule { cols: generators.cols(), generators: generators.clone(), basis })
    }

    pub fn contains(&self, session: &Session, row: &[ScalarOp]) -> Result<bool, Error> {
        match &self.basis {
            Some(b) => b.reduces_to_zero(session, row),
            None => Ok(row.iter().all(ScalarOp::is_zero)),
        }
    }

    pub fn contains_all(&self, session: &Session, rows: &OpMatrix) -> Result<bool, Error> {
        for i in 0..rows.rows() {
            if !self.contains(session, rows.row(i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn basis(&self) -> Option<&InvolutiveBasis> {
        self.basis.as_ref()
    }
}

/// True iff the row modules of `a` and `b` coincide.
pub fn same_row_module(session: &Session, a: &OpMatrix, b: &OpMatrix) -> Result<bool, Error> {
    Ok(RowModule::new(session, a)?.contains_all(session, b)?
        && RowModule::new(session, b)?.contains_all(session, a)?)
}

#[derive(Clone, Debug)]
pub struct DoubleDuality {
    pub torsion_free: bool,
    /// Operator whose compatibility conditions are `d1_prime`; `None` when
    /// `ad(D1)` has no compatibility conditions.
    pub d: Option<OpMatrix>,
    pub d1_prime: OpMatrix,
    /// Rows of `d1_prime` outside the row module of `D1`; their residues
    /// generate the torsion submodule.
    pub extra: Vec<Vec<ScalarOp>>,
}

/// ad, CC, ad, CC, compare.
pub fn double_duality_test(session: &Session, d1: &OpMatrix) -> Result<DoubleDuality, Error> {
    let field = session.field();
    let m = d1.cols();
    let ad1 = d1.adjoint(field);
    let cc = compatibility_conditions(session, &ad1)?;
    let (d, d1_prime) = if cc.matrix.rows() == 0 {
        (None, OpMatrix::identity(d1.n(), m).with_col_labels(d1.col_labels.clone()))
    } else {
        let d = cc.matrix.adjoint(field).with_col_labels(
            (1..=cc.matrix.rows()).map(|i| format!("phi{i}")).collect(),
        );
        let d = d.with_row_labels(d1.col_labels.clone());
        let back = compatibility_conditions(session, &d)?;
        (Some(d), back.matrix)
    };
    let module = RowModule::new(session, d1)?;
    let mut extra = Vec::new();
    for i in 0..d1_prime.rows() {
        if !module.contains(session, d1_prime.row(i))? {
            extra.push(d1_prime.row(i).to_vec());
        }
    }
    Ok(DoubleDuality { torsion_free: extra.is_empty(), d, d1_prime, extra })
}

/// `annihilator · element = witness · relations`, with `element` itself
/// outside the module of relations.
#[derive(Clone, Debug)]
pub struct TorsionCertificate {
    pub element: Vec<ScalarOp>,
    pub annihilator: ScalarOp,
    pub witness: Vec<ScalarOp>,
}

impl TorsionCertificate {
    /// Replays the identity `P·e − Σ wᵢ·Rᵢ = 0` and checks `e ∉ ⟨R⟩`.
    pub fn verify(&self, session: &Session, relations: &OpMatrix) -> Result<bool, Error> {
        let field = session.field();
        if self.annihilator.is_zero() || self.witness.len() != relations.rows() {
            return Ok(false);
        }
        let mut lhs: Vec<ScalarOp> =
            self.element.iter().map(|e| self.annihilator.mul(field, e)).collect();
        for (w, i) in self.witness.iter().zip(0..relations.rows()) {
            for (j, r) in relations.row(i).iter().enumerate() {
                lhs[j] = lhs[j].sub(&w.mul(field, r));
            }
        }
        if !lhs.iter().all(ScalarOp::is_zero) {
            return Ok(false);
        }
        Ok(!RowModule::new(session, relations)?.contains(session, &self.element)?)
    }
}

/// Looks for a nonzero operator killing the residue of `element` modulo the
/// rows of `relations`. Returns `None` if the residue is zero or not torsion.
pub fn torsion_certificate(
    session: &Session,
    relations: &OpMatrix,
    element: &[ScalarOp],
) -> Result<Option<TorsionCertificate>, Error> {
    let n = relations.n();
    if RowModule::new(session, relations)?.contains(session, element)? {
        return Ok(None);
    }
    let mut stacked = OpMatrix::from_rows(n, relations.cols(), vec![element.to_vec()]);
    stacked = stacked.stack(relations)?;
    let cc = compatibility_conditions(session, &stacked)?;
    let mut best: Option<Vec<ScalarOp>> = None;
    let candidates = match &cc.basis {
        Some(b) => {
            let mut rows = cc.matrix.row_vec();
            rows.extend(b.rows().into_iter().map(|r| r.op));
            rows
        }
        None => Vec::new(),
    };
    for row in candidates {
        if row[0].is_zero() {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => row[0].order() < b[0].order() || (row[0].order() == b[0].order() && row[0].terms().len() < b[0].terms().len()),
        };
        if better {
            best = Some(row);
        }
    }
    let Some(row) = best else { return Ok(None) };
    let lead = row[0]
        .terms()
        .iter()
        .max_by_key(|(mu, _)| (mu.order(), (*mu).clone()))
        .map(|(_, c)| c.clone())
        .unwrap();
    let scale = session.invert(&lead)?;
    let row: Vec<ScalarOp> = row.iter().map(|p| p.scale_left(&scale)).collect();
    Ok(Some(TorsionCertificate {
        element: element.to_vec(),
        annihilator: row[0].clone(),
        witness: row[1..].iter().map(ScalarOp::neg).collect(),
    }))
}

/// Generators of the torsion submodule of `D^m / D^p A`, each with its
/// annihilator.
pub fn torsion_submodule(session: &Session, presentation: &OpMatrix) -> Result<Vec<TorsionCertificate>, Error> {
    let test = double_duality_test(session, presentation)?;
    let mut out = Vec::new();
    for e in &test.extra {
        if let Some(c) = torsion_certificate(session, presentation, e)? {
            out.push(c);
        }
    }
    Ok(out)
}

/// `ker / im` at one place of the adjoint of a resolution.
#[derive(Clone, Debug)]
pub struct ExtReport {
    pub index: usize,
    /// Generators of the kernel, rows over `F_i`.
    pub kernel: OpMatrix,
    /// Rows of `ad(D_{i-1})`, the image.
    pub image: OpMatrix,
    /// Kernel generators whose residues generate the quotient.
    pub generators: Vec<Vec<ScalarOp>>,
    pub vanishing: bool,
    pub torsion: Vec<TorsionCertificate>,
    pub provisos: Vec<RatFunc>,
    /// Human-readable description of the case branch, e.g. `c = 0`.
    pub case: String,
}

impl ExtReport {
    /// True iff the residues of `rows` generate the quotient.
    pub fn is_generated_by(&self, session: &Session, rows: &[Vec<ScalarOp>]) -> Result<bool, Error> {
        let n = self.kernel.n();
        let mut all = self.image.clone();
        for r in rows {
            all.push_row(r.clone(), None);
        }
        let module = RowModule::new(session, &OpMatrix::from_rows(n, self.kernel.cols(), all.row_vec()))?;
        module.contains_all(session, &self.kernel)
    }

    /// True iff `row` lies in the kernel but not in the image.
    pub fn is_nonzero_class(&self, session: &Session, row: &[ScalarOp]) -> Result<bool, Error> {
        let ker = RowModule::new(session, &self.kernel)?;
        let im = RowModule::new(session, &self.image)?;
        Ok(ker.contains(session, row)? && !im.contains(session, row)?)
    }
}

/// ext^i of the module presented by `seq.ops[0]`, from the adjoint of the
/// given resolution. Indices past the end of the resolution give zero.
pub fn ext_module(session: &Session, seq: &DiffSequence, i: usize, case: &str) -> Result<ExtReport, Error> {
    let field = session.field();
    let local = session.fresh();
    let k = seq.ops.len();
    let n = seq.ops[0].n();
    let dims = seq.ranks();
    if i > k {
        let z = OpMatrix::zero(n, 0, 0);
        return Ok(ExtReport {
            index: i,
            kernel: z.clone(),
            image: z,
            generators: vec![],
            vanishing: true,
            torsion: vec![],
            provisos: vec![],
            case: case.into(),
        });
    }
    let fi = dims[i];
    let kernel = if i < k {
        compatibility_conditions(&local, &seq.ops[i].adjoint(field))?.matrix
    } else {
        OpMatrix::identity(n, fi)
    };
    let image = if i == 0 {
        OpMatrix::zero(n, 0, fi)
    } else {
        seq.ops[i - 1].adjoint(field)
    };
    let mut span = image.clone();
    let mut generators = Vec::new();
    let mut module = RowModule::new(&local, &span)?;
    let mut order: Vec<usize> = (0..kernel.rows()).collect();
    order.sort_by_key(|&r| kernel.row_order(r));
    for r in order {
        let row = kernel.row(r);
        if !module.contains(&local, row)? {
            generators.push(row.to_vec());
            span.push_row(row.to_vec(), None);
            module = RowModule::new(&local, &span)?;
        }
    }
    let mut torsion = Vec::new();
    for g in &generators {
        if let Some(c) = torsion_certificate(&local, &image, g)? {
            torsion.push(c);
        }
    }
    session.absorb(&local);
    Ok(ExtReport {
        index: i,
        vanishing: generators.is_empty(),
        kernel,
        image,
        generators,
        torsion,
        provisos: local.provisos(),
        case: case.into(),
    })
}

#[derive(Clone, Debug)]
pub struct ParametrizationResult {
    /// Parametrizing operator; its compatibility conditions generate the
    /// same module as `D1`.
    pub d: OpMatrix,
    pub d1_prime: OpMatrix,
    /// Every row of `D1` lies in the module of `d1_prime`.
    pub forward: bool,
    /// Every row of `d1_prime` lies in the module of `D1`.
    pub backward: bool,
    /// rk_D(M): the number of potentials a minimal parametrization needs.
    pub minimal_rank_bound: usize,
}

/// Parametrizes the solutions of `D1 η = 0` when `coker(D1)` is torsion-free.
pub fn parametrize(session: &Session, d1: &OpMatrix) -> Result<ParametrizationResult, Error> {
    let test = double_duality_test(session, d1)?;
    if !test.torsion_free {
        return Err(Error::NotParametrizable(test.extra.len()));
    }
    let n = d1.n();
    let m = d1.cols();
    let d = test.d.clone().unwrap_or_else(|| OpMatrix::zero(n, m, 0));
    let forward = RowModule::new(session, &test.d1_prime)?.contains_all(session, d1)?;
    let rank = differential_rank(session, d1)?;
    Ok(ParametrizationResult {
        d,
        d1_prime: test.d1_prime,
        forward,
        backward: true,
        minimal_rank_bound: m - rank,
    })
}
