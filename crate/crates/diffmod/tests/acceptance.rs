//! Acceptance run: one PASS/FAIL line per criterion, exact comparisons only.
//!
//! `cargo test -p diffmod --test acceptance -- --nocapture` shows the lines.

mod support;

use std::path::PathBuf;

use diffmod::coefficients::RatFunc;
use diffmod::dsl::{all_cases, case_label, elaborate, parse_system, translate_matrix, System, SystemDecl};
use diffmod::duality::{
    ext_module, kernel_analysis, parametrize, same_row_module, torsion_certificate, RowModule,
};
use diffmod::involution::complete;
use diffmod::ore::{OpMatrix, ScalarOp};
use diffmod::spencer::{
    classical_dims, conformal_diagram, contact_bundle_dim, family_symbol, Family, SymbolSpace,
};
use diffmod::syzygy::{alternating_rank_sum, build_sequence, compatibility_conditions, differential_rank, DiffSequence};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Res<T> = Result<T, diffmod::Error>;

/// Criteria that cannot pass as literally stated, with the sub-check that fails.
const UNATTAINABLE: &[(u32, &str)] = &[(10, "killing H3 for n=2..5 is 0, 3, 20, 50")];

struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Criterion {
        Criterion { id, title, checks: Vec::new() }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), ok));
    }

    fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, ok)| !ok).map(|(w, _)| w.as_str()).collect()
    }
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn source(stem: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(format!("{stem}.dms"))).unwrap()
}

fn splits(ast: &SystemDecl) -> Vec<String> {
    ast.splits.iter().map(|i| i.name.clone()).collect()
}

/// The system in `stem.dms` for the branch labelled `case`.
fn system(stem: &str, case: &str) -> System {
    let ast = parse_system(&source(stem)).unwrap();
    let case = all_cases(&splits(&ast))
        .into_iter()
        .find(|c| case_label(c) == case)
        .unwrap_or_else(|| panic!("{stem} has no case {case}"));
    elaborate(&ast, &case).unwrap()
}

/// Rows written in the DSL over the unknowns `cols`, with the declarations of
/// `sys` (variables, parameters, functions, relations), in the field of `sys`.
fn rows(sys: &System, stem: &str, cols: &str, equations: &str) -> OpMatrix {
    let keep = ["vars", "params", "funcs", "assume", "rel", "split"];
    let mut text: String = source(stem)
        .lines()
        .filter(|l| keep.iter().any(|k| l.trim_start().starts_with(k)))
        .map(|l| format!("{l}\n"))
        .collect();
    text.push_str(&format!("unknowns {cols};\n{equations}\n"));
    let ast = parse_system(&text).unwrap();
    let parsed = elaborate(&ast, &sys.case).unwrap();
    translate_matrix(&parsed.matrix, parsed.field(), sys.field()).unwrap()
}

fn op(sys: &System, stem: &str, text: &str) -> ScalarOp {
    rows(sys, stem, "w", &format!("R: {text} = r;")).entry(0, 0).clone()
}

/// `a = λ b` for a nonzero rational number `λ`.
fn proportional(a: &[ScalarOp], b: &[ScalarOp]) -> bool {
    let Some((j, p)) = b.iter().enumerate().find(|(_, p)| !p.is_zero()) else {
        return a.iter().all(ScalarOp::is_zero);
    };
    let (mu, c) = p.terms().iter().next().unwrap();
    let Some(num) = a[j].get(mu) else { return false };
    let lambda = num.div(c).unwrap();
    if !lambda.is_constant() {
        return false;
    }
    a.iter().zip(b).all(|(x, y)| *x == y.scale_left(&lambda))
}

fn row_is_zero(r: &[ScalarOp]) -> bool {
    r.iter().all(ScalarOp::is_zero)
}

fn sequence(sys: &System) -> Res<DiffSequence> {
    build_sequence(&sys.session, &sys.matrix, sys.matrix.n() + 1)
}

fn ext_vanishing(sys: &System, seq: &DiffSequence, i: usize) -> Res<bool> {
    Ok(ext_module(&sys.session, seq, i, "")?.vanishing)
}

fn hand_sequence(ops: Vec<OpMatrix>) -> DiffSequence {
    DiffSequence {
        orders: ops.iter().map(|o| o.order().unwrap_or(0)).collect(),
        certificates: vec![],
        ops,
        formally_exact: true,
        strictly_exact: false,
        involutive: false,
        truncated: false,
    }
}

fn criterion_1() -> Res<Criterion> {
    let mut c = Criterion::new(1, "ex1_6 orders, commutator, dependency, completion");
    let sys = system("ex1_6", "generic");
    let k = sys.field();
    let s = &sys.session;
    let seq = sequence(&sys)?;
    c.check("orders 3, 6, 3", seq.orders == [3, 6, 3]);

    let p = sys.matrix.entry(0, 0).clone();
    let q = sys.matrix.entry(1, 0).clone();
    let one = ScalarOp::one(2);
    c.check("QP - PQ = 1", q.mul(k, &p).sub(&p.mul(k, &q)) == one);

    let a = vec![p.mul(k, &q).sub(&one), p.mul(k, &p).neg()];
    let b = vec![q.mul(k, &q), q.mul(k, &p).add(&one).neg()];
    let rel: Vec<ScalarOp> = (0..2).map(|j| q.mul(k, &a[j]).sub(&p.mul(k, &b[j]))).collect();
    c.check("QA - PB = 0", row_is_zero(&rel));
    let ab = OpMatrix::from_rows(2, 2, vec![a, b]);
    c.check("A, B annihilate the operator", ab.compose(k, &sys.matrix)?.is_zero());
    let cc = compatibility_conditions(s, &sys.matrix)?;
    c.check("A, B generate the conditions", same_row_module(s, &ab, &cc.matrix)?);

    let basis = complete(s, &sys.matrix)?;
    let rows = basis.rows();
    c.check("basis {y}", rows.len() == 1 && rows[0].op == [one]);
    c.check("no parametric derivatives", basis.count_parametric().dim == Some(0));
    Ok(c)
}

fn criterion_2() -> Res<Criterion> {
    let mut c = Criterion::new(2, "ex1_7 conditions, their dependency, solution dimension");
    let sys = system("ex1_7", "generic");
    let k = sys.field();
    let s = &sys.session;
    let cc = compatibility_conditions(s, &sys.matrix)?;
    let a = rows(&sys, "ex1_7", "u, v", "A: d233(v) - x2*d112(v) - 3*d11(v) - d222(u) = a;");
    // B with w = (d33 v - x2 d11 v - d22 u)/2 substituted.
    let w = rows(&sys, "ex1_7", "u, v", "W: (d33(v) - x2*d11(v) - d22(u))/2 = w;");
    let l = op(&sys, "ex1_7", "d3333(w) - 2*x2*d1133(w) + x2^2*d1111(w)");
    let tail = rows(&sys, "ex1_7", "u, v", "T: -d11233(u) + x2*d11112(u) - d1111(u) = t;");
    let b: Vec<ScalarOp> = (0..2).map(|j| l.mul(k, w.entry(0, j)).add(tail.entry(0, j))).collect();

    c.check("two conditions", cc.matrix.rows() == 2);
    if cc.matrix.rows() == 2 {
        c.check("orders 3 and 6", cc.matrix.row_order(0) == Some(3) && cc.matrix.row_order(1) == Some(6));
        c.check("first row is A", proportional(cc.matrix.row(0), a.row(0)));
        c.check("second row is B", proportional(cc.matrix.row(1), &b));
    }
    let d2 = op(&sys, "ex1_7", "d2(w)");
    let dep: Vec<ScalarOp> = (0..2)
        .map(|j| l.mul(k, a.entry(0, j)).sub(&d2.mul(k, &b[j]).scale_left(&RatFunc::from_int(2))))
        .collect();
    c.check("dependency of A and B", row_is_zero(&dep));
    let basis = complete(s, &sys.matrix)?;
    c.check("solution space of dimension 12", basis.count_parametric().dim == Some(12));
    Ok(c)
}

fn criterion_3() -> Res<Criterion> {
    let mut c = Criterion::new(3, "ex1_8 single condition, reconstruction, ext of both resolutions");
    let sys = system("ex1_8", "generic");
    let k = sys.field();
    let s = &sys.session;
    let cc = compatibility_conditions(s, &sys.matrix)?;
    let given = rows(
        &sys,
        "ex1_8",
        "u, v",
        "C: d12(u) - u - d22(v) = c;\n\
         A: d1122(u) - d1222(v) - d22(v) - u = a;\n\
         B: d1112(u) - d11(u) - d1122(v) = b;",
    );
    let (cr, ar, br) = (given.row(0), given.row(1), given.row(2));
    c.check("exactly one condition", cc.matrix.rows() == 1);
    c.check("the condition is C", cc.matrix.rows() == 1 && proportional(cc.matrix.row(0), cr));

    let d = |t: &str| op(&sys, "ex1_8", t);
    let combo = |ops: &[(ScalarOp, &[ScalarOp])]| -> Vec<ScalarOp> {
        (0..2)
            .map(|j| ops.iter().fold(ScalarOp::zero(), |acc, (p, r)| acc.add(&p.mul(k, &r[j]))))
            .collect()
    };
    let minus = |r: &[ScalarOp]| -> Vec<ScalarOp> { r.iter().map(ScalarOp::neg).collect() };
    let a_rec = combo(&[(d("d12(w) + w"), cr), (ScalarOp::one(2), &minus(ar))]);
    let b_rec = combo(&[(d("d11(w)"), cr), (ScalarOp::one(2), &minus(br))]);
    let c_rec = combo(&[(d("d22(w)"), br), (d("-d12(w) + w"), ar), (ScalarOp::one(2), &minus(cr))]);
    c.check("A = d12 C + C", row_is_zero(&a_rec));
    c.check("B = d11 C", row_is_zero(&b_rec));
    c.check("C = d22 B - d12 A + A", row_is_zero(&c_rec));
    let c_mod = complete(s, &given.select_rows(&[0]))?;
    let ab_mod = complete(s, &given.select_rows(&[1, 2]))?;
    c.check(
        "A, B reduce to zero modulo C",
        c_mod.reduces_to_zero(s, ar)? && c_mod.reduces_to_zero(s, br)?,
    );
    c.check("C reduces to zero modulo A, B", ab_mod.reduces_to_zero(s, cr)?);

    let d2 = rows(&sys, "ex1_8", "A, B", "R: d11(A) - d12(B) - B = r;");
    let ab = given.select_rows(&[1, 2]);
    c.check("relation between A and B", d2.compose(k, &ab)?.is_zero());
    let long = hand_sequence(vec![sys.matrix.clone(), ab, d2]);
    let short = hand_sequence(vec![sys.matrix.clone(), given.select_rows(&[0])]);
    let mut same = true;
    for i in 0..=3 {
        same &= ext_vanishing(&sys, &long, i)? == ext_vanishing(&sys, &short, i)?;
    }
    c.check("ext flags agree", same);
    Ok(c)
}

fn criterion_4() -> Res<Criterion> {
    let mut c = Criterion::new(4, "ex2a7 and ex2a8 controllability conditions");
    for (stem, expected) in [("ex2a7", "d1(a) + a^2 - a"), ("ex2a8", "l1 - l2")] {
        let sys = system(stem, "generic");
        let k = sys.field();
        let ka = kernel_analysis(&sys.session, &sys.matrix.adjoint(k))?;
        let target = rows(&sys, stem, "w", &format!("R: ({expected})*w = r;")).entry(0, 0).clone();
        let target = target.get(&diffmod::ore::DMono::one(k.n())).cloned().unwrap();
        let ok = ka.conditions.len() == 1 && ka.conditions[0].div(&target)?.is_constant();
        c.check(format!("{stem}: single condition {expected}"), ok);
    }
    Ok(c)
}

fn corpus_systems() -> Vec<(String, System)> {
    let mut stems: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == "dms").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    stems.sort();
    let mut out = Vec::new();
    for stem in stems {
        let ast = parse_system(&source(&stem)).unwrap();
        for case in all_cases(&splits(&ast)) {
            out.push((format!("{stem} [{}]", case_label(&case)), elaborate(&ast, &case).unwrap()));
        }
    }
    out
}

fn criterion_5() -> Res<Criterion> {
    let mut c = Criterion::new(5, "rank of the operator equals rank of its adjoint on the corpus");
    let all = corpus_systems();
    c.check("at least 12 systems", all.len() >= 12);
    for (name, sys) in &all {
        let r = differential_rank(&sys.session, &sys.matrix)?;
        let ra = differential_rank(&sys.session, &sys.matrix.adjoint(sys.field()))?;
        c.check(format!("{name}: {r} = {ra}"), r == ra);
    }
    Ok(c)
}

fn criterion_6() -> Res<Criterion> {
    let mut c = Criterion::new(6, "ex3_1 ext^1 torsion generator, ext^2 = 0");
    let sys = system("ex3_1", "generic");
    let s = &sys.session;
    let k = sys.field();
    let seq = sequence(&sys)?;
    let e1 = ext_module(s, &seq, 1, "")?;
    let nu = rows(&sys, "ex3_1", "m1, m2", "N: d1(m2)/alpha + c*m2 - m1 = n;");
    c.check("ext^1 nonzero", !e1.vanishing);
    c.check("generated by the residue of nu'", e1.is_generated_by(s, &nu.row_vec())?);
    c.check("nu' is a nonzero class", e1.is_nonzero_class(s, nu.row(0))?);
    let d1 = op(&sys, "ex3_1", "d1(w)");
    let d_nu: Vec<ScalarOp> = nu.row(0).iter().map(|p| d1.mul(k, p)).collect();
    c.check("d1 kills the residue", RowModule::new(s, &e1.image)?.contains(s, &d_nu)?);
    c.check("ext^2 = 0", ext_vanishing(&sys, &seq, 2)?);
    Ok(c)
}

fn criterion_7() -> Res<Criterion> {
    let mut c = Criterion::new(7, "ex3_2 both branches of c");
    let zero = system("ex3_2", "c=0");
    let seq = sequence(&zero)?;
    let e1 = ext_module(&zero.session, &seq, 1, "c=0")?;
    let mu3 = rows(&zero, "ex3_2", "m1, m2, m3", "G: m3 = g;");
    c.check("c=0: ext^1 nonzero", !e1.vanishing);
    c.check(
        "c=0: generated by mu3",
        e1.is_generated_by(&zero.session, &mu3.row_vec())? && e1.is_nonzero_class(&zero.session, mu3.row(0))?,
    );
    c.check("c=0: ext^2 nonzero", !ext_vanishing(&zero, &seq, 2)?);

    let nonzero = system("ex3_2", "c!=0");
    let seq = sequence(&nonzero)?;
    let e1 = ext_module(&nonzero.session, &seq, 1, "c!=0")?;
    let div = rows(&nonzero, "ex3_2", "m1, m2, m3", "G: d1(m1) + d2(m2) = g;");
    c.check(
        "c!=0: ext^1 generated by d1 mu1 + d2 mu2",
        !e1.vanishing
            && e1.is_generated_by(&nonzero.session, &div.row_vec())?
            && e1.is_nonzero_class(&nonzero.session, div.row(0))?,
    );
    c.check("c!=0: ext^2 = 0", ext_vanishing(&nonzero, &seq, 2)?);
    Ok(c)
}

fn criterion_8() -> Res<Criterion> {
    let mut c = Criterion::new(8, "ex3_3 density: exactness, parametrization, structure constant");
    let sys = system("ex3_3_density", "generic");
    let s = &sys.session;
    let k = sys.field();
    let stem = "ex3_3_density";
    let seq = sequence(&sys)?;
    for i in 1..=3 {
        c.check(format!("ext^{i} = 0"), ext_vanishing(&sys, &seq, i)?);
    }

    let dm1 = rows(&sys, stem, "phi", "X1: -x3*d3(phi) + phi = r1;\nX2: -d3(phi) = r2;\nX3: d2(phi) + x3*d1(phi) = r3;");
    let omega = rows(&sys, stem, "a1, a2, a3", "W: a1 - x3*a2 = w;");
    c.check("D D_-1 = 0", sys.matrix.compose(k, &dm1)?.is_zero());
    c.check("xi1 - x3 xi2 = phi", omega.compose(k, &dm1)? == OpMatrix::identity(3, 1));
    let p = parametrize(s, &sys.matrix)?;
    let rescale = OpMatrix::from_rows(3, 1, vec![vec![ScalarOp::coeff(3, k.var(2).inv()?)]]);
    c.check("parametrization is D_-1 for the potential phi/x3", p.d == dm1.compose(k, &rescale)?);
    c.check("D generates the conditions of D_-1", p.forward && p.backward);

    let d1 = rows(&sys, stem, "o1, o2, o3", "V: -x3*d3(o1) + o1 - d3(o2) + d2(o3) + x3*d1(o3) = v;");
    let cc = compatibility_conditions(s, &sys.matrix)?;
    c.check("linearized structure equation is the condition", same_row_module(s, &d1, &cc.matrix)?);
    let two = OpMatrix::from_rows(3, 1, vec![vec![ScalarOp::coeff(3, RatFunc::from_int(2))]]);
    c.check("2c lambda = omega_i mu^i", omega.compose(k, &d1.adjoint(k))? == two);

    let pair = rows(
        &sys,
        stem,
        "m1, m2, m3",
        "R1: d3(m1) - x3*d3(m2) - 3*m2 = r1;\n\
         R2: d2(m1) - x3*d2(m2) - x3^2*d1(m2) + x3*d1(m1) + 2*m3 = r2;\n\
         R3: d3(m3) + d2(m2) + x3*d1(m2)/2 + d1(m1)/2 = r3;",
    );
    let basis = complete(s, &pair.select_rows(&[0, 1]))?;
    let found = basis.trace.integrability_conditions.iter().any(|r| proportional(r, pair.row(2)));
    c.check("completion finds the missing condition", found && basis.reduces_to_zero(s, pair.row(2))?);

    let flat = system("ex3_3_flat", "generic");
    let xi1 = rows(&flat, "ex3_3_flat", "a1, a2, a3", "T: a1 = t;");
    let cert = torsion_certificate(&flat.session, &flat.matrix, xi1.row(0))?;
    let ok = match &cert {
        Some(t) => t.verify(&flat.session, &flat.matrix)?,
        None => false,
    };
    c.check("flat: xi1 is a nonzero torsion element", ok);
    let seq = sequence(&flat)?;
    c.check("flat: ext^1 nonzero", !ext_vanishing(&flat, &seq, 1)?);
    c.check("flat: ext^2 nonzero", !ext_vanishing(&flat, &seq, 2)?);
    Ok(c)
}

fn criterion_9() -> Res<Criterion> {
    let mut c = Criterion::new(9, "ex3_5 flat and contact branches");
    let flat = system("ex3_5_flat", "generic");
    let s = &flat.session;
    let k = flat.field();
    let seq = sequence(&flat)?;
    let e1 = ext_module(s, &seq, 1, "")?;
    let tau = rows(&flat, "ex3_5_flat", "m1, m2, m3, m4, m5, m6", "T: d3(m2) - d2(m1) = t;");
    c.check(
        "flat: ext^1 has the single generator tau",
        e1.generators.len() == 1 && proportional(&e1.generators[0], tau.row(0)),
    );
    let d1 = op(&flat, "ex3_5_flat", "d1(w)");
    let d_tau: Vec<ScalarOp> = tau.row(0).iter().map(|p| d1.mul(k, p)).collect();
    c.check("flat: d1 tau = 0 on residues", RowModule::new(s, &e1.image)?.contains(s, &d_tau)?);
    c.check("flat: ext^2 nonzero", !ext_vanishing(&flat, &seq, 2)?);
    let ranks = seq.ranks();
    c.check("flat: resolution ranks 3, 6, 4, 1", ranks == [3, 6, 4, 1]);
    c.check("flat: alternating rank sum 0", alternating_rank_sum(&ranks) == 0);

    let contact = system("ex3_5_contact", "generic");
    let seq = sequence(&contact)?;
    c.check("contact: hom(M, D) = 0", ext_vanishing(&contact, &seq, 0)?);
    c.check("contact: ext^1 nonzero", !ext_vanishing(&contact, &seq, 1)?);
    c.check(
        "contact: 3 generators on each side",
        contact.matrix.rows() == 3 && contact.matrix.cols() == 3 && seq.ops.len() == 1,
    );
    c.check("contact: ext^2 = 0", ext_vanishing(&contact, &seq, 2)?);
    Ok(c)
}

fn h(g: &SymbolSpace, s: usize) -> usize {
    g.cohomology_dim(s, 0)
}

fn criterion_10() -> Res<Criterion> {
    let mut c = Criterion::new(10, "Spencer cohomology tables");
    let killing: Vec<SymbolSpace> = (2..=5).map(SymbolSpace::killing).collect();
    let h2: Vec<usize> = killing.iter().map(|g| h(g, 2)).collect();
    let h3: Vec<usize> = killing.iter().map(|g| h(g, 3)).collect();
    let closed2: Vec<usize> = (2..=5usize).map(|n| n * n * (n * n - 1) / 12).collect();
    let closed3: Vec<usize> = (2..=5usize).map(|n| n * n * (n * n - 1) * (n - 2) / 24).collect();
    c.check("killing H2 matches n^2(n^2-1)/12", h2 == closed2);
    c.check("killing H3 matches n^2(n^2-1)(n-2)/24", h3 == closed3);
    c.check("killing H2 for n=2..5 is 1, 6, 20, 50", h2 == [1, 6, 20, 50]);
    c.check("killing H3 for n=2..5 is 0, 3, 20, 50", h3 == [0, 3, 20, 50]);
    c.check("killing n=4 is 20/20", h2[2] == 20 && h3[2] == 20);

    let conf4 = classical_dims(Family::Conformal, 4)?;
    c.check("conformal n=4 dims 4, 9, 10, 9, 4", conf4.dims == [4, 9, 10, 9, 4]);
    c.check("conformal n=4 H3 = 0", h(&SymbolSpace::conformal(4), 3) == 0);
    let d5 = conformal_diagram(5)?;
    let fibers = [d5.z3_killing, d5.z3_conformal, d5.h3_conformal, d5.wedge2_g2, d5.delta_s2, d5.wedge3];
    c.check("conformal n=5 fibers 75, 85, 35, 50, 40, 10", fibers == [75, 85, 35, 50, 40, 10]);
    let acyclic = |n: usize, k: usize| SymbolSpace::conformal(n).prolong(1).is_acyclic(k);
    c.check("conformal g2 is 2-acyclic for n=4, 5", acyclic(4, 2) && acyclic(5, 2));
    c.check("conformal g2 is 3-acyclic for n=5", acyclic(5, 3));
    c.check("conformal g3 = 0 for n=3, 4, 5", (3..=5).all(|n| SymbolSpace::conformal(n).prolong(2).dim() == 0));

    let contact = classical_dims(Family::Contact, 3)?;
    let formula: Vec<usize> = (0..2).map(|r| contact_bundle_dim(3, r)).collect();
    c.check("contact n=3 dims 3, 3, 1", contact.dims == [3, 3, 1] && contact.dims[1..] == formula[..]);
    c.check("contact symbol is defined for n=3", family_symbol(Family::Contact, 3).is_ok());
    Ok(c)
}

fn run_property<S: Strategy>(
    c: &mut Criterion,
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> support::Check,
) {
    let mut runner = TestRunner::new(Config { cases: 128, failure_persistence: None, ..Config::default() });
    let result = runner.run(&strategy, test);
    if let Err(e) = &result {
        eprintln!("{name}: {e}");
    }
    c.check(format!("{name} (128 cases)"), result.is_ok());
}

fn criterion_11() -> Res<Criterion> {
    use support::*;
    let mut c = Criterion::new(11, "randomized invariants");
    run_property(&mut c, "adjoint involution", matrix(2, 2, 3, true), |s| check_adjoint_is_an_involution(&s));
    run_property(
        &mut c,
        "adjoint anti-homomorphism",
        (matrix(2, 3, 2, true), matrix(3, 2, 2, true)),
        |(b, a)| check_adjoint_reverses_composition(&b, &a),
    );
    run_property(&mut c, "conditions annihilate, constant coefficients", (matrix(3, 1, 2, false), section(1)), |(m, s)| {
        check_compatibility_conditions_annihilate(&m, 1, &s)
    });
    run_property(&mut c, "conditions annihilate, variable coefficients", (matrix(2, 2, 1, true), section(2)), |(m, s)| {
        check_compatibility_conditions_annihilate(&m, 2, &s)
    });
    run_property(
        &mut c,
        "normal form idempotent and membership",
        (matrix(2, 2, 2, false), prop::collection::vec(op(2, true), 2), prop::collection::vec(op(2, true), 2)),
        |(m, a, b)| check_normal_form_decides_membership(&m, &a, &b),
    );
    run_property(&mut c, "parser round trip", matrix(2, 2, 3, true), |s| check_parser_round_trip(&s));
    run_property(&mut c, "parser never panics on token soup", token_soup(), |src| {
        let _ = diffmod::dsl::load(&src);
        Ok(())
    });
    run_property(&mut c, "parser never panics on mutated input", (0usize..400, any::<u8>()), |(p, b)| {
        if let Some(src) = mutated_source(p, b) {
            let _ = diffmod::dsl::load(&src);
        }
        Ok(())
    });
    Ok(c)
}

#[test]
fn acceptance() {
    let runs: Vec<(u32, fn() -> Res<Criterion>)> = vec![
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut unexpected = Vec::new();
    for (id, run) in runs {
        let t = std::time::Instant::now();
        let (title, failed) = match run() {
            Ok(c) => {
                assert_eq!(c.id, id);
                (c.title.to_string(), c.failed().iter().map(|s| s.to_string()).collect::<Vec<_>>())
            }
            Err(e) => (format!("criterion {id}"), vec![format!("error: {e}")]),
        };
        let status = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} {id:>2} {title} ({:.1}s)", t.elapsed().as_secs_f64());
        for f in &failed {
            println!("        failed: {f}");
            if !UNATTAINABLE.contains(&(id, f.as_str())) {
                unexpected.push(format!("{id}: {f}"));
            }
        }
    }
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}
