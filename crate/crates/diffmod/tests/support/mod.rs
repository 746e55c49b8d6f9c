//! Strategies and invariant checks shared by the property and acceptance suites.
#![allow(dead_code)]

use diffmod::coefficients::{DiffField, RatFunc, Session};
use diffmod::dsl::{load, render, translate_matrix};
use diffmod::involution::complete;
use diffmod::ore::{fmt_row, DMono, OpMatrix, ScalarOp};
use diffmod::syzygy::compatibility_conditions;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const N: usize = 2;

pub fn field() -> DiffField {
    DiffField::with_vars(N)
}

/// `c0 + c1 x1 + c2 x2`, optionally divided by `x1 + d` with `d > 0`.
fn coeff(k: &DiffField, c: (i64, i64, i64), den: Option<i64>) -> RatFunc {
    let p = RatFunc::from_int(c.0)
        .add(&k.var(0).mul(&RatFunc::from_int(c.1)))
        .add(&k.var(1).mul(&RatFunc::from_int(c.2)));
    match den {
        Some(d) => p.div(&k.var(0).add(&RatFunc::from_int(d))).unwrap(),
        None => p,
    }
}

pub type TermSpec = ((u32, u32), (i64, i64, i64), Option<i64>);
pub type MatrixSpec = Vec<Vec<Vec<TermSpec>>>;

fn term_spec(max_order: u32, linear: bool) -> impl Strategy<Value = TermSpec> {
    let lin: i64 = if linear { 2 } else { 0 };
    (
        (0..=max_order, 0..=max_order).prop_filter("order", move |(a, b)| a + b <= max_order),
        (-3i64..=3, -lin..=lin, -lin..=lin),
        (0..5u8, 1i64..=3).prop_map(move |(r, d)| if linear && r == 0 { Some(d) } else { None }),
    )
}

pub fn op_from(k: &DiffField, terms: &[TermSpec]) -> ScalarOp {
    let mut p = ScalarOp::zero();
    for &((a, b), c, den) in terms {
        p.add_term(DMono(vec![a, b]), &coeff(k, c, den));
    }
    p
}

pub fn op(max_order: u32, linear: bool) -> impl Strategy<Value = Vec<TermSpec>> {
    prop::collection::vec(term_spec(max_order, linear), 0..=3)
}

pub fn matrix(rows: usize, cols: usize, max_order: u32, linear: bool) -> impl Strategy<Value = MatrixSpec> {
    prop::collection::vec(prop::collection::vec(op(max_order, linear), cols), rows)
}

pub fn build(k: &DiffField, cols: usize, spec: &[Vec<Vec<TermSpec>>]) -> OpMatrix {
    let rows = spec.iter().map(|r| r.iter().map(|t| op_from(k, t)).collect()).collect();
    OpMatrix::from_rows(N, cols, rows)
}

/// Polynomial of degree at most 4 in x1, x2.
fn section_poly(k: &DiffField, c: &[i64]) -> RatFunc {
    let mut out = RatFunc::zero();
    let mut idx = 0;
    for d in 0..=4u32 {
        for i in 0..=d {
            let m = k.monomial(&[(k.var_symbol(0), i), (k.var_symbol(1), d - i)]);
            out = out.add(&m.mul(&RatFunc::from_int(c[idx])));
            idx += 1;
        }
    }
    out
}

pub fn section(width: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, 15), width)
}

pub type Check = Result<(), TestCaseError>;

pub fn check_adjoint_is_an_involution(spec: &MatrixSpec) -> Check {
    let k = field();
    let a = build(&k, 2, spec);
    prop_assert_eq!(a.adjoint(&k).adjoint(&k), a);
    Ok(())
}

pub fn check_adjoint_reverses_composition(b: &MatrixSpec, a: &MatrixSpec) -> Check {
    let k = field();
    let b = build(&k, 3, b);
    let a = build(&k, 2, a);
    let lhs = b.compose(&k, &a).unwrap().adjoint(&k);
    let rhs = a.adjoint(&k).compose(&k, &b.adjoint(&k)).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// The conditions kill the operator, and the image of every polynomial section.
pub fn check_compatibility_conditions_annihilate(spec: &MatrixSpec, cols: usize, sec: &[Vec<i64>]) -> Check {
    let k = field();
    let a = build(&k, cols, spec);
    let s = Session::new(k.clone());
    let cc = compatibility_conditions(&s, &a).unwrap();
    prop_assert!(cc.matrix.compose(&k, &a).unwrap().is_zero());
    let xi: Vec<RatFunc> = sec.iter().map(|c| section_poly(&k, c)).collect();
    let eta = a.apply_to_section(&k, &xi).unwrap();
    let out = cc.matrix.apply_to_section(&k, &eta).unwrap();
    prop_assert!(out.iter().all(RatFunc::is_zero));
    Ok(())
}

pub fn check_normal_form_decides_membership(spec: &MatrixSpec, mult: &[Vec<TermSpec>], extra: &[Vec<TermSpec>]) -> Check {
    let k = field();
    let a = build(&k, 2, spec);
    let s = Session::new(k.clone());
    let b = complete(&s, &a).unwrap();

    // Left combinations of the rows are members.
    let mut member = vec![ScalarOp::zero(); 2];
    for (i, m) in mult.iter().enumerate() {
        let p = op_from(&k, m);
        for (j, slot) in member.iter_mut().enumerate() {
            *slot = slot.add(&p.mul(&k, a.entry(i, j)));
        }
    }
    prop_assert!(b.reduces_to_zero(&s, &member).unwrap());

    // Normal forms are fixed points and differ from the input by a member.
    let r: Vec<ScalarOp> = extra.iter().map(|t| op_from(&k, t)).collect();
    let nf = b.normal_form(&s, &r).unwrap();
    prop_assert_eq!(b.normal_form(&s, &nf).unwrap(), nf.clone());
    let diff: Vec<ScalarOp> = r.iter().zip(&nf).map(|(x, y)| x.sub(y)).collect();
    prop_assert!(b.reduces_to_zero(&s, &diff).unwrap());
    let shifted: Vec<ScalarOp> = nf.iter().zip(&member).map(|(x, y)| x.add(y)).collect();
    prop_assert_eq!(b.normal_form(&s, &shifted).unwrap(), nf);
    Ok(())
}

pub fn check_parser_round_trip(spec: &MatrixSpec) -> Check {
    let k = field();
    let a = build(&k, 2, spec);
    if (0..a.rows()).any(|i| a.row(i).iter().all(ScalarOp::is_zero)) {
        return Err(TestCaseError::reject("empty row"));
    }
    let names = vec!["y1".to_string(), "y2".to_string()];
    let mut src = String::from("vars x1, x2;\nunknowns y1, y2;\n");
    for i in 0..a.rows() {
        src.push_str(&format!("E{i}: {} = u{i};\n", fmt_row(&k, a.row(i), &names)));
    }
    let s = load(&src).unwrap();
    prop_assert_eq!(&translate_matrix(&s.matrix, s.field(), &k).unwrap(), &a);
    let t = load(&render(&s)).unwrap();
    prop_assert_eq!(translate_matrix(&t.matrix, t.field(), &k).unwrap(), a);
    Ok(())
}

pub const TOKENS: &[&str] = &[
    "system", "vars", "unknowns", "params", "funcs", "assume", "split", "rel", "order", "priority",
    "x1", "x2", "y", "a", "c", "u", "d1", "d12", "d222", "d", "(", ")", "[", "]", ",", ";", ":", "=",
    "!=", "+", "-", "*", "/", "^", "0", "1", "2", "64", "99999999999", "#", "\n", "deglex", "xi[2]",
];

pub fn token_soup() -> impl Strategy<Value = String> {
    prop::collection::vec(0..TOKENS.len(), 0..60)
        .prop_map(|idx| idx.iter().map(|&i| TOKENS[i]).collect::<Vec<_>>().join(" "))
}

/// A valid system with one byte inserted somewhere.
pub fn mutated_source(pos: usize, byte: u8) -> Option<String> {
    let mut src = b"vars x1, x2; params c; funcs a; unknowns y; assume a != 0; \
        rel d1(a) = a^2; P: d22(y) + a*x2*y = u; Q: d12(y) - c*y = v;"
        .to_vec();
    let p = pos % (src.len() + 1);
    src.insert(p, byte);
    String::from_utf8(src).ok()
}
