//! One JSON payload per subcommand.

use serde_json::{json, Value};

use diffmod::coefficients::{deriv_prefix, DiffField, RatFunc, Session};
use diffmod::dsl::System;
use diffmod::duality::{
    double_duality_test, ext_module, kernel_analysis, parametrize, torsion_submodule, TorsionCertificate,
};
use diffmod::involution::{complete_with, CompleteOptions};
use diffmod::ore::{fmt_row, DMono, OpMatrix, ScalarOp};
use diffmod::spencer::{classical_dims, conformal_diagram, family_symbol, lanczos_comparison, Family};
use diffmod::syzygy::{alternating_rank_sum, build_sequence, compatibility_conditions, differential_rank};
use diffmod::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Complete,
    Cc,
    Sequence { max_steps: Option<usize> },
    Adjoint,
    Rank,
    Duality,
    Torsion,
    Ext { index: Option<usize> },
    Parametrize,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Complete => "complete",
            Command::Cc => "cc",
            Command::Sequence { .. } => "sequence",
            Command::Adjoint => "adjoint",
            Command::Rank => "rank",
            Command::Duality => "duality",
            Command::Torsion => "torsion",
            Command::Ext { .. } => "ext",
            Command::Parametrize => "parametrize",
        }
    }
}

pub fn fmt_rat(k: &DiffField, f: &RatFunc) -> String {
    k.fmt(f)
}

fn lead_text(mu: &DMono, label: &str) -> String {
    if mu.is_one() {
        label.to_string()
    } else {
        format!("{}({label})", deriv_prefix(&mu.0))
    }
}

fn rows_text(k: &DiffField, rows: &[Vec<ScalarOp>], labels: &[String]) -> Vec<String> {
    rows.iter().map(|r| fmt_row(k, r, labels)).collect()
}

/// Rows of `a` rendered over `labels`, with orders.
pub fn matrix_json(k: &DiffField, a: &OpMatrix, labels: &[String]) -> Value {
    let rows: Vec<Value> = (0..a.rows())
        .map(|i| {
            json!({
                "label": a.row_labels[i],
                "order": a.row_order(i),
                "text": fmt_row(k, a.row(i), labels),
            })
        })
        .collect();
    json!({ "cols": labels, "rows": rows })
}

/// Dual labels for the free module `F_i` of a resolution of `sys`.
pub fn dual_labels(sys: &System, i: usize, len: usize) -> Vec<String> {
    match i {
        0 => sys.matrix.col_labels.iter().map(|l| format!("nu_{l}")).collect(),
        1 => sys.matrix.row_labels.iter().map(|l| format!("mu_{l}")).collect(),
        _ => (1..=len).map(|j| format!("lam{i}_{j}")).collect(),
    }
}

fn certificate_json(k: &DiffField, c: &TorsionCertificate, labels: &[String], verified: bool) -> Value {
    json!({
        "element": fmt_row(k, &c.element, labels),
        "annihilator": fmt_row(k, std::slice::from_ref(&c.annihilator), &["e".to_string()]),
        "verified": verified,
    })
}

pub fn provisos_text(session: &Session) -> Vec<String> {
    let k = session.field();
    session.provisos().iter().map(|p| k.fmt(p)).collect()
}

pub fn run(sys: &System, cmd: &Command) -> Result<Value, Error> {
    let s = &sys.session;
    let k = sys.field();
    let a = &sys.matrix;
    let unknowns = &a.col_labels;
    match cmd {
        Command::Complete => {
            let opts = CompleteOptions { order: sys.order.clone(), track: false };
            let b = complete_with(s, a, &opts)?;
            let rows: Vec<Value> = b
                .rows()
                .iter()
                .map(|r| {
                    json!({
                        "text": fmt_row(k, &r.op, unknowns),
                        "lead": lead_text(&r.lead.1, &unknowns[r.lead.0]),
                        "class": r.class + 1,
                        "multiplicative": r.mult.iter().map(|v| v + 1).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let count = b.count_parametric();
            Ok(json!({
                "order": b.q(),
                "basis": rows,
                "board": b.board_text(),
                "formally_integrable": b.is_formally_integrable(),
                "janet_criterion": b.check_criterion(s)?,
                "input_involutive": b.input_was_involutive(),
                "integrability_conditions": rows_text(k, &b.trace.integrability_conditions, unknowns),
                "finite_type": count.finite_type,
                "parametric_dim": count.dim,
                "hilbert": count.hilbert,
                "trace": {
                    "steps": b.trace.steps.len(),
                    "added": b.trace.steps.iter().filter(|t| t.added).count(),
                },
            }))
        }
        Command::Cc => {
            let cc = compatibility_conditions(s, a)?;
            Ok(json!({
                "count": cc.matrix.rows(),
                "conditions": matrix_json(k, &cc.matrix, &a.row_labels),
                "formally_integrable": cc.completed.is_formally_integrable(),
            }))
        }
        Command::Sequence { max_steps } => {
            let seq = build_sequence(s, a, max_steps.unwrap_or(a.n() + 1))?;
            let mut labels = vec![unknowns.clone()];
            labels.extend(seq.ops.iter().map(|o| o.row_labels.clone()));
            let ops: Vec<Value> =
                seq.ops.iter().zip(&labels).map(|(o, l)| matrix_json(k, o, l)).collect();
            let ranks = seq.ranks();
            Ok(json!({
                "ranks": ranks,
                "orders": seq.orders,
                "alternating_rank_sum": alternating_rank_sum(&ranks),
                "operators": ops,
                "compose_zero": seq.certificates,
                "strictly_exact": seq.strictly_exact,
                "involutive": seq.involutive,
                "truncated": seq.truncated,
            }))
        }
        Command::Adjoint => {
            let mu = dual_labels(sys, 1, a.rows());
            let ad = a.adjoint(k).with_row_labels(unknowns.iter().map(|l| format!("ad_{l}")).collect());
            let ka = kernel_analysis(s, &ad)?;
            Ok(json!({
                "adjoint": matrix_json(k, &ad, &mu),
                "injectivity": format!("{:?}", ka.injective).to_lowercase(),
                "conditions": ka.conditions.iter().map(|c| k.fmt(c)).collect::<Vec<_>>(),
            }))
        }
        Command::Rank => {
            let r = differential_rank(s, a)?;
            let ra = differential_rank(s, &a.adjoint(k))?;
            Ok(json!({ "rank": r, "adjoint_rank": ra, "equal": r == ra }))
        }
        Command::Duality => {
            let t = double_duality_test(s, a)?;
            let phi: Vec<String> = t.d.as_ref().map(|d| d.col_labels.clone()).unwrap_or_default();
            Ok(json!({
                "torsion_free": t.torsion_free,
                "parametrizing_operator": t.d.as_ref().map(|d| matrix_json(k, d, &phi)),
                "d1_prime": matrix_json(k, &t.d1_prime, unknowns),
                "extra": rows_text(k, &t.extra, unknowns),
            }))
        }
        Command::Torsion => {
            let certs = torsion_submodule(s, a)?;
            let mut out = Vec::new();
            for c in &certs {
                out.push(certificate_json(k, c, unknowns, c.verify(s, a)?));
            }
            Ok(json!({ "torsion_free": certs.is_empty(), "elements": out }))
        }
        Command::Ext { index } => {
            let seq = build_sequence(s, a, a.n() + 1)?;
            let top = seq.ops.len();
            let indices: Vec<usize> = match index {
                Some(i) => vec![*i],
                None => (0..=top).collect(),
            };
            let ranks = seq.ranks();
            let mut out = Vec::new();
            for i in indices {
                let e = ext_module(s, &seq, i, &crate::input::label(&sys.case))?;
                let labels = dual_labels(sys, i, ranks.get(i).copied().unwrap_or(0));
                let mut torsion = Vec::new();
                for c in &e.torsion {
                    torsion.push(certificate_json(k, c, &labels, c.verify(s, &e.image)?));
                }
                out.push(json!({
                    "index": i,
                    "vanishing": e.vanishing,
                    "generators": rows_text(k, &e.generators, &labels),
                    "kernel": rows_text(k, &e.kernel.row_vec(), &labels),
                    "image_rows": e.image.rows(),
                    "torsion": torsion,
                    "provisos": e.provisos.iter().map(|p| k.fmt(p)).collect::<Vec<_>>(),
                }));
            }
            Ok(json!({ "ranks": ranks, "ext": out }))
        }
        Command::Parametrize => match parametrize(s, a) {
            Ok(p) => {
                let phi = p.d.col_labels.clone();
                Ok(json!({
                    "parametrizable": true,
                    "operator": matrix_json(k, &p.d, &phi),
                    "d1_prime": matrix_json(k, &p.d1_prime, unknowns),
                    "forward": p.forward,
                    "backward": p.backward,
                    "minimal_potentials": p.minimal_rank_bound,
                }))
            }
            Err(Error::NotParametrizable(t)) => Ok(json!({ "parametrizable": false, "torsion_generators": t })),
            Err(e) => Err(e),
        },
    }
}

/// Spencer tables for a classical family.
pub fn spencer(family: Family, n: usize) -> Result<Value, Error> {
    let g = family_symbol(family, n)?;
    let next = g.prolong(1);
    let mut v = json!({
        "family": format!("{family:?}").to_lowercase(),
        "n": n,
        "order": g.q,
        "solution_dim": g.dim(),
        "h2": g.cohomology_dim(2, 0),
        "h3": g.cohomology_dim(3, 0),
        "prolongation_acyclic": { "2": next.is_acyclic(2), "3": next.is_acyclic(3) },
        "vanishing_level": g.vanishing_level(),
    });
    match classical_dims(family, n) {
        Ok(t) => {
            v["bundle_dims"] = json!(t.dims);
            v["operator_orders"] = json!(t.orders);
        }
        Err(Error::UnsupportedDimension(msg)) => v["bundle_dims_unavailable"] = json!(msg),
        Err(e) => return Err(e),
    }
    if family == Family::Conformal && n >= 3 {
        let d = conformal_diagram(n)?;
        v["diagram"] = json!({
            "z3_killing": d.z3_killing,
            "z3_conformal": d.z3_conformal,
            "h3_conformal": d.h3_conformal,
            "wedge2_g2": d.wedge2_g2,
            "wedge2_t": d.wedge2_t,
            "delta_s2": d.delta_s2,
            "wedge3": d.wedge3,
        });
    }
    if family == Family::Killing {
        let (z3, l) = lanczos_comparison(n);
        v["lanczos"] = json!({ "z3": z3, "lanczos_dim": l });
    }
    Ok(v)
}
