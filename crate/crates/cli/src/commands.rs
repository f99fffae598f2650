//! One function per subcommand. Each returns its results and checks, an
//! input error (exit 2), or a computation failure (exit 1).

use rickart_core::acceptance::{self, CSTAR_REL, LOOSE, TIGHT};
use rickart_core::lattice::sup_increasing_detail;
use rickart_core::norm::unit_ball_sides;
use rickart_core::{
    audit_axioms, cstar_identity_check, leq, order_norm, series_sup, AnyElement, CheckRecord, DominatedSeries, Element,
    Error, GeometricTail, IncreasingSequence, JoinConstruction, MatrixElement, MatrixModel, Partition, SpectralFamily,
    StepFnModel, StepFunction, TagRule, Tolerance,
};
use serde_json::{json, Value};

use crate::input::{compatible, narrow, InputError, Kind, SequenceDocument};

pub enum Failure {
    Input(InputError),
    /// A computation on valid input broke down; reported as a failing
    /// check named by the first field.
    Runtime(String, String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

pub struct Output {
    pub results: Value,
    pub checks: Vec<CheckRecord>,
}

type Outcome = Result<Output, Failure>;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Preconditions on the input map to exit 2 under `field`; anything else
/// is a runtime failure of `check`.
fn classify(e: Error, field: &str, check: &str) -> Failure {
    match e {
        Error::Numerical(m) => Failure::Runtime(check.into(), m),
        Error::Schema { field, message } => Failure::Input(InputError { field, message }),
        other => Failure::Input(InputError::new(field, other.to_string())),
    }
}

fn check(name: &str, pass: bool, detail: String) -> CheckRecord {
    if pass {
        CheckRecord::pass(name, detail)
    } else {
        CheckRecord::fail(name, detail, Vec::new())
    }
}

fn doc<E: Element>(x: &E) -> Value {
    serde_json::to_value(x.to_document()).expect("documents serialize")
}

/// Dispatches `body` on the model of `x`.
macro_rules! by_kind {
    ($x:expr, |$v:ident: $t:ident| $body:expr) => {
        match $x {
            AnyElement::Matrix($v) => {
                type $t = MatrixElement;
                $body
            }
            AnyElement::Stepfn($v) => {
                type $t = StepFunction;
                $body
            }
        }
    };
}

pub enum ModelChoice {
    Matrix,
    Stepfn,
}

pub fn axioms(model: ModelChoice, dim: Option<usize>, samples: usize, seed: u64) -> Outcome {
    if samples == 0 {
        return Err(InputError::new("--samples", "expected at least 1").into());
    }
    let t = tol();
    let (report, results) = match model {
        ModelChoice::Matrix => {
            let n = dim.unwrap_or(3);
            if !(1..=rickart_core::matrix::MAX_DIM).contains(&n) {
                return Err(InputError::new(
                    "--dim",
                    format!("expected 1..={}, found {n}", rickart_core::matrix::MAX_DIM),
                )
                .into());
            }
            let r = audit_axioms(&MatrixModel::new(n), seed, samples, &t);
            (r, json!({"model": "matrix", "dim": n, "samples": samples}))
        }
        ModelChoice::Stepfn => {
            if dim.is_some() {
                return Err(InputError::new("--dim", "only applies to --model matrix").into());
            }
            let m = StepFnModel::default();
            let r = audit_axioms(&m, seed, samples, &t);
            (
                r,
                json!({"model": "stepfn", "max_exceptions": m.max_exceptions, "samples": samples}),
            )
        }
    };
    Ok(Output {
        results,
        checks: report.checks,
    })
}

pub fn spectral(x: AnyElement, mesh: f64, partition: Option<Partition>) -> Outcome {
    if !(mesh > 0.0 && mesh.is_finite()) {
        return Err(InputError::new("--mesh", "expected a positive number").into());
    }
    by_kind!(x, |x: E| spectral_on::<E>(x, mesh, partition))
}

fn spectral_on<E: Kind>(x: E, mesh: f64, partition: Option<Partition>) -> Outcome {
    let t = tol();
    let fam = SpectralFamily::new(&x, &t).map_err(|e| classify(e, "input", "spectral.decompose"))?;
    let mut checks = fam.verify(&t);
    let intervals: Vec<Value> = fam
        .intervals()
        .iter()
        .map(|(lo, hi, e)| json!({"lo": lo, "hi": hi, "projection": doc(e)}))
        .collect();
    let reconstruction = if x.order_bracket(&t).is_none() {
        json!({"skipped": "element is not order-bounded"})
    } else {
        let p = match partition {
            Some(p) => {
                if p.mesh() > mesh {
                    return Err(
                        InputError::new("partition.grid", format!("mesh {} exceeds --mesh {mesh}", p.mesh())).into(),
                    );
                }
                p
            }
            None => Partition::covering(fam.min(), fam.max(), mesh, TagRule::Left)
                .map_err(|e| classify(e, "--mesh", "spectral.partition"))?,
        };
        let r = fam
            .reconstruct(&p, &t)
            .map_err(|e| classify(e, "partition.grid", "spectral.reconstruct"))?;
        let bound = mesh + TIGHT * t.eps_eq * fam.element.magnitude(&t).max(1.0);
        checks.push(check(
            "spectral.reconstruction",
            r.error <= bound,
            format!("error {:e} against mesh {mesh}", r.error),
        ));
        json!({
            "cells": p.grid.len() - 1,
            "mesh": r.mesh,
            "error": r.error,
            "approx": doc(&r.approx),
        })
    };
    Ok(Output {
        results: json!({
            "kind": E::NAME,
            "breakpoints": fam.breakpoints,
            "intervals": intervals,
            "reconstruction": reconstruction,
        }),
        checks,
    })
}

pub fn norm(x: AnyElement) -> Outcome {
    by_kind!(x, |x: E| norm_on::<E>(x))
}

fn norm_on<E: Kind>(x: E) -> Outcome {
    let t = tol();
    let hermitian = x.is_hermitian(&t);
    if x.order_bracket(&t).is_none() {
        return Ok(Output {
            results: json!({"kind": E::NAME, "bounded": false, "hermitian": hermitian}),
            checks: vec![check("norm.bounded", false, "element is not order-bounded".into())],
        });
    }
    let fail = |e| classify(e, "input", "norm.order_norm");
    let n = order_norm(&x, &t).map_err(fail)?;
    let c = cstar_identity_check(&x, &t).map_err(fail)?;
    let mut checks = vec![
        check("norm.bounded", true, format!("order norm {n}")),
        check(
            "norm.cstar_identity",
            (c.lhs - c.rhs).abs() <= CSTAR_REL * c.rhs.max(1.0),
            format!("|x*x| = {}, |x|^2 = {}", c.lhs, c.rhs),
        ),
    ];
    if let Some(o) = x.oracle_norm(&t) {
        checks.push(check(
            "norm.oracle",
            (n - o).abs() <= TIGHT * t.eps_eq * o.max(1.0),
            format!("oracle {o}"),
        ));
    }
    let mut results = json!({"kind": E::NAME, "bounded": true, "hermitian": hermitian, "order_norm": n});
    if hermitian && n <= 1.0 {
        let (in_k, near_one) = unit_ball_sides(&x, &t).map_err(fail)?;
        results["unit_ball"] = json!({"positive": in_k, "distance_to_one_at_most_1": near_one});
        checks.push(check(
            "norm.unit_ball",
            in_k == near_one,
            format!("x in K: {in_k}, |1 - x| <= 1: {near_one}"),
        ));
    }
    Ok(Output { results, checks })
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum LatticeOp {
    PosPart,
    Abs,
    Join,
    Meet,
}

pub fn lattice(op: LatticeOp, x: AnyElement, z: Option<AnyElement>) -> Outcome {
    by_kind!(x, |x: E| {
        let z = z.map(|z| narrow::<E>(z, "with")).transpose()?;
        lattice_on::<E>(op, x, z)
    })
}

fn lattice_on<E: Kind>(op: LatticeOp, x: E, z: Option<E>) -> Outcome {
    let t = tol();
    let fail = |e| classify(e, "input", "lattice.construction");
    x.require_hermitian(&t).map_err(fail)?;
    if let Some(z) = &z {
        compatible(&x, z, "with")?;
        z.require_hermitian(&t)
            .map_err(|e| classify(e, "with", "lattice.construction"))?;
    }
    let scale = x.magnitude(&t).max(1.0) + z.as_ref().map_or(0.0, |z| z.magnitude(&t));
    let close = |a: &E, b: &E| a.distance(b, &t) <= TIGHT * t.eps_eq * scale;
    let mut checks = Vec::new();
    let result = match op {
        LatticeOp::PosPart => {
            let c = JoinConstruction::build(&x, &t).map_err(fail)?;
            for id in c.identities(&x, &t) {
                checks.push(check(
                    &format!("join.identity {}", id.name),
                    id.holds(),
                    format!("residual {:e}", id.residual),
                ));
            }
            let oracle = x.oracle_positive_part(&x.decompose(&t).map_err(fail)?);
            checks.push(check(
                "join.oracle",
                close(&c.result, &oracle),
                "spectral positive part".into(),
            ));
            c.result
        }
        LatticeOp::Abs => {
            let y = rickart_core::abs(&x, &t).map_err(fail)?;
            checks.push(check("abs.positive", y.in_cone(&t), String::new()));
            checks.push(check("abs.square", close(&y.mul(&y), &x.mul(&x)), "|x|^2 = x^2".into()));
            checks.push(check(
                "abs.bounds",
                leq(&x, &y, &t) && leq(&x.neg(), &y, &t),
                "x, -x <= |x|".into(),
            ));
            y
        }
        LatticeOp::Join | LatticeOp::Meet => {
            let z = z.ok_or_else(|| InputError::new("--with", "required for --op join and --op meet"))?;
            let (y, name) = if op == LatticeOp::Join {
                (rickart_core::join(&x, &z, &t).map_err(fail)?, "join")
            } else {
                (rickart_core::meet(&x, &z, &t).map_err(fail)?, "meet")
            };
            // x v z = (x - z) v 0 + z and x ^ z = x - (x - z) v 0
            let d = x.sub(&z).hermitian_part();
            let pos = d.oracle_positive_part(&d.decompose(&t).map_err(fail)?);
            let oracle = if op == LatticeOp::Join {
                pos.add(&z)
            } else {
                x.sub(&pos)
            };
            let bounds = if op == LatticeOp::Join {
                leq(&x, &y, &t) && leq(&z, &y, &t)
            } else {
                leq(&y, &x, &t) && leq(&y, &z, &t)
            };
            checks.push(check(&format!("{name}.bounds"), bounds, String::new()));
            checks.push(check(
                &format!("{name}.oracle"),
                close(&y, &oracle),
                "spectral positive part".into(),
            ));
            y
        }
    };
    Ok(Output {
        results: json!({"kind": E::NAME, "result": doc(&result)}),
        checks,
    })
}

/// Terms, the geometric tail `(first, first_eps, ratio)`, and the limit.
type Narrowed<E> = (Vec<E>, Option<(E, f64, f64)>, Option<E>);

fn narrow_all<E: Kind>(seq: SequenceDocument) -> Result<Narrowed<E>, InputError> {
    let mut terms = Vec::with_capacity(seq.terms.len());
    for (k, a) in seq.terms.into_iter().enumerate() {
        let field = format!("terms[{k}]");
        let e = narrow::<E>(a, &field)?;
        if let Some(first) = terms.first() {
            compatible(first, &e, &field)?;
        }
        terms.push(e);
    }
    let tail = match seq.tail {
        None => None,
        Some(tl) => {
            let first = narrow::<E>(tl.first, "tail.first")?;
            compatible(&terms[0], &first, "tail.first")?;
            Some((first, tl.first_eps, tl.ratio))
        }
    };
    let limit = match seq.limit {
        None => None,
        Some(l) => {
            let l = narrow::<E>(l, "limit")?;
            compatible(&terms[0], &l, "limit")?;
            Some(l)
        }
    };
    Ok((terms, tail, limit))
}

pub fn sup(seq: SequenceDocument, v: AnyElement) -> Outcome {
    if seq.eps.is_some() || seq.tail.is_some() {
        let field = if seq.eps.is_some() { "eps" } else { "tail" };
        return Err(InputError::new(field, "not used by --op sup").into());
    }
    by_kind!(v, |v: E| {
        let (terms, _, limit) = narrow_all::<E>(seq)?;
        compatible(&terms[0], &v, "with")?;
        sup_on::<E>(terms, limit, v)
    })
}

fn sup_on<E: Kind>(terms: Vec<E>, limit: Option<E>, v: E) -> Outcome {
    let t = tol();
    let seq = IncreasingSequence {
        terms,
        limit: limit.clone(),
    };
    let r = sup_increasing_detail(&seq, &v, &t).map_err(|e| match e {
        Error::NotIncreasing { index } | Error::NotDominated { index } if index > seq.terms.len() => {
            Failure::Input(InputError::new("limit", e.to_string()))
        }
        Error::NotIncreasing { index } | Error::NotDominated { index } => {
            Failure::Input(InputError::new(format!("terms[{}]", index - 1), e.to_string()))
        }
        Error::NotHermitian { .. } => Failure::Input(InputError::new("terms", e.to_string())),
        other => classify(other, "with", "sup.compression"),
    })?;
    let scale = v.magnitude(&t).max(1.0);
    let mut checks = vec![
        check(
            "sup.upper_bound",
            seq.terms.iter().all(|x| leq(x, &r.sup, &t)),
            format!("{} terms", seq.terms.len()),
        ),
        check("sup.dominated", leq(&r.sup, &v, &t), "sup <= v".into()),
    ];
    if let Some(l) = &limit {
        let d = r.sup.distance(l, &t);
        checks.push(check(
            "sup.limit",
            d <= LOOSE * t.eps_eq * scale,
            format!("distance to the limit {d:e}"),
        ));
    }
    Ok(Output {
        results: json!({
            "kind": E::NAME,
            "sup": doc(&r.sup),
            "compressed_sup": doc(&r.compressed_sup),
        }),
        checks,
    })
}

pub fn series(seq: SequenceDocument) -> Outcome {
    let Some(eps) = seq.eps.clone() else {
        return Err(InputError::new("eps", "missing").into());
    };
    if seq.limit.is_some() {
        return Err(InputError::new("limit", "not used by series").into());
    }
    let first = seq.terms[0].clone();
    by_kind!(first, |_x: E| {
        let (terms, tail, _) = narrow_all::<E>(seq)?;
        let tail = tail.map(|(first, first_eps, ratio)| GeometricTail {
            first,
            first_eps,
            ratio,
        });
        series_on::<E>(DominatedSeries { terms, eps, tail })
    })
}

fn series_on<E: Kind>(series: DominatedSeries<E>) -> Outcome {
    let t = tol();
    let n = series.terms.len();
    let s = series_sup(&series, &t).map_err(|e| match e {
        Error::DominationViolated { index, .. } if index > n => {
            Failure::Input(InputError::new("tail.first", e.to_string()))
        }
        Error::DominationViolated { index, .. } if index >= 1 => {
            Failure::Input(InputError::new(format!("terms[{}]", index - 1), e.to_string()))
        }
        Error::DominationViolated { .. } => Failure::Input(InputError::new("eps", e.to_string())),
        other => classify(other, "terms", "series.supremum"),
    })?;
    let zero = s.sup.zero_like();
    let below = (0..=n).all(|k| leq(&series.partial_sum(k, &zero), &s.sup, &t));
    let bad = s.tail_bounds.iter().find(|b| !b.holds(&t));
    let checks = vec![
        check(
            "series.partial_sums",
            below,
            format!("{} partial sums below the supremum", n + 1),
        ),
        check(
            "series.tail_bound",
            bad.is_none(),
            match bad {
                None => format!("|a - s_k| <= 2 sum_(n>k) |x_n| for k = 0..={n}"),
                Some(b) => format!("k = {}: {} > {}", b.k, b.distance, b.bound),
            },
        ),
    ];
    Ok(Output {
        results: json!({
            "kind": E::NAME,
            "sup": doc(&s.sup),
            "eps_total": series.eps_total().unwrap_or(f64::NAN),
            "tail_bounds": s.tail_bounds,
        }),
        checks,
    })
}

pub fn report(seed: u64) -> Outcome {
    let outcomes = acceptance::run_all(seed);
    let checks = outcomes
        .iter()
        .map(|o| check(&format!("criterion {}: {}", o.id, o.name), o.pass, o.detail.clone()))
        .collect();
    let t = tol();
    Ok(Output {
        results: json!({
            "criteria": outcomes.len(),
            "tolerances": {
                "eps_eq": t.eps_eq,
                "eps_psd": t.eps_psd,
                "probe_count": t.probe_count,
                "tight": TIGHT,
                "loose": LOOSE,
                "cstar_relative": CSTAR_REL,
            },
        }),
        checks,
    })
}
