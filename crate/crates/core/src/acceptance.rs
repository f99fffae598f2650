//! The acceptance suite: one runner per criterion, each returning a
//! deterministic outcome for a given seed.
//!
//! Every tolerance used here is pinned as a constant below.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{leq, star_square, Element};
use crate::audit::Model;
use crate::audit::{audit_cone, random_dominated_series, sample_rng};
use crate::cocountable::{not_baer_witness, Point, StepFnModel, StepFunction, TailExpr};
use crate::error::Error;
use crate::lattice::{sup_increasing, IncreasingSequence, JoinConstruction};
use crate::matrix::{
    bicommutant, contraction_adjoint_check, masa_check, masa_check_projections, right_projection, sample,
    MatrixElement, MatrixModel,
};
use crate::norm::{cstar_identity_check, order_norm, series_sup, unit_ball_sides, DominatedSeries};
use crate::spectral::{Partition, Spectral, SpectralFamily, TagRule};
use crate::tolerance::Tolerance;

/// Residual bound for `y^2 = x`, bicommutant membership, norm agreement
/// and positive parts, in units of `eps_eq`.
pub const TIGHT: f64 = 10.0;
/// Bound for the iterative square root and compressed suprema, in units
/// of `eps_eq`.
pub const LOOSE: f64 = 100.0;
/// Relative bound on the C*-identity.
pub const CSTAR_REL: f64 = 1e-6;
/// Wall-clock limits in seconds for criteria 1, 2 and 8.
pub const LIMIT_CONE: f64 = 10.0;
pub const LIMIT_PSR: f64 = 30.0;
pub const LIMIT_SPECTRAL: f64 = 60.0;

/// Result of one criterion. `seconds` is excluded from serialization so
/// reports are byte-stable.
#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    #[serde(skip)]
    pub seconds: f64,
}

/// The library criteria, 1 through 9.
pub fn run_all(seed: u64) -> Vec<Outcome> {
    vec![
        cone_properness(seed),
        square_roots(seed),
        rickart_condition(seed),
        contraction_adjoint(seed),
        order_norm_criterion(seed),
        lattice(seed),
        masa(seed),
        spectral(seed),
        non_baer(),
    ]
}

fn timed(id: u8, name: &str, limit: Option<f64>, body: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (mut pass, mut detail) = body();
    let seconds = start.elapsed().as_secs_f64();
    if let Some(limit) = limit {
        if seconds >= limit {
            pass = false;
            detail = format!("{detail}; exceeded the {limit} s limit");
        }
    }
    Outcome {
        id,
        name: name.into(),
        pass,
        detail,
        seconds,
    }
}

/// Lowest failing index of `0..n`, with its message.
fn first_failure(n: usize, check: impl Fn(usize) -> Option<String> + Sync) -> Option<(usize, String)> {
    (0..n)
        .into_par_iter()
        .filter_map(|i| check(i).map(|m| (i, m)))
        .min_by_key(|(i, _)| *i)
}

fn verdict(parts: Vec<(String, Option<(usize, String)>)>) -> (bool, String) {
    let mut pass = true;
    let mut lines = Vec::new();
    for (label, fail) in parts {
        match fail {
            None => lines.push(format!("{label}: ok")),
            Some((i, m)) => {
                pass = false;
                lines.push(format!("{label}: sample {i}: {m}"));
            }
        }
    }
    (pass, lines.join("; "))
}

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Dimension for sample `i`, cycling through `2..=max`.
fn dim(i: usize, max: usize) -> usize {
    2 + i % (max - 1)
}

pub fn cone_properness(seed: u64) -> Outcome {
    timed(1, "cone properness", Some(LIMIT_CONE), || {
        let t = tol();
        let mut parts = Vec::new();
        for n in [2, 3, 4, 8] {
            let recs = audit_cone(&MatrixModel::new(n), seed, 1000, &t);
            let bad = recs
                .iter()
                .find(|r| !r.pass)
                .map(|r| (0, format!("{}: {}", r.name, r.detail)));
            parts.push((format!("matrix n={n}, 1000 samples"), bad));
        }
        let recs = audit_cone(&StepFnModel::default(), seed, 1000, &t);
        let bad = recs
            .iter()
            .find(|r| !r.pass)
            .map(|r| (0, format!("{}: {}", r.name, r.detail)));
        parts.push(("stepfn, 1000 samples".into(), bad));
        verdict(parts)
    })
}

pub fn square_roots(seed: u64) -> Outcome {
    timed(2, "positive square roots", Some(LIMIT_PSR), || {
        let t = tol();
        let max_db = std::sync::Mutex::new(0.0f64);
        let fail = first_failure(200, |i| {
            let mut rng = sample_rng(seed, 20, i as u64);
            let n = dim(i, 8);
            // one in four singular; the rest have spectrum in [0.1, 4]
            let singular = i % 4 == 0;
            let x = if singular {
                let r = sample::rank_deficient(&mut rng, n);
                star_square(&r).hermitian_part()
            } else {
                sample::psd_with_spectrum(&mut rng, n, 0.1, 4.0)
            };
            let y = match x.sqrt_psd(&t) {
                Ok(y) => y,
                Err(e) => return Some(e.to_string()),
            };
            let res = y.mul(&y).distance(&x, &t);
            if res > TIGHT * t.eps_eq {
                return Some(format!("|y^2 - x| = {res:e}"));
            }
            if !y.in_cone(&t) {
                return Some("y not positive".into());
            }
            match bicommutant(&x, &t) {
                Ok(b) => {
                    let r = b.residual(&y);
                    if r > TIGHT * t.eps_eq {
                        return Some(format!("bicommutant residual {r:e}"));
                    }
                }
                Err(e) => return Some(e.to_string()),
            }
            if !singular {
                match x.denman_beavers_sqrt(&t) {
                    Ok(z) => {
                        let d = z.distance(&y, &t);
                        let mut m = max_db.lock().unwrap();
                        *m = m.max(d);
                        if d > LOOSE * t.eps_eq {
                            return Some(format!("iterative root differs by {d:e}"));
                        }
                    }
                    Err(e) => return Some(e.to_string()),
                }
            }
            None
        });
        let (pass, detail) = verdict(vec![("200 PSD matrices, n <= 8".into(), fail)]);
        let m = *max_db.lock().unwrap();
        (pass, format!("{detail}; max eigen/iterative gap {m:.1e}"))
    })
}

pub fn rickart_condition(seed: u64) -> Outcome {
    timed(3, "Rickart condition", None, || {
        let t = tol();
        let fail = first_failure(200, |i| {
            let mut rng = sample_rng(seed, 30, i as u64);
            let n = dim(i, 8);
            let x = sample::rank_deficient(&mut rng, n);
            let e = right_projection(&x, &t).into_element();
            let xs = x.magnitude(&t).max(1.0);
            let near = |a: &MatrixElement, b: &MatrixElement, s: f64| a.distance(b, &t) <= TIGHT * t.eps_eq * s;
            if !near(&e.mul(&e), &e, 1.0) || !near(&e.star(), &e, 1.0) {
                return Some("RP(x) is not a projection".into());
            }
            if !near(&x.mul(&e), &x, xs) {
                return Some("x RP(x) != x".into());
            }
            if !near(&right_projection(&e, &t).into_element(), &e, 1.0) {
                return Some("RP(RP(x)) != RP(x)".into());
            }
            let zero = x.zero_like();
            for a in 0..n {
                for b in 0..n {
                    let u = MatrixElement::unit(n, a, b);
                    let kills = near(&x.mul(&u), &zero, xs);
                    let rp_kills = near(&e.mul(&u), &zero, 1.0);
                    if kills != rp_kills {
                        return Some(format!("x E_{a}{b} = 0 disagrees with RP(x) E_{a}{b} = 0"));
                    }
                }
            }
            // minimality: any projection q with x q = x dominates RP(x)
            for _ in 0..4 {
                let extra = sample::rank_deficient(&mut rng, n);
                let q = right_projection(&e.add(&star_square(&extra)), &t).into_element();
                if near(&x.mul(&q), &x, xs) && !leq(&e, &q, &t) {
                    return Some("RP(x) is not below a projection fixing x".into());
                }
            }
            None
        });
        verdict(vec![("200 matrices, n <= 8, all matrix units".into(), fail)])
    })
}

pub fn contraction_adjoint(seed: u64) -> Outcome {
    timed(4, "x*x <= 1 implies xx* <= 1", None, || {
        let t = tol();
        let fail = first_failure(1000, |i| {
            let mut rng = sample_rng(seed, 40, i as u64);
            let n = dim(i, 8);
            let g = sample::gaussian(&mut rng, n);
            let u: f64 = rand::Rng::random_range(&mut rng, 0.05..=1.0);
            let x = g.scale_real(u / g.spectral_norm());
            if !leq(&star_square(&x), &x.one_like(), &t) {
                return Some("scaling did not give x*x <= 1".into());
            }
            (!contraction_adjoint_check(&x, &t)).then(|| "counterexample".into())
        });
        verdict(vec![("1000 scaled matrices".into(), fail)])
    })
}

pub fn order_norm_criterion(seed: u64) -> Outcome {
    timed(5, "order norm and C*-identity", None, || {
        let t = tol();
        let norm_fail = first_failure(500, |i| {
            let mut rng = sample_rng(seed, 50, i as u64);
            let x = sample::hermitian(&mut rng, dim(i, 8));
            let eig = x.eig_hermitian(&t).ok()?;
            let oracle = eig.min().abs().max(eig.max().abs());
            let got = order_norm(&x, &t).ok()?;
            ((got - oracle).abs() > TIGHT * t.eps_eq).then(|| format!("order norm {got} vs eigen {oracle}"))
        });
        let cstar_fail = first_failure(500, |i| {
            let mut rng = sample_rng(seed, 51, i as u64);
            let x = sample::gaussian(&mut rng, dim(i, 8));
            match cstar_identity_check(&x, &t) {
                Ok(c) if c.pass && (c.lhs - c.rhs).abs() <= CSTAR_REL * c.rhs.max(1.0) => None,
                Ok(c) => Some(format!("|x*x| = {} vs |x|^2 = {}", c.lhs, c.rhs)),
                Err(e) => Some(e.to_string()),
            }
        });

        let geometric = |unit: MatrixElement| {
            let eps: Vec<f64> = (1..=30).map(|k| 0.5f64.powi(k)).collect();
            let terms = eps.iter().map(|&e| unit.scale_real(e)).collect();
            series_sup(&DominatedSeries::finite(terms, eps), &t)
        };
        let mut series_fail = None;
        for (label, unit) in [
            ("2^-n 1", MatrixElement::identity(2)),
            ("2^-n diag(1,0)", MatrixElement::diag(&[1.0, 0.0])),
        ] {
            match geometric(unit.clone()) {
                Ok(s) => {
                    let exact = s
                        .tail_bounds
                        .iter()
                        .all(|b| (b.distance - 0.5f64.powi(b.k as i32) + 0.5f64.powi(30)).abs() <= TIGHT * t.eps_eq);
                    if !(s.tail_bounds.iter().all(|b| b.holds(&t)) && exact) {
                        series_fail.get_or_insert((0, format!("{label}: tail bound")));
                    }
                }
                Err(e) => {
                    series_fail.get_or_insert((0, format!("{label}: {e}")));
                }
            }
        }
        let random_series = first_failure(100, |i| {
            let mut rng = sample_rng(seed, 52, i as u64);
            let result = if i % 2 == 0 {
                let s = random_dominated_series(&MatrixModel::new(dim(i, 5)), &mut rng);
                series_sup(&s, &t).map(|r| r.tail_bounds)
            } else {
                let s = random_dominated_series(&StepFnModel::default(), &mut rng);
                series_sup(&s, &t).map(|r| r.tail_bounds)
            };
            match result {
                Ok(b) => b
                    .iter()
                    .find(|b| !b.holds(&t))
                    .map(|b| format!("k = {}: {} > {}", b.k, b.distance, b.bound)),
                Err(e) => Some(e.to_string()),
            }
        });
        let ball_fail = first_failure(500, |i| {
            let mut rng = sample_rng(seed, 53, i as u64);
            let n = dim(i, 8);
            let x = if i % 2 == 0 {
                sample::psd_with_spectrum(&mut rng, n, 0.0, 1.0)
            } else {
                let h = sample::hermitian(&mut rng, n);
                let u: f64 = rand::Rng::random_range(&mut rng, 0.1..=1.0);
                h.scale_real(u / h.spectral_norm())
            };
            match unit_ball_sides(&x, &t) {
                Ok((in_k, inside)) if in_k == inside => None,
                Ok((in_k, inside)) => Some(format!("x in K: {in_k}, |1 - x| <= 1: {inside}")),
                Err(e) => Some(e.to_string()),
            }
        });
        verdict(vec![
            ("order norm = spectral radius, 500 hermitian".into(), norm_fail),
            ("C*-identity, 500 general".into(), cstar_fail),
            ("geometric series tail bounds".into(), series_fail),
            ("100 random summable series".into(), random_series),
            ("unit-ball characterization, 500 samples".into(), ball_fail),
        ])
    })
}

/// One increasing-sequence case: the sequence, its bound, and the oracle
/// supremum (the limit or the last term).
fn matrix_sequence(seed: u64, i: usize) -> (IncreasingSequence<MatrixElement>, MatrixElement, MatrixElement) {
    let mut rng = sample_rng(seed, 61, i as u64);
    let n = dim(i, 6);
    if i.is_multiple_of(2) {
        let a = sample::psd_with_spectrum(&mut rng, n, 0.0, 2.0);
        let terms = (1..=30).map(|k| a.scale_real(1.0 - 0.5f64.powi(k))).collect();
        let v = a.add(&sample::psd_with_spectrum(&mut rng, n, 0.0, 1.0));
        (
            IncreasingSequence {
                terms,
                limit: Some(a.clone()),
            },
            v,
            a,
        )
    } else {
        let mut acc = MatrixElement::zeros(n);
        let mut terms = Vec::new();
        for _ in 0..6 {
            acc = acc.add(&sample::psd_with_spectrum(&mut rng, n, 0.0, 0.5));
            terms.push(acc.clone());
        }
        let v = acc.add(&sample::psd_with_spectrum(&mut rng, n, 0.0, 1.0));
        (IncreasingSequence { terms, limit: None }, v, acc)
    }
}

fn stepfn_sequence(seed: u64, i: usize) -> (IncreasingSequence<StepFunction>, StepFunction, StepFunction) {
    let mut rng = sample_rng(seed, 62, i as u64);
    if i.is_multiple_of(2) {
        let count = 2 + i % 7;
        let terms: Vec<StepFunction> = (1..=count)
            .map(|k| {
                (1..=k).fold(StepFunction::real(0.0), |acc, j| {
                    acc.add(&StepFunction::point_indicator(Point::reserved(j)))
                })
            })
            .collect();
        let sup = terms.last().unwrap().clone();
        (IncreasingSequence { terms, limit: None }, StepFunction::real(1.0), sup)
    } else {
        let a = StepFnModel::default().random_positive(&mut rng);
        let terms = (1..=30).map(|k| a.scale_real(1.0 - 0.5f64.powi(k))).collect();
        let v = a.add_scalar(1.0);
        (
            IncreasingSequence {
                terms,
                limit: Some(a.clone()),
            },
            v,
            a,
        )
    }
}

pub fn lattice(seed: u64) -> Outcome {
    timed(6, "join via annihilators", None, || {
        let t = tol();
        fn join_check<E: Spectral>(x: &E, t: &Tolerance) -> Option<String> {
            let c = match JoinConstruction::build(x, t) {
                Ok(c) => c,
                Err(e) => return Some(e.to_string()),
            };
            let d = x.decompose(t).ok()?;
            let oracle = x.oracle_positive_part(&d);
            let gap = c.result.distance(&oracle, t);
            if gap > TIGHT * t.eps_eq * x.magnitude(t).max(1.0) {
                return Some(format!("positive part differs from the oracle by {gap:e}"));
            }
            c.identities(x, t)
                .into_iter()
                .find(|id| !id.holds())
                .map(|id| format!("{} residual {:e}", id.name, id.residual))
        }
        let matrix = first_failure(200, |i| {
            let mut rng = sample_rng(seed, 60, i as u64);
            join_check(&sample::hermitian(&mut rng, dim(i, 8)), &t)
        });
        let model = StepFnModel::default();
        let stepfn = first_failure(200, |i| {
            let mut rng = sample_rng(seed, 63, i as u64);
            join_check(&model.random_hermitian(&mut rng), &t)
        });
        let sup = |s: f64, got: f64| got <= LOOSE * t.eps_eq * s.max(1.0);
        let seqs = first_failure(50, |i| {
            let res = if i % 2 == 0 {
                let (seq, v, oracle) = matrix_sequence(seed, i / 2);
                sup_increasing(&seq, &v, &t).map(|s| (s.distance(&oracle, &t), oracle.magnitude(&t)))
            } else {
                let (seq, v, oracle) = stepfn_sequence(seed, i / 2);
                sup_increasing(&seq, &v, &t).map(|s| (s.distance(&oracle, &t), oracle.magnitude(&t)))
            };
            match res {
                Ok((gap, scale)) => (!sup(scale, gap)).then(|| format!("sup differs from the oracle by {gap:e}")),
                Err(e) => Some(e.to_string()),
            }
        });
        verdict(vec![
            ("positive part, 200 matrices".into(), matrix),
            ("positive part, 200 step functions".into(), stepfn),
            ("compressed suprema, 50 sequences".into(), seqs),
        ])
    })
}

pub fn masa(seed: u64) -> Outcome {
    timed(7, "maximal commutative subalgebras", None, || {
        let t = tol();
        let mut parts = Vec::new();
        for n in 2..=6 {
            let mut rng = sample_rng(seed, 70, n as u64);
            let u = sample::unitary(&mut rng, n);
            let basis: Vec<_> = (0..n).map(|k| u.as_matrix().column(k).into_owned()).collect();
            let r = masa_check(&basis, seed, 100, &t);
            let bad = r.failures().next().map(|f| (0, format!("{}: {}", f.name, f.detail)));
            parts.push((format!("random basis n={n}"), bad));
        }
        let scalars = masa_check_projections(&[MatrixElement::identity(3)], seed, 10, &t);
        let flagged = scalars
            .get("masa.maximal")
            .is_some_and(|r| !r.pass && !r.witness.is_empty());
        parts.push((
            "C 1 flagged as not maximal".into(),
            (!flagged).then(|| (0, "scalar algebra was not flagged".into())),
        ));
        verdict(parts)
    })
}

fn family_check<E: Spectral>(x: &E, t: &Tolerance) -> Option<String> {
    match SpectralFamily::new(x, t) {
        Ok(f) => f
            .verify(t)
            .into_iter()
            .find(|r| !r.pass)
            .map(|r| format!("{}: {}", r.name, r.detail)),
        Err(e) => Some(e.to_string()),
    }
}

/// Reconstruction on nested grids with meshes 1, 0.1, 0.01 (left tags).
fn reconstruction_chain<E: Spectral>(x: &E, t: &Tolerance) -> Option<String> {
    let f = match SpectralFamily::new(x, t) {
        Ok(f) => f,
        Err(e) => return Some(e.to_string()),
    };
    let lo = f.min().floor() - 1.0;
    let hi = f.max().ceil() + 1.0;
    let mut last = f64::INFINITY;
    for denom in [1u32, 10, 100] {
        let cells = ((hi - lo) as usize) * denom as usize;
        let p = match Partition::regular(lo, denom, cells, TagRule::Left) {
            Ok(p) => p,
            Err(e) => return Some(e.to_string()),
        };
        match f.reconstruct(&p, t) {
            Ok(r) => {
                if r.error > r.mesh + TIGHT * t.eps_eq {
                    return Some(format!("error {} exceeds mesh {}", r.error, r.mesh));
                }
                if r.error > last + TIGHT * t.eps_eq {
                    return Some(format!("error grew from {last} to {} under refinement", r.error));
                }
                last = r.error;
            }
            Err(e) => return Some(e.to_string()),
        }
    }
    None
}

pub fn spectral(seed: u64) -> Outcome {
    timed(8, "spectral families", Some(LIMIT_SPECTRAL), || {
        let t = tol();
        let families = first_failure(200, |i| {
            let mut rng = sample_rng(seed, 80, i as u64);
            family_check(&sample::hermitian(&mut rng, dim(i, 8)), &t)
        });
        let riemann = first_failure(200, |i| {
            let mut rng = sample_rng(seed, 80, i as u64);
            reconstruction_chain(&sample::hermitian(&mut rng, dim(i, 8)), &t)
        });
        let model = StepFnModel::default();
        let functions = first_failure(50, |i| {
            let mut rng = sample_rng(seed, 81, i as u64);
            let x = model.random_hermitian(&mut rng);
            family_check(&x, &t).or_else(|| {
                let f = SpectralFamily::new(&x, &t).ok()?;
                let p = Partition::covering(f.min(), f.max(), 0.1, TagRule::Left).ok()?;
                match f.reconstruct(&p, &t) {
                    Ok(r) if r.error <= r.mesh + TIGHT * t.eps_eq => None,
                    Ok(r) => Some(format!("error {} exceeds mesh {}", r.error, r.mesh)),
                    Err(e) => Some(e.to_string()),
                }
            })
        });
        // value n at p_n, plus one exception
        let unbounded = StepFunction::with_exceptions(
            crate::algebra::C64::new(0.0, 0.0),
            &[("0.3", crate::algebra::C64::new(-2.0, 0.0))],
        )
        .map(|f| f.with_tail(TailExpr::index()));
        let unbounded_fail = match unbounded {
            Ok(x) => family_check(&x, &t).or_else(|| {
                let f = SpectralFamily::new(&x, &t).ok()?;
                let p = Partition::covering(f.min(), f.max(), 1.0, TagRule::Left).ok()?;
                match f.reconstruct(&p, &t) {
                    Err(Error::NotBounded) => None,
                    _ => Some("unbounded element was not rejected".into()),
                }
            }),
            Err(e) => Some(e.to_string()),
        };
        verdict(vec![
            ("family properties and uniqueness, 200 hermitian matrices".into(), families),
            ("reconstruction, meshes 1/0.1/0.01".into(), riemann),
            ("50 step functions".into(), functions),
            ("tail-unbounded function".into(), unbounded_fail.map(|m| (0, m))),
        ])
    })
}

pub fn non_baer() -> Outcome {
    timed(9, "non-Baer witness", None, || {
        let r = not_baer_witness();
        let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
        let detail = r
            .checks
            .iter()
            .map(|c| format!("{}: {}", c.name, if c.pass { "ok" } else { "FAILED" }))
            .collect::<Vec<_>>()
            .join("; ");
        let complete = [
            "baer.projection_support_tags",
            "baer.countable_family",
            "baer.cocountable_family",
            "baer.uncountable_family",
        ]
        .iter()
        .all(|n| names.contains(n));
        (r.all_pass() && complete, detail)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_criteria_pass() {
        for o in [rickart_condition(3), masa(3), non_baer()] {
            assert!(o.pass, "{}: {}", o.name, o.detail);
        }
    }
}
