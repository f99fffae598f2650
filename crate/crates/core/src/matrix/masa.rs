use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{commutant, right_projection, sample, CommutantBasis, MatrixElement};
use crate::algebra::{commutator, Element, C64};
use crate::audit::run_check;
use crate::norm::{fr_sup, DominatedSeries};
use crate::report::{AxiomReport, CheckRecord};
use crate::tolerance::Tolerance;

/// Checks that the span of the rank-one projections `v_k v_k*` of an
/// orthonormal basis is a maximal commutative *-subalgebra on which the
/// right projection, square root and series suprema stay inside.
pub fn masa_check(basis: &[DVector<C64>], seed: u64, samples: usize, tol: &Tolerance) -> AxiomReport {
    let projs: Vec<MatrixElement> = basis.iter().map(|v| MatrixElement::outer(v, v)).collect();
    masa_check_projections(&projs, seed, samples, tol)
}

/// As [`masa_check`], for the algebra spanned by a family of mutually
/// orthogonal projections summing to 1 (not necessarily rank one).
pub fn masa_check_projections(projs: &[MatrixElement], seed: u64, samples: usize, tol: &Tolerance) -> AxiomReport {
    let mut report = AxiomReport::new(seed, samples);
    let wit = |xs: &[&MatrixElement]| xs.iter().map(|x| x.to_document()).collect::<Vec<_>>();
    let Some(first) = projs.first() else {
        report.push(CheckRecord::fail("masa.family", "empty projection family", vec![]));
        return report;
    };
    let n = first.n();
    if projs.iter().any(|p| p.n() != n) {
        report.push(CheckRecord::fail("masa.family", "dimension mismatch", vec![]));
        return report;
    }

    let mut family_ok = true;
    for (i, p) in projs.iter().enumerate() {
        if !(p.approx_eq(&p.star(), tol) && p.approx_eq(&p.mul(p), tol)) {
            report.push(CheckRecord::fail(
                "masa.family",
                format!("member {i} is not a projection"),
                wit(&[p]),
            ));
            family_ok = false;
        }
        for q in &projs[i + 1..] {
            if !p.mul(q).approx_eq(&p.zero_like(), tol) {
                report.push(CheckRecord::fail(
                    "masa.family",
                    "members are not orthogonal",
                    wit(&[p, q]),
                ));
                family_ok = false;
            }
        }
    }
    let total = projs.iter().skip(1).fold(first.clone(), |a, p| a.add(p));
    if !total.approx_eq(&first.one_like(), &tol_scaled(tol)) {
        report.push(CheckRecord::fail(
            "masa.family",
            "members do not sum to 1",
            wit(&[&total]),
        ));
        family_ok = false;
    }
    if !family_ok {
        return report;
    }
    report.push(CheckRecord::pass(
        "masa.family",
        format!("{} orthogonal projections", projs.len()),
    ));

    let b = match CommutantBasis::span_of(projs, tol) {
        Ok(b) => b,
        Err(e) => {
            report.push(CheckRecord::fail("masa.span", e.to_string(), vec![]));
            return report;
        }
    };

    let pairs_commute = projs.iter().enumerate().all(|(i, p)| {
        projs[i + 1..]
            .iter()
            .all(|q| commutator(p, q).approx_eq(&p.zero_like(), tol))
    });
    report.push(if pairs_commute {
        CheckRecord::pass("masa.commutative", format!("dimension {}", b.dimension()))
    } else {
        CheckRecord::fail("masa.commutative", "generators do not commute", vec![])
    });

    match commutant(projs, tol) {
        Ok(c) if c.dimension() == b.dimension() && c.is_subspace_of(&b, tol) => report.push(CheckRecord::pass(
            "masa.maximal",
            format!("commutant dimension {} equals the algebra", c.dimension()),
        )),
        Ok(c) => {
            let outside: Vec<&MatrixElement> = c.members().iter().filter(|m| !b.contains(m, tol)).take(1).collect();
            report.push(CheckRecord::fail(
                "masa.maximal",
                format!(
                    "commutant has dimension {} but the algebra has dimension {}",
                    c.dimension(),
                    b.dimension()
                ),
                wit(&outside),
            ))
        }
        Err(e) => report.push(CheckRecord::fail("masa.maximal", e.to_string(), vec![])),
    }

    let random_member = |rng: &mut ChaCha8Rng, positive: bool| -> (MatrixElement, Vec<C64>) {
        let coeffs: Vec<C64> = projs
            .iter()
            .map(|_| {
                if rng.random_bool(0.3) {
                    C64::new(0.0, 0.0)
                } else if positive {
                    C64::new(rng.random_range(0.0..4.0), 0.0)
                } else {
                    sample::complex_normal(rng)
                }
            })
            .collect();
        let x = projs
            .iter()
            .zip(&coeffs)
            .fold(first.zero_like(), |acc, (p, c)| acc.add(&p.scale(*c)));
        (x, coeffs)
    };

    report.push(run_check("masa.star_closed", seed, 101, samples, |rng| {
        let (x, _) = random_member(rng, false);
        if b.contains(&x.star(), tol) {
            Ok(())
        } else {
            Err(("x* left the algebra".into(), wit(&[&x])))
        }
    }));

    report.push(run_check("masa.rp_agreement", seed, 102, samples, |rng| {
        let (x, _) = random_member(rng, false);
        let rp_t = right_projection(&x, tol).into_element();
        // RP inside B: sum of the generators on which x has a non-zero coefficient
        let rp_b = projs.iter().fold(first.zero_like(), |acc, p| {
            let c = p.mul(&x).trace() / p.trace();
            if c.norm() > tol.eps_eq {
                acc.add(p)
            } else {
                acc
            }
        });
        if !b.contains(&rp_t, tol) {
            return Err(("RP_T(x) is outside the algebra".into(), wit(&[&x, &rp_t])));
        }
        if rp_t.approx_eq(&rp_b, tol) {
            Ok(())
        } else {
            Err(("RP_B(x) != RP_T(x)".into(), wit(&[&x, &rp_t, &rp_b])))
        }
    }));

    report.push(run_check("masa.psr", seed, 103, samples, |rng| {
        let (x, _) = random_member(rng, true);
        let y = x.sqrt_psd(tol).map_err(|e| (e.to_string(), wit(&[&x])))?;
        if !b.contains(&y, tol) {
            return Err(("square root left the algebra".into(), wit(&[&x, &y])));
        }
        if y.mul(&y).distance(&x, tol) > 10.0 * tol.eps_eq * x.magnitude(tol).max(1.0) || !y.in_cone(tol) {
            return Err(("bad square root".into(), wit(&[&x, &y])));
        }
        Ok(())
    }));

    report.push(run_check("masa.fr", seed, 104, samples, |rng| {
        let len = rng.random_range(1..=6);
        let mut terms = Vec::new();
        let mut eps = Vec::new();
        for k in 1..=len {
            let e = 0.5f64.powi(k);
            let coeffs: Vec<f64> = projs.iter().map(|_| rng.random_range(0.0..=e)).collect();
            terms.push(
                projs
                    .iter()
                    .zip(&coeffs)
                    .fold(first.zero_like(), |acc, (p, &c)| acc.add(&p.scale_real(c))),
            );
            eps.push(e);
        }
        let series = DominatedSeries::finite(terms, eps);
        let sup = fr_sup(&series, tol).map_err(|e| (e.to_string(), wit(&series.terms.iter().collect::<Vec<_>>())))?;
        if b.contains(&sup, tol) {
            Ok(())
        } else {
            Err(("series supremum left the algebra".into(), wit(&[&sup])))
        }
    }));

    report
}

fn tol_scaled(tol: &Tolerance) -> Tolerance {
    Tolerance {
        eps_eq: 10.0 * tol.eps_eq,
        ..*tol
    }
}
