//! Randomized, seeded audit of the axioms against any model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{leq, star_square, AlgebraContract, Element};
use crate::document::ElementDocument;
use crate::norm::{fr_sup, DominatedSeries, GeometricTail};
use crate::report::{AxiomReport, CheckRecord};
use crate::tolerance::Tolerance;

/// A concrete model: random generators plus the model-specific parts of
/// the audit (spanning sets for annihilators, bicommutants).
pub trait Model: Sync {
    type Elem: Element;

    fn contract(&self) -> AlgebraContract;

    fn random_element(&self, rng: &mut ChaCha8Rng) -> Self::Elem;

    fn random_hermitian(&self, rng: &mut ChaCha8Rng) -> Self::Elem {
        self.random_element(rng).hermitian_part()
    }

    /// A finite sum of `x* x`.
    fn random_positive(&self, rng: &mut ChaCha8Rng) -> Self::Elem {
        let terms = rng.random_range(1..=3);
        let first = star_square(&self.random_element(rng));
        (1..terms).fold(first, |acc, _| acc.add(&star_square(&self.random_element(rng))))
    }

    /// Elements for the annihilator check; models override this to hit
    /// non-trivial annihilators.
    fn random_annihilator_subject(&self, rng: &mut ChaCha8Rng) -> Self::Elem {
        self.random_element(rng)
    }

    /// A set spanning the algebra (or a probe-dense part of it) on which
    /// `r(x) = (1 - RP(x)) T` is checked.
    fn spanning_set(&self, x: &Self::Elem, tol: &Tolerance) -> Vec<Self::Elem>;

    /// Residual of `y` against `{x}''`, or `None` if the model does not
    /// compute commutants.
    fn bicommutant_residual(&self, x: &Self::Elem, y: &Self::Elem, tol: &Tolerance) -> Option<f64>;
}

/// Per-sample generator: independent of scheduling, so parallel runs are
/// reproducible.
pub fn sample_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

type SampleResult = std::result::Result<(), (String, Vec<ElementDocument>)>;

/// Runs `check` on `samples` seeded draws; the record carries the first
/// failing sample (by index) and its witness.
pub fn run_check<F>(name: &str, seed: u64, stream: u64, samples: usize, check: F) -> CheckRecord
where
    F: Fn(&mut ChaCha8Rng) -> SampleResult + Sync,
{
    let failure = (0..samples)
        .into_par_iter()
        .map(|i| (i, check(&mut sample_rng(seed, stream, i as u64))))
        .filter_map(|(i, r)| r.err().map(|e| (i, e)))
        .min_by_key(|(i, _)| *i);
    match failure {
        None => CheckRecord::pass(name, format!("{samples} samples")),
        Some((i, (detail, witness))) => {
            CheckRecord::fail(name, format!("sample {i} (stream {stream}): {detail}"), witness)
        }
    }
}

fn near_zero<E: Element>(x: &E, scale: f64, tol: &Tolerance) -> bool {
    x.magnitude(tol) <= 10.0 * tol.eps_eq * scale.max(1.0)
}

pub fn audit_axioms<M: Model>(model: &M, seed: u64, samples: usize, tol: &Tolerance) -> AxiomReport {
    audit_axioms_with(model, seed, samples, tol, &[])
}

/// The cone checks alone: closure under sums and non-negative scaling,
/// and `K ∩ (-K) = {0}`.
pub fn audit_cone<M: Model>(model: &M, seed: u64, samples: usize, tol: &Tolerance) -> Vec<CheckRecord> {
    let samples = samples.max(1);
    let wit = |xs: &[&M::Elem]| xs.iter().map(|x| x.to_document()).collect::<Vec<_>>();
    let mut out = Vec::new();
    out.push(run_check("cone.closed_under_sum", seed, 1, samples, |rng| {
        let x = model.random_positive(rng);
        let y = model.random_positive(rng);
        if x.add(&y).in_cone(tol) {
            Ok(())
        } else {
            Err(("x + y left the cone".into(), wit(&[&x, &y])))
        }
    }));

    out.push(run_check("cone.closed_under_scaling", seed, 2, samples, |rng| {
        let x = model.random_positive(rng);
        let l: f64 = rng.random_range(0.0..10.0);
        if x.scale_real(l).in_cone(tol) {
            Ok(())
        } else {
            Err((format!("{l} * x left the cone"), wit(&[&x])))
        }
    }));

    out.push(run_check("cone.proper", seed, 3, samples, |rng| {
        let x = match rng.random_range(0..4) {
            0 => model.random_hermitian(rng),
            1 => model.random_positive(rng),
            2 => model.random_element(rng),
            _ => model.random_element(rng).zero_like(),
        };
        if x.in_cone(tol) && x.neg().in_cone(tol) && x.magnitude(tol) > tol.eps_eq {
            Err(("x and -x both in the cone but x != 0".into(), wit(&[&x])))
        } else {
            Ok(())
        }
    }));
    out
}

/// Like [`audit_axioms`], additionally checking elements the caller
/// asserts to be positive.
pub fn audit_axioms_with<M: Model>(
    model: &M,
    seed: u64,
    samples: usize,
    tol: &Tolerance,
    asserted_positive: &[M::Elem],
) -> AxiomReport {
    let samples = samples.max(1);
    let mut report = AxiomReport::new(seed, samples);
    let wit = |xs: &[&M::Elem]| xs.iter().map(|x| x.to_document()).collect::<Vec<_>>();

    for record in audit_cone(model, seed, samples, tol) {
        report.push(record);
    }

    report.push(run_check("psr.square_root", seed, 4, samples, |rng| {
        let x = model.random_positive(rng);
        let y = match x.sqrt_psd(tol) {
            Ok(y) => y,
            Err(e) => return Err((e.to_string(), wit(&[&x]))),
        };
        if !y.in_cone(tol) {
            return Err(("square root not positive".into(), wit(&[&x, &y])));
        }
        let scale = x.magnitude(tol);
        if y.mul(&y).distance(&x, tol) > 10.0 * tol.eps_eq * scale.max(1.0) {
            return Err(("y^2 != x".into(), wit(&[&x, &y])));
        }
        Ok(())
    }));

    if model.contract().has_commutant {
        report.push(run_check("psr.in_bicommutant", seed, 5, samples, |rng| {
            let x = model.random_positive(rng);
            let y = x.sqrt_psd(tol).map_err(|e| (e.to_string(), wit(&[&x])))?;
            let r = model.bicommutant_residual(&x, &y, tol).unwrap_or(0.0);
            if r <= 10.0 * tol.eps_eq * y.magnitude(tol).max(1.0) {
                Ok(())
            } else {
                Err((format!("residual {r:e} against {{x}}''"), wit(&[&x, &y])))
            }
        }));
    }

    report.push(run_check("fr.supremum", seed, 6, samples, |rng| {
        let series = random_dominated_series(model, rng);
        let all = || {
            let mut v: Vec<&M::Elem> = series.terms.iter().collect();
            if let Some(t) = &series.tail {
                v.push(&t.first);
            }
            wit(&v)
        };
        let sup = fr_sup(&series, tol).map_err(|e| (e.to_string(), all()))?;
        let zero = sup.zero_like();
        let mut tail_eps: f64 =
            series.eps.iter().sum::<f64>() + series.tail.as_ref().map_or(0.0, |t| t.first_eps / (1.0 - t.ratio));
        for k in 0..=series.terms.len() {
            let s = series.partial_sum(k, &zero);
            if !leq(&s, &sup, tol) {
                return Err((format!("partial sum {k} exceeds the supremum"), all()));
            }
            // 0 <= sup - s_k <= (sum_{n>k} eps_n) 1
            if !leq(&sup.sub(&s), &zero.one_like().scale_real(tail_eps), tol) {
                return Err((format!("tail after {k} terms exceeds its bound"), all()));
            }
            if k < series.eps.len() {
                tail_eps -= series.eps[k];
            }
        }
        Ok(())
    }));

    report.push(run_check("rickart.annihilator", seed, 7, samples, |rng| {
        let x = model.random_annihilator_subject(rng);
        let rp = x.right_projection(tol);
        let ann = rp.one_like().sub(&rp);
        let xs = x.magnitude(tol);
        if !(rp.approx_eq(&rp.star(), tol) && rp.approx_eq(&rp.mul(&rp), tol)) {
            return Err(("RP(x) is not a projection".into(), wit(&[&x, &rp])));
        }
        if !x.mul(&rp).approx_eq(&x, &tol_scaled(tol, xs)) {
            return Err(("x RP(x) != x".into(), wit(&[&x, &rp])));
        }
        for y in model.spanning_set(&x, tol) {
            let ys = y.magnitude(tol);
            let kills = near_zero(&x.mul(&y), xs * ys, tol);
            let rp_kills = near_zero(&rp.mul(&y), ys, tol);
            if kills != rp_kills {
                return Err(("x y = 0 disagrees with RP(x) y = 0".into(), wit(&[&x, &y])));
            }
            if !near_zero(&x.mul(&ann.mul(&y)), xs * ys, tol) {
                return Err(("(1 - RP(x)) y not annihilated by x".into(), wit(&[&x, &y])));
            }
        }
        Ok(())
    }));

    if !asserted_positive.is_empty() {
        let bad: Vec<&M::Elem> = asserted_positive.iter().filter(|x| !x.in_cone(tol)).collect();
        report.push(if bad.is_empty() {
            CheckRecord::pass("cone.asserted_members", format!("{} elements", asserted_positive.len()))
        } else {
            let detail = bad
                .iter()
                .map(|x| match x.min_spectral_value(tol) {
                    Ok(m) => format!("min spectral value {m:e}"),
                    Err(e) => e.to_string(),
                })
                .collect::<Vec<_>>()
                .join("; ");
            CheckRecord::fail(
                "cone.asserted_members",
                format!("asserted element outside the cone: {detail}"),
                wit(&bad),
            )
        });
    }

    report
}

fn tol_scaled(tol: &Tolerance, scale: f64) -> Tolerance {
    Tolerance {
        eps_eq: 10.0 * tol.eps_eq * scale.max(1.0),
        ..*tol
    }
}

/// Random series `0 <= x_n <= eps_n 1` with `eps_n = c 2^-n`, sometimes
/// with a geometric tail.
pub fn random_dominated_series<M: Model>(model: &M, rng: &mut ChaCha8Rng) -> DominatedSeries<M::Elem> {
    let len = rng.random_range(1..=6);
    let c: f64 = rng.random_range(0.1..2.0);
    let tol = Tolerance::default();
    let bounded_positive = |eps: f64, rng: &mut ChaCha8Rng| {
        let p = model.random_positive(rng);
        let bracket = p.order_bracket(&tol).unwrap_or(1.0).max(f64::MIN_POSITIVE);
        let u: f64 = rng.random_range(0.0..=1.0);
        p.scale_real(eps * u / bracket)
    };
    let eps: Vec<f64> = (1..=len).map(|n| c * 0.5f64.powi(n)).collect();
    let terms = eps.iter().map(|&e| bounded_positive(e, rng)).collect();
    let tail = if rng.random_bool(0.5) {
        let first_eps = c * 0.5f64.powi(len + 1);
        Some(GeometricTail {
            first: bounded_positive(first_eps, rng),
            first_eps,
            ratio: rng.random_range(0.0..0.9),
        })
    } else {
        None
    };
    DominatedSeries { terms, eps, tail }
}
