//! The bounded subalgebra and its order norm.
//!
//! `order_norm` computes `inf { l >= 0 : -l <= x <= l }` by bisection with
//! the order as the only oracle. Series suprema, the C*-identity and the
//! state-induced norm are built on top of it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{between, hermitian_parts, leq, star_square, Element, C64};
use crate::cocountable::{Probe, StepFunction};
use crate::error::{Error, Result};
use crate::matrix::{sample, MatrixElement};
use crate::tolerance::Tolerance;

/// Number of halvings in the order bisection.
pub const BISECTION_STEPS: usize = 60;

/// A state (positive normalized functional) in one of the two models.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    /// Vector state `x -> <xi, x xi>` for a unit vector `xi`.
    Vector(Vec<C64>),
    /// Probability weights on probe points (the generic point carries the
    /// default value's mass).
    Weights(Vec<(Probe, f64)>),
}

impl State {
    pub fn vector(xi: &[C64]) -> Self {
        let norm = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        State::Vector(xi.iter().map(|z| z / norm).collect())
    }

    /// Point mass.
    pub fn at(probe: Probe) -> Self {
        State::Weights(vec![(probe, 1.0)])
    }

    /// Normalizes non-negative weights to total mass one.
    pub fn weights(atoms: Vec<(Probe, f64)>) -> Self {
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        State::Weights(atoms.into_iter().map(|(p, w)| (p, w / total)).collect())
    }
}

/// An element with a certified bound `-l <= a, b <= l` on its hermitian parts.
#[derive(Debug, Clone)]
pub struct BoundedCertificate<E> {
    pub element: E,
    pub lambda: f64,
}

impl<E: Element> BoundedCertificate<E> {
    pub fn verify(&self, tol: &Tolerance) -> bool {
        let (a, b) = hermitian_parts(&self.element);
        let hi = self.element.one_like().scale_real(self.lambda);
        let lo = hi.neg();
        between(&lo, &a, &hi, tol) && between(&lo, &b, &hi, tol)
    }
}

/// Order norm of a hermitian element by bisection on `-l <= x <= l`.
fn bisect_hermitian<E: Element>(x: &E, tol: &Tolerance) -> Result<f64> {
    let sharp = tol.sharp();
    let one = x.one_like();
    let inside = |l: f64| {
        let hi = one.scale_real(l);
        between(&hi.neg(), x, &hi, &sharp)
    };
    let mut hi = x.order_bracket(tol).ok_or(Error::NotBounded)?;
    let mut tries = 0;
    while !inside(hi) {
        hi = hi.max(f64::MIN_POSITIVE) * 2.0;
        tries += 1;
        if tries > 64 {
            return Err(Error::NotBounded);
        }
    }
    let mut lo = 0.0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `||x|| = inf { l >= 0 : -l 1 <= x <= l 1 }` for hermitian `x`; for
/// other `x` the norm of the modulus `|x| = sqrt(x* x)`, so that
/// `||x||^2 = ||x* x||`.
pub fn order_norm<E: Element>(x: &E, tol: &Tolerance) -> Result<f64> {
    if x.order_bracket(tol).is_none() {
        return Err(Error::NotBounded);
    }
    if x.is_hermitian(tol) {
        bisect_hermitian(&x.hermitian_part(), tol)
    } else {
        let modulus = star_square(x).hermitian_part().sqrt_psd(tol)?;
        bisect_hermitian(&modulus, tol)
    }
}

/// Certificate with the minimal `l = max(||a||, ||b||)`, or `None` when
/// the element is unbounded.
pub fn extract_bounded<E: Element>(x: &E, tol: &Tolerance) -> Option<BoundedCertificate<E>> {
    x.order_bracket(tol)?;
    let (a, b) = hermitian_parts(x);
    let la = bisect_hermitian(&a, tol).ok()?;
    let lb = bisect_hermitian(&b, tol).ok()?;
    Some(BoundedCertificate {
        element: x.clone(),
        lambda: la.max(lb),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CstarCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `||x* x||` against `||x||^2`.
pub fn cstar_identity_check<E: Element>(x: &E, tol: &Tolerance) -> Result<CstarCheck> {
    let lhs = order_norm(&star_square(x).hermitian_part(), tol)?;
    let nx = order_norm(x, tol)?;
    let rhs = nx * nx;
    let pass = (lhs - rhs).abs() <= 100.0 * tol.eps_eq * rhs.max(1.0);
    Ok(CstarCheck { lhs, rhs, pass })
}

/// Closed unit-ball characterization of the cone: for hermitian `x` with
/// `||x|| <= 1`, returns `(x in K, ||1 - x|| <= 1)`.
pub fn unit_ball_sides<E: Element>(x: &E, tol: &Tolerance) -> Result<(bool, bool)> {
    let in_k = x.in_cone(tol);
    let d = order_norm(&x.one_like().sub(x), tol)?;
    Ok((in_k, d <= 1.0 + tol.eps_psd))
}

/// Terms beyond the explicit prefix: `x_{N+k} = first * ratio^(k-1)`,
/// dominated by `first_eps * ratio^(k-1)`.
#[derive(Debug, Clone)]
pub struct GeometricTail<E> {
    pub first: E,
    pub first_eps: f64,
    pub ratio: f64,
}

/// A series `0 <= x_n <= eps_n 1` given by a finite prefix and an
/// optional geometric tail.
#[derive(Debug, Clone)]
pub struct DominatedSeries<E> {
    pub terms: Vec<E>,
    pub eps: Vec<f64>,
    pub tail: Option<GeometricTail<E>>,
}

impl<E: Element> DominatedSeries<E> {
    pub fn finite(terms: Vec<E>, eps: Vec<f64>) -> Self {
        Self { terms, eps, tail: None }
    }

    fn tail_factor(&self) -> Result<f64> {
        match &self.tail {
            None => Ok(0.0),
            Some(t) if (0.0..1.0).contains(&t.ratio) => Ok(1.0 / (1.0 - t.ratio)),
            Some(t) => Err(Error::SeriesDiverges { ratio: t.ratio }),
        }
    }

    pub fn eps_total(&self) -> Result<f64> {
        let factor = self.tail_factor()?;
        let head: f64 = self.eps.iter().sum();
        let tail = self.tail.as_ref().map_or(0.0, |t| t.first_eps * factor);
        Ok(head + tail)
    }

    /// Checks `0 <= x_n <= eps_n 1` for every explicit term and the tail's
    /// first term.
    pub fn check_domination(&self, tol: &Tolerance) -> Result<()> {
        if self.eps.len() != self.terms.len() {
            return Err(Error::schema(
                "eps",
                format!("expected {} bounds, found {}", self.terms.len(), self.eps.len()),
            ));
        }
        let check = |index: usize, x: &E, eps: f64| -> Result<()> {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(Error::DominationViolated {
                    index,
                    detail: format!("bound {eps} is not a finite non-negative number"),
                });
            }
            if !x.in_cone(tol) {
                return Err(Error::DominationViolated {
                    index,
                    detail: "term is not positive".into(),
                });
            }
            if !leq(x, &x.one_like().scale_real(eps), tol) {
                return Err(Error::DominationViolated {
                    index,
                    detail: format!("term exceeds {eps} * 1"),
                });
            }
            Ok(())
        };
        for (k, (x, &e)) in self.terms.iter().zip(&self.eps).enumerate() {
            check(k + 1, x, e)?;
        }
        if let Some(t) = &self.tail {
            self.tail_factor()?;
            check(self.terms.len() + 1, &t.first, t.first_eps)?;
        }
        Ok(())
    }

    /// Partial sum of the first `k` explicit terms.
    pub fn partial_sum(&self, k: usize, zero: &E) -> E {
        self.terms[..k].iter().fold(zero.clone(), |acc, x| acc.add(x))
    }

    fn some_element(&self) -> Option<&E> {
        self.terms.first().or(self.tail.as_ref().map(|t| &t.first))
    }
}

/// Supremum of the partial sums of a dominated series, the object whose
/// existence the Fisher-Riesz axiom asserts. Computed as the sum of the
/// prefix plus the closed form of the geometric tail; the result is
/// checked against `(sum eps) 1`.
pub fn fr_sup<E: Element>(series: &DominatedSeries<E>, tol: &Tolerance) -> Result<E> {
    series.check_domination(tol)?;
    let factor = series.tail_factor()?;
    let Some(any) = series.some_element() else {
        return Err(Error::schema("terms", "empty series"));
    };
    let zero = any.zero_like();
    let mut sup = series.partial_sum(series.terms.len(), &zero);
    if let Some(t) = &series.tail {
        sup = sup.add(&t.first.scale_real(factor));
    }
    let cap = zero.one_like().scale_real(series.eps_total()?);
    if !leq(&sup, &cap, tol) {
        return Err(Error::DominationViolated {
            index: 0,
            detail: "supremum exceeds (sum eps) * 1".into(),
        });
    }
    Ok(sup)
}

/// `||a - s_k||` against `2 sum_{n>k} ||x_n||`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub k: usize,
    pub distance: f64,
    pub bound: f64,
}

impl TailBound {
    pub fn holds(&self, tol: &Tolerance) -> bool {
        self.distance <= self.bound + tol.eps_psd
    }
}

#[derive(Debug, Clone)]
pub struct SeriesSup<E> {
    pub sup: E,
    pub tail_bounds: Vec<TailBound>,
}

/// Supremum of a dominated series together with the completeness tail
/// estimate for every prefix length `k = 0..=N`.
pub fn series_sup<E: Element>(series: &DominatedSeries<E>, tol: &Tolerance) -> Result<SeriesSup<E>> {
    let sup = fr_sup(series, tol)?;
    let factor = series.tail_factor()?;
    let norms = series
        .terms
        .iter()
        .map(|x| order_norm(x, tol))
        .collect::<Result<Vec<_>>>()?;
    let tail_norm = match &series.tail {
        Some(t) => order_norm(&t.first, tol)? * factor,
        None => 0.0,
    };
    let zero = sup.zero_like();
    let mut tail_bounds = Vec::with_capacity(norms.len() + 1);
    let mut partial = zero.clone();
    for k in 0..=norms.len() {
        if k > 0 {
            partial = partial.add(&series.terms[k - 1]);
        }
        let remaining: f64 = norms[k..].iter().sum::<f64>() + tail_norm;
        let distance = order_norm(&sup.sub(&partial).hermitian_part(), tol)?;
        tail_bounds.push(TailBound {
            k,
            distance,
            bound: 2.0 * remaining,
        });
    }
    Ok(SeriesSup { sup, tail_bounds })
}

/// `sup_phi sqrt(phi(x* x))` over the supplied states.
pub fn state_norm<E: Element>(x: &E, states: &[State], tol: &Tolerance) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::NoStates);
    }
    if x.order_bracket(tol).is_none() {
        return Err(Error::NotBounded);
    }
    let xx = star_square(x);
    let mut best = 0.0f64;
    for s in states {
        best = best.max(xx.apply_state(s)?.re.max(0.0).sqrt());
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnsCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `phi(y* x* x y) <= ||x* x|| phi(y* y)`.
pub fn gns_inequality<E: Element>(x: &E, y: &E, state: &State, tol: &Tolerance) -> Result<GnsCheck> {
    let xx = star_square(x);
    let lhs = y.star().mul(&xx).mul(y).apply_state(state)?.re;
    let norm = order_norm(&xx.hermitian_part(), tol)?;
    let rhs = norm * star_square(y).apply_state(state)?.re;
    let holds = lhs <= rhs + 10.0 * tol.eps_eq * rhs.abs().max(1.0);
    Ok(GnsCheck { lhs, rhs, holds })
}

/// Seeded random unit-vector states plus the top eigenvector of `x* x`.
pub fn vector_states(x: &MatrixElement, count: usize, seed: u64, tol: &Tolerance) -> Result<Vec<State>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = x.n();
    let mut states: Vec<State> = (0..count)
        .map(|_| State::Vector(sample::unit_vector(&mut rng, n).iter().copied().collect()))
        .collect();
    let eig = star_square(x).hermitian_part().eig_hermitian(tol)?;
    let top = eig.vector(n - 1);
    states.push(State::Vector(top.iter().copied().collect()));
    Ok(states)
}

/// Point masses on every probe of `f` plus uniform mixtures.
pub fn probe_states(f: &StepFunction, tol: &Tolerance) -> Vec<State> {
    let probes = StepFunction::probes(&[f], tol);
    let mut states: Vec<State> = probes.iter().cloned().map(State::at).collect();
    states.push(State::weights(probes.into_iter().map(|p| (p, 1.0)).collect()));
    states
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocountable::{Point, TailExpr};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn order_norm_examples() {
        let t = tol();
        assert!((order_norm(&MatrixElement::diag(&[1.0, -3.0]), &t).unwrap() - 3.0).abs() <= 10.0 * t.eps_eq);
        assert!((order_norm(&MatrixElement::identity(3), &t).unwrap() - 1.0).abs() <= 10.0 * t.eps_eq);
        let x = MatrixElement::from_real_rows(&[&[0.0, 2.0], &[2.0, 0.0]]);
        assert!((order_norm(&x, &t).unwrap() - 2.0).abs() <= 10.0 * t.eps_eq);
        assert_eq!(order_norm(&MatrixElement::zeros(2), &t).unwrap(), 0.0);
    }

    #[test]
    fn extract_bounded_examples() {
        let t = tol();
        let c = extract_bounded(&MatrixElement::diag(&[1.0, -3.0]), &t).unwrap();
        assert!((c.lambda - 3.0).abs() < 1e-9);
        assert!(c.verify(&t));

        let f = StepFunction::with_exceptions(C64::new(2.0, 0.0), &[("0.5", C64::new(-5.0, 0.0))]).unwrap();
        let c = extract_bounded(&f, &t).unwrap();
        assert!((c.lambda - 5.0).abs() < 1e-9);

        let g = StepFunction::real(0.0).with_tail(TailExpr::index());
        assert!(extract_bounded(&g, &t).is_none());
        assert_eq!(order_norm(&g, &t), Err(Error::NotBounded));
    }

    #[test]
    fn cstar_examples() {
        let t = tol();
        let x = MatrixElement::unit(2, 0, 1);
        let c = cstar_identity_check(&x, &t).unwrap();
        assert!(c.pass && (c.lhs - 1.0).abs() < 1e-9);
        let a = MatrixElement::identity(2).scale(C64::new(1.0, 2.0));
        let c = cstar_identity_check(&a, &t).unwrap();
        assert!(c.pass && (c.lhs - 5.0).abs() < 1e-8);
    }

    #[test]
    fn geometric_series() {
        let t = tol();
        let one = MatrixElement::identity(2);
        let terms: Vec<_> = (1..=10).map(|n| one.scale_real(0.5f64.powi(n))).collect();
        let eps: Vec<_> = (1..=10).map(|n| 0.5f64.powi(n)).collect();
        let series = DominatedSeries {
            terms,
            eps,
            tail: Some(GeometricTail {
                first: one.scale_real(0.5f64.powi(11)),
                first_eps: 0.5f64.powi(11),
                ratio: 0.5,
            }),
        };
        let out = series_sup(&series, &t).unwrap();
        assert!(out.sup.approx_eq(&one, &t));
        for b in &out.tail_bounds {
            assert!((b.distance - 0.5f64.powi(b.k as i32)).abs() < 1e-9, "{b:?}");
            assert!(b.holds(&t));
        }
    }

    #[test]
    fn series_errors() {
        let t = tol();
        let one = MatrixElement::identity(2);
        let bad = DominatedSeries::finite(vec![one.scale_real(2.0)], vec![1.0]);
        assert!(matches!(
            fr_sup(&bad, &t),
            Err(Error::DominationViolated { index: 1, .. })
        ));
        let neg = DominatedSeries::finite(vec![MatrixElement::diag(&[1.0, -1.0])], vec![1.0]);
        assert!(matches!(fr_sup(&neg, &t), Err(Error::DominationViolated { .. })));
        let div = DominatedSeries {
            terms: vec![],
            eps: vec![],
            tail: Some(GeometricTail {
                first: one.clone(),
                first_eps: 1.0,
                ratio: 1.0,
            }),
        };
        assert!(matches!(fr_sup(&div, &t), Err(Error::SeriesDiverges { .. })));
    }

    #[test]
    fn state_norm_examples() {
        let t = tol();
        let x = MatrixElement::diag(&[1.0, -3.0]);
        let e2 = State::vector(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert!((state_norm(&x, &[e2], &t).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(state_norm(&x, &[], &t), Err(Error::NoStates));
        let f = StepFunction::with_exceptions(C64::new(1.0, 0.0), &[("0.5", C64::new(0.0, -2.0))]).unwrap();
        let states = probe_states(&f, &t);
        assert!((state_norm(&f, &states, &t).unwrap() - 2.0).abs() < 1e-12);
        let g = State::at(Probe::At(Point::parse("0.5").unwrap()));
        assert_eq!(f.apply_state(&g).unwrap(), C64::new(0.0, -2.0));
    }
}
