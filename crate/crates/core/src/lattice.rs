//! Lattice operations on hermitian elements built from annihilator
//! projections, and suprema of increasing sequences by compression.

use crate::algebra::{leq, Element};
use crate::error::{Error, Result};
use crate::norm::{fr_sup, order_norm, DominatedSeries};
use crate::tolerance::Tolerance;

/// The pieces of the positive-part construction for hermitian `x`:
/// `y = sqrt(x^2)`, `a = (y + x)/2`, `b = (y - x)/2`, `e = 1 - RP(b)`
/// (so `r(b) = eT`), `f = 1 - RP(x + b)` (so `r(x + b) = fT`), and
/// `result = y e = x v 0`.
#[derive(Debug, Clone)]
pub struct JoinConstruction<E> {
    pub y: E,
    pub a: E,
    pub b: E,
    pub e: E,
    pub f: E,
    pub result: E,
}

/// Residual of one identity of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Identity {
    pub name: &'static str,
    pub residual: f64,
    pub bound: f64,
}

impl Identity {
    pub fn holds(&self) -> bool {
        self.residual <= self.bound
    }
}

impl<E: Element> JoinConstruction<E> {
    pub fn build(x: &E, tol: &Tolerance) -> Result<Self> {
        x.require_hermitian(tol)?;
        let x = x.hermitian_part();
        let y = x.mul(&x).hermitian_part().sqrt_psd(tol)?;
        let a = y.add(&x).scale_real(0.5);
        let b = y.sub(&x).scale_real(0.5);
        let one = x.one_like();
        let e = one.sub(&b.right_projection(tol));
        let f = one.sub(&x.add(&b).right_projection(tol));
        let result = y.mul(&e).hermitian_part();
        Ok(Self { y, a, b, e, f, result })
    }

    /// `xe = ye`, `xf = -yf`, `(1 - e)(1 - f) = 0`, and `a = x + b`, each
    /// with a bound of `10 eps_eq max(1, |x|)`.
    pub fn identities(&self, x: &E, tol: &Tolerance) -> Vec<Identity> {
        let one = x.one_like();
        let bound = 10.0 * tol.eps_eq * x.magnitude(tol).max(1.0);
        let res = |l: E, r: E| l.distance(&r, tol);
        vec![
            Identity {
                name: "xe = ye",
                residual: res(x.mul(&self.e), self.y.mul(&self.e)),
                bound,
            },
            Identity {
                name: "xf = -yf",
                residual: res(x.mul(&self.f), self.y.mul(&self.f).neg()),
                bound,
            },
            Identity {
                name: "(1-e)(1-f) = 0",
                residual: res(one.sub(&self.e).mul(&one.sub(&self.f)), one.zero_like()),
                bound,
            },
            Identity {
                name: "x + b = a",
                residual: res(x.add(&self.b), self.a.clone()),
                bound,
            },
        ]
    }
}

/// `x v 0` through the annihilator construction.
pub fn positive_part<E: Element>(x: &E, tol: &Tolerance) -> Result<E> {
    Ok(JoinConstruction::build(x, tol)?.result)
}

/// `|x| = sqrt(x^2)` for hermitian `x`.
pub fn abs<E: Element>(x: &E, tol: &Tolerance) -> Result<E> {
    x.require_hermitian(tol)?;
    let x = x.hermitian_part();
    x.mul(&x).hermitian_part().sqrt_psd(tol)
}

/// `x v z = (x - z) v 0 + z`.
pub fn join<E: Element>(x: &E, z: &E, tol: &Tolerance) -> Result<E> {
    x.check_compatible(z)?;
    Ok(positive_part(&x.sub(z), tol)?.add(z))
}

/// `x ^ z = -((-x) v (-z))`.
pub fn meet<E: Element>(x: &E, z: &E, tol: &Tolerance) -> Result<E> {
    Ok(join(&x.neg(), &z.neg(), tol)?.neg())
}

/// An increasing sequence given by a finite prefix and, optionally, the
/// element its terms converge to.
#[derive(Debug, Clone)]
pub struct IncreasingSequence<E> {
    pub terms: Vec<E>,
    pub limit: Option<E>,
}

/// The supremum with the intermediate compression data.
#[derive(Debug, Clone)]
pub struct CompressedSup<E> {
    pub sup: E,
    pub w: E,
    pub w_inv: E,
    pub compressed_sup: E,
}

/// Least upper bound of `0 <= x_1 <= x_2 <= ... <= v`.
///
/// The sequence is compressed by `w^-1 = sqrt(v^2 + 1) - v` into the
/// bounded part, where the supremum is an FR supremum of the increments,
/// and decompressed by `w = sqrt(v^2 + 1) + v`.
pub fn sup_increasing<E: Element>(seq: &IncreasingSequence<E>, v: &E, tol: &Tolerance) -> Result<E> {
    Ok(sup_increasing_detail(seq, v, tol)?.sup)
}

pub fn sup_increasing_detail<E: Element>(
    seq: &IncreasingSequence<E>,
    v: &E,
    tol: &Tolerance,
) -> Result<CompressedSup<E>> {
    let Some(first) = seq.terms.first() else {
        return Err(Error::schema("terms", "empty sequence"));
    };
    v.require_hermitian(tol)?;
    for x in seq.terms.iter().chain(seq.limit.iter()) {
        x.check_compatible(v)?;
        x.require_hermitian(tol)?;
    }
    // index 1 fails when x_1 is not positive
    let mut prev = first.zero_like();
    for (k, x) in seq.terms.iter().chain(seq.limit.iter()).enumerate() {
        if !leq(&prev, x, tol) {
            return Err(Error::NotIncreasing { index: k + 1 });
        }
        if !leq(x, v, tol) {
            return Err(Error::NotDominated { index: k + 1 });
        }
        prev = x.clone();
    }

    let v = v.hermitian_part();
    let s = v.mul(&v).add_scalar(1.0).hermitian_part().sqrt_psd(tol)?;
    let w = s.add(&v);
    let w_inv = s.sub(&v);
    let one = v.one_like();
    let scale = w.magnitude(tol).max(1.0) * w_inv.magnitude(tol).max(1.0);
    if w.mul(&w_inv).distance(&one, tol) > 10.0 * tol.eps_eq * scale {
        return Err(Error::Numerical("w w^-1 != 1".into()));
    }
    if !leq(&w_inv, &one, tol) {
        return Err(Error::Numerical("w^-1 exceeds 1".into()));
    }

    let compress = |x: &E| w_inv.mul(x).mul(&w_inv).hermitian_part();
    let compressed: Vec<E> = seq.terms.iter().chain(seq.limit.iter()).map(compress).collect();
    let mut increments = Vec::with_capacity(compressed.len());
    let mut prev = first.zero_like();
    for (k, c) in compressed.iter().enumerate() {
        if !leq(c, &w_inv, tol) {
            return Err(Error::Numerical(format!("compressed term {} exceeds w^-1", k + 1)));
        }
        increments.push(c.sub(&prev).hermitian_part());
        prev = c.clone();
    }
    let eps = increments
        .iter()
        .map(|d| order_norm(d, tol).map(|n| n + tol.eps_psd))
        .collect::<Result<Vec<_>>>()?;
    let compressed_sup = fr_sup(&DominatedSeries::finite(increments, eps), tol)?;
    let sup = w.mul(&compressed_sup).mul(&w).hermitian_part();
    Ok(CompressedSup {
        sup,
        w,
        w_inv,
        compressed_sup,
    })
}
