//! The model-independent contract of an ordered *-algebra.
//!
//! Every executable model implements [`Element`]; the order, the lattice
//! operations, the order norm and the audit harness are written once
//! against this trait.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::document::ElementDocument;
use crate::error::Result;
use crate::norm::State;
use crate::tolerance::Tolerance;

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

/// Capability flags and size information for a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraContract {
    pub model: String,
    pub dimension: String,
    pub has_commutant: bool,
    pub has_symbolic_tail: bool,
}

/// An element of a concrete *-algebra with unit.
///
/// Arithmetic methods panic on operands of different shapes, like the
/// matrix libraries they wrap; use [`Element::check_compatible`] on
/// untrusted input first.
pub trait Element: Clone + fmt::Debug + Send + Sync + Sized {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, alpha: C64) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn star(&self) -> Self;

    fn check_compatible(&self, other: &Self) -> Result<()>;

    /// Sup-distance over entries (matrices) or probe points (functions).
    fn distance(&self, other: &Self, tol: &Tolerance) -> f64;

    /// Cone membership, decided by the model's spectral or pointwise
    /// characterization of finite sums of `x* x`.
    fn in_cone(&self, tol: &Tolerance) -> bool;

    /// Smallest "spectral value" of a hermitian element (eigenvalue or
    /// probe value). Used for diagnostics.
    fn min_spectral_value(&self, tol: &Tolerance) -> Result<f64>;

    /// The positive square root lying in the bicommutant.
    fn sqrt_psd(&self, tol: &Tolerance) -> Result<Self>;

    /// Least projection `e` with `x e = x`; `r(x) = (1 - e) T`.
    fn right_projection(&self, tol: &Tolerance) -> Self;

    /// An upper bound `L` with `-L·1 <= a, b <= L·1` for the hermitian
    /// parts, or `None` if the element is unbounded.
    fn order_bracket(&self, tol: &Tolerance) -> Option<f64>;

    fn apply_state(&self, state: &State) -> Result<C64>;

    fn to_document(&self) -> ElementDocument;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }

    fn scale_real(&self, r: f64) -> Self {
        self.scale(C64::new(r, 0.0))
    }

    fn add_scalar(&self, r: f64) -> Self {
        self.add(&self.one_like().scale_real(r))
    }

    fn magnitude(&self, tol: &Tolerance) -> f64 {
        self.distance(&self.zero_like(), tol)
    }

    fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        self.distance(other, tol) <= tol.eps_eq
    }

    fn hermitian_defect(&self, tol: &Tolerance) -> f64 {
        self.distance(&self.star(), tol)
    }

    fn is_hermitian(&self, tol: &Tolerance) -> bool {
        self.hermitian_defect(tol) <= tol.eps_eq * self.magnitude(tol).max(1.0)
    }

    fn require_hermitian(&self, tol: &Tolerance) -> Result<()> {
        let defect = self.hermitian_defect(tol);
        if defect <= tol.eps_eq * self.magnitude(tol).max(1.0) {
            Ok(())
        } else {
            Err(crate::Error::NotHermitian { defect })
        }
    }

    /// `(x + x*) / 2`, exactly hermitian up to rounding.
    fn hermitian_part(&self) -> Self {
        self.add(&self.star()).scale_real(0.5)
    }
}

/// Splits `x = a + i b` with `a = (x + x*)/2` and `b = (x - x*)/(2i)`.
pub fn hermitian_parts<E: Element>(x: &E) -> (E, E) {
    let star = x.star();
    let a = x.add(&star).scale_real(0.5);
    let b = x.sub(&star).scale(C64::new(0.0, -0.5));
    (a, b)
}

pub fn in_cone<E: Element>(x: &E, tol: &Tolerance) -> bool {
    x.in_cone(tol)
}

/// `x <= y` iff `y - x` lies in the cone.
pub fn leq<E: Element>(x: &E, y: &E, tol: &Tolerance) -> bool {
    y.sub(x).in_cone(tol)
}

/// Two-sided comparison helper: `lo <= x <= hi`.
pub fn between<E: Element>(lo: &E, x: &E, hi: &E, tol: &Tolerance) -> bool {
    leq(lo, x, tol) && leq(x, hi, tol)
}

/// `x*x`.
pub fn star_square<E: Element>(x: &E) -> E {
    x.star().mul(x)
}

/// Commutator `xy - yx`.
pub fn commutator<E: Element>(x: &E, y: &E) -> E {
    x.mul(y).sub(&y.mul(x))
}
