//! The full complex matrix algebra `M_n(C)`.
//!
//! Positivity, square roots and spectral projectors go through the
//! hermitian eigendecomposition; the coupled Newton (Denman-Beavers)
//! square root is kept as an independent route for cross-checking.

mod commutant;
mod masa;
mod model;
pub mod sample;

use crate::algebra::{Element, C64};
use crate::document::ElementDocument;
use crate::error::{Error, Result};
use crate::norm::State;
use crate::tolerance::Tolerance;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub use commutant::{bicommutant, commutant, CommutantBasis};
pub use masa::{masa_check, masa_check_projections};
pub use model::{contraction_adjoint_check, MatrixModel};

/// Desk-scale dimension cap.
pub const MAX_DIM: usize = 16;

/// Eigenvalues closer than this are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixElement {
    m: DMatrix<C64>,
}

impl MatrixElement {
    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        assert!(m.is_square(), "matrix elements are square");
        Self { m }
    }

    /// Builds an `n x n` element from row-major entries.
    pub fn from_row_major(n: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::schema("entries", format!("expected {}", n * n)));
        }
        Ok(Self::from_matrix(DMatrix::from_row_slice(n, n, entries)))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let flat: Vec<C64> = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), n, "rows must form a square matrix");
                r.iter().map(|&v| C64::new(v, 0.0))
            })
            .collect();
        Self::from_matrix(DMatrix::from_row_slice(n, n, &flat))
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        let flat: Vec<C64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_matrix(DMatrix::from_row_slice(n, n, &flat))
    }

    pub fn diag(values: &[f64]) -> Self {
        let d = DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0)));
        Self::from_matrix(DMatrix::from_diagonal(&d))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_matrix(DMatrix::zeros(n, n))
    }

    /// Matrix unit `E_ij`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = C64::new(1.0, 0.0);
        Self::from_matrix(m)
    }

    /// Rank-one operator `u v*`.
    pub fn outer(u: &DVector<C64>, v: &DVector<C64>) -> Self {
        Self::from_matrix(u * v.adjoint())
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn row_major(&self) -> Vec<C64> {
        let n = self.n();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.m[(i, j)])
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn try_inverse(&self) -> Option<Self> {
        self.m.clone().try_inverse().map(Self::from_matrix)
    }

    /// Largest singular value, from the SVD. Oracle only.
    pub fn spectral_norm(&self) -> f64 {
        self.m
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .fold(0.0, |a, &s| a.max(s))
    }

    /// Hermitian eigendecomposition with ascending eigenvalues.
    pub fn eig_hermitian(&self, tol: &Tolerance) -> Result<Eigen> {
        self.require_hermitian(tol)?;
        Ok(Eigen::of_hermitian(&self.hermitian_part().m))
    }

    /// Positive square root by coupled Newton iteration
    /// `z <- (z + w^-1)/2`, `w <- (w + z^-1)/2`, from `z = x + eps_psd`,
    /// `w = 1`. Shares no code with the eigen route.
    pub fn denman_beavers_sqrt(&self, tol: &Tolerance) -> Result<Self> {
        self.require_hermitian(tol)?;
        let n = self.n();
        let mut z = self.hermitian_part().m + DMatrix::identity(n, n) * C64::new(tol.eps_psd, 0.0);
        let mut w = DMatrix::<C64>::identity(n, n);
        for _ in 0..100 {
            let z_inv = z
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Numerical("singular iterate".into()))?;
            let w_inv = w
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::Numerical("singular iterate".into()))?;
            let z_next = (&z + w_inv) * C64::new(0.5, 0.0);
            let w_next = (&w + z_inv) * C64::new(0.5, 0.0);
            let step = (&z_next - &z).iter().fold(0.0f64, |a, v| a.max(v.norm()));
            let scale = z_next.iter().fold(1.0f64, |a, v| a.max(v.norm()));
            z = z_next;
            w = w_next;
            if step <= 1e-15 * scale {
                break;
            }
        }
        Ok(Self::from_matrix(z).hermitian_part())
    }
}

/// Ascending eigenvalues with orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

/// A group of numerically coincident eigenvalues and its projector.
#[derive(Debug, Clone)]
pub struct EigenCluster {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
    pub projector: MatrixElement,
}

impl Eigen {
    fn of_hermitian(m: &DMatrix<C64>) -> Self {
        let eig = SymmetricEigen::new(m.clone());
        let n = m.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Self { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> DVector<C64> {
        self.vectors.column(k).into_owned()
    }

    /// `sum_k f(lambda_k) v_k v_k*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> MatrixElement {
        let n = self.vectors.nrows();
        let d = DVector::from_iterator(n, self.values.iter().map(|&l| C64::new(f(l), 0.0)));
        let m = &self.vectors * DMatrix::from_diagonal(&d) * self.vectors.adjoint();
        MatrixElement::from_matrix(m).hermitian_part()
    }

    /// Projector onto the span of the selected eigenvectors.
    pub fn projector(&self, select: impl Fn(usize) -> bool) -> MatrixElement {
        self.apply_indexed(|k| if select(k) { 1.0 } else { 0.0 })
    }

    fn apply_indexed(&self, f: impl Fn(usize) -> f64) -> MatrixElement {
        let n = self.vectors.nrows();
        let d = DVector::from_iterator(n, (0..n).map(|k| C64::new(f(k), 0.0)));
        let m = &self.vectors * DMatrix::from_diagonal(&d) * self.vectors.adjoint();
        MatrixElement::from_matrix(m).hermitian_part()
    }

    /// Groups eigenvalues separated by less than `gap`.
    pub fn clusters(&self, gap: f64) -> Vec<EigenCluster> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (k, &v) in self.values.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if v - self.values[*g.last().unwrap()] < gap => g.push(k),
                _ => groups.push(vec![k]),
            }
        }
        groups
            .into_iter()
            .map(|g| {
                let lo = self.values[g[0]];
                let hi = self.values[*g.last().unwrap()];
                let value = g.iter().map(|&k| self.values[k]).sum::<f64>() / g.len() as f64;
                let projector = self.projector(|k| g.contains(&k));
                EigenCluster {
                    lo,
                    hi,
                    value,
                    projector,
                }
            })
            .collect()
    }
}

/// A self-adjoint idempotent.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix(MatrixElement);

impl ProjectionMatrix {
    /// Wraps `e` after checking `e* = e = e^2` within `eps_eq`.
    pub fn new(e: MatrixElement, tol: &Tolerance) -> Option<Self> {
        Self::is_projection(&e, tol).then_some(Self(e))
    }

    pub fn is_projection(e: &MatrixElement, tol: &Tolerance) -> bool {
        e.distance(&e.star(), tol) <= tol.eps_eq && e.distance(&e.mul(e), tol) <= tol.eps_eq
    }

    pub fn element(&self) -> &MatrixElement {
        &self.0
    }

    pub fn into_element(self) -> MatrixElement {
        self.0
    }

    /// `1 - e`.
    pub fn complement(&self) -> Self {
        Self(self.0.one_like().sub(&self.0))
    }

    pub fn rank(&self) -> usize {
        self.0.trace().re.round() as usize
    }
}

/// `RP(x)`: orthogonal projection onto the range of `x*`, so that
/// `x y = 0` iff `RP(x) y = 0`.
pub fn right_projection(x: &MatrixElement, tol: &Tolerance) -> ProjectionMatrix {
    let n = x.n();
    let svd = x.m.clone().svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    let cut = tol.eps_eq * smax.max(1.0);
    let mut e = DMatrix::<C64>::zeros(n, n);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cut {
            let v = v_t.row(k).adjoint();
            e += &v * v.adjoint();
        }
    }
    ProjectionMatrix(MatrixElement::from_matrix(e).hermitian_part())
}

impl Element for MatrixElement {
    fn zero_like(&self) -> Self {
        Self::zeros(self.n())
    }

    fn one_like(&self) -> Self {
        Self::identity(self.n())
    }

    fn add(&self, other: &Self) -> Self {
        Self::from_matrix(&self.m + &other.m)
    }

    fn scale(&self, alpha: C64) -> Self {
        Self::from_matrix(&self.m * alpha)
    }

    fn mul(&self, other: &Self) -> Self {
        Self::from_matrix(&self.m * &other.m)
    }

    fn star(&self) -> Self {
        Self::from_matrix(self.m.adjoint())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n() == other.n() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.n(),
                right: other.n(),
            })
        }
    }

    fn distance(&self, other: &Self, _tol: &Tolerance) -> f64 {
        self.m
            .iter()
            .zip(other.m.iter())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    /// Hermitian with spectrum `>= -eps_psd`. Such an `x` equals
    /// `(sqrt x)* (sqrt x)`, so this coincides with membership in the
    /// set of finite sums of `y* y`.
    fn in_cone(&self, tol: &Tolerance) -> bool {
        match self.eig_hermitian(tol) {
            Ok(e) => e.min() >= -tol.eps_psd,
            Err(_) => false,
        }
    }

    fn min_spectral_value(&self, tol: &Tolerance) -> Result<f64> {
        Ok(self.eig_hermitian(tol)?.min())
    }

    fn sqrt_psd(&self, tol: &Tolerance) -> Result<Self> {
        let eig = self.eig_hermitian(tol)?;
        if eig.min() < -tol.eps_psd {
            return Err(Error::NotPositive { min: eig.min() });
        }
        // eigenvalues at roundoff level are zero: their square roots would
        // otherwise be ~1e-8 noise that breaks bicommutant membership
        let floor = 64.0 * f64::EPSILON * self.n() as f64 * eig.min().abs().max(eig.max().abs()).max(1.0);
        Ok(eig.apply(|l| if l <= floor { 0.0 } else { l.sqrt() }))
    }

    fn right_projection(&self, tol: &Tolerance) -> Self {
        right_projection(self, tol).into_element()
    }

    fn order_bracket(&self, _tol: &Tolerance) -> Option<f64> {
        Some(self.n() as f64 * self.max_abs())
    }

    fn apply_state(&self, state: &State) -> Result<C64> {
        match state {
            State::Vector(v) if v.len() == self.n() => {
                let xi = DVector::from_column_slice(v);
                Ok((xi.adjoint() * &self.m * &xi)[(0, 0)])
            }
            _ => Err(Error::StateMismatch),
        }
    }

    fn to_document(&self) -> ElementDocument {
        ElementDocument::Matrix {
            n: self.n(),
            entries: self.row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::leq;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eig_of_diag_is_sorted() {
        let e = MatrixElement::diag(&[3.0, 1.0]).eig_hermitian(&tol()).unwrap();
        assert_eq!(e.values.len(), 2);
        assert!((e.values[0] - 1.0).abs() < 1e-12 && (e.values[1] - 3.0).abs() < 1e-12);
        // eigenvector for 1 is e2 up to phase
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_of_swap() {
        let x = MatrixElement::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = x.eig_hermitian(&tol()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-12 && (e.values[1] - 1.0).abs() < 1e-12);
        let v0 = e.vector(0);
        // (1, -1)/sqrt 2 up to phase
        let ratio = v0[1] / v0[0];
        assert!((ratio - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(e.apply(|l| l).distance(&x, &tol()) <= 10.0 * tol().eps_eq);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let x = MatrixElement::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(x.eig_hermitian(&tol()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_of_identity_has_orthonormal_pair() {
        let e = MatrixElement::identity(2).eig_hermitian(&tol()).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        let u = MatrixElement::from_matrix(e.vectors.clone());
        assert!(u.star().mul(&u).approx_eq(&MatrixElement::identity(2), &tol()));
    }

    #[test]
    fn cone_examples() {
        let t = tol();
        assert!(MatrixElement::diag(&[1.0, 2.0]).in_cone(&t));
        assert!(!MatrixElement::diag(&[1.0, -1.0]).in_cone(&t));
        assert!(MatrixElement::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).in_cone(&t));
        assert!(!MatrixElement::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).in_cone(&t));
    }

    #[test]
    fn order_examples() {
        let t = tol();
        let a = MatrixElement::diag(&[1.0, 2.0]);
        let b = MatrixElement::diag(&[2.0, 3.0]);
        assert!(leq(&a, &b, &t));
        let p = MatrixElement::diag(&[1.0, 0.0]);
        let q = MatrixElement::diag(&[0.0, 1.0]);
        assert!(!leq(&p, &q, &t) && !leq(&q, &p, &t));
        let s = MatrixElement::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let one = MatrixElement::identity(2);
        assert!(leq(&one.neg(), &s, &t) && leq(&s, &one, &t));
    }

    #[test]
    fn sqrt_examples() {
        let t = tol();
        let y = MatrixElement::diag(&[4.0, 9.0]).sqrt_psd(&t).unwrap();
        assert!(y.approx_eq(&MatrixElement::diag(&[2.0, 3.0]), &t));

        let x = MatrixElement::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let s3 = 3f64.sqrt();
        let expected = MatrixElement::from_real_rows(&[
            &[(s3 + 1.0) / 2.0, (s3 - 1.0) / 2.0],
            &[(s3 - 1.0) / 2.0, (s3 + 1.0) / 2.0],
        ]);
        assert!(x.sqrt_psd(&t).unwrap().approx_eq(&expected, &t));
        let db = x.denman_beavers_sqrt(&t).unwrap();
        assert!(db.distance(&expected, &t) <= 100.0 * t.eps_eq);

        assert!(MatrixElement::zeros(3)
            .sqrt_psd(&t)
            .unwrap()
            .approx_eq(&MatrixElement::zeros(3), &t));
        assert!(matches!(
            MatrixElement::diag(&[1.0, -1.0]).sqrt_psd(&t),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn right_projection_examples() {
        let t = tol();
        let rp = right_projection(&MatrixElement::diag(&[1.0, 0.0]), &t);
        assert!(rp.element().approx_eq(&MatrixElement::diag(&[1.0, 0.0]), &t));

        let x = MatrixElement::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let rp = right_projection(&x, &t);
        assert!(rp.element().approx_eq(&MatrixElement::diag(&[0.0, 1.0]), &t));
        // r(x) = {y : row 2 of y vanishes} = diag(1,0) T
        let ann = rp.complement();
        assert!(ann.element().approx_eq(&MatrixElement::diag(&[1.0, 0.0]), &t));
        assert!(x.mul(ann.element()).approx_eq(&x.zero_like(), &t));

        let inv = MatrixElement::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        assert!(right_projection(&inv, &t)
            .element()
            .approx_eq(&MatrixElement::identity(2), &t));
        assert_eq!(right_projection(&inv, &t).rank(), 2);
    }

    #[test]
    fn row_major_rejects_wrong_count() {
        let err = MatrixElement::from_row_major(2, &[C64::new(1.0, 0.0); 3]).unwrap_err();
        assert_eq!(err.to_string(), "entries: expected 4");
    }
}
