//! Seeded random matrices for property checks.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::MatrixElement;
use crate::algebra::{Element, C64};

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MatrixElement {
    MatrixElement::from_matrix(DMatrix::from_fn(n, n, |_, _| complex_normal(rng)))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MatrixElement {
    gaussian(rng, n).hermitian_part()
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<C64> {
    let v = DVector::from_fn(n, |_, _| complex_normal(rng));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Haar-ish unitary from the QR factor of a complex Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MatrixElement {
    let g = DMatrix::from_fn(n, n, |_, _| complex_normal(rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = DVector::from_fn(n, |k, _| {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            d / C64::new(d.norm(), 0.0)
        } else {
            C64::new(1.0, 0.0)
        }
    });
    MatrixElement::from_matrix(q * DMatrix::from_diagonal(&phases))
}

/// PSD matrix `U diag(l) U*` with eigenvalues drawn uniformly from `[lo, hi]`.
pub fn psd_with_spectrum<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> MatrixElement {
    let u = unitary(rng, n);
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    u.mul(&MatrixElement::diag(&d)).mul(&u.star()).hermitian_part()
}

/// `A* A` for a Gaussian `A`; may be ill-conditioned.
pub fn gram<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MatrixElement {
    let a = gaussian(rng, n);
    a.star().mul(&a).hermitian_part()
}

/// Random matrix of random rank, with some columns zeroed exactly so
/// that matrix units land in the annihilator.
pub fn rank_deficient<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MatrixElement {
    let rank = rng.random_range(0..=n);
    let left = DMatrix::from_fn(n, rank, |_, _| complex_normal(rng));
    let right = DMatrix::from_fn(rank, n, |_, _| complex_normal(rng));
    let mut m = left * right;
    for j in 0..n {
        if rng.random_bool(0.3) {
            m.column_mut(j).fill(C64::new(0.0, 0.0));
        }
    }
    MatrixElement::from_matrix(m)
}
