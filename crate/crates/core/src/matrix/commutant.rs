use nalgebra::{DMatrix, DVector};

use super::MatrixElement;
use crate::algebra::C64;
use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

/// Orthonormal (Frobenius) basis of a linear subspace of `M_n`.
#[derive(Debug, Clone)]
pub struct CommutantBasis {
    n: usize,
    members: Vec<MatrixElement>,
}

impl CommutantBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[MatrixElement] {
        &self.members
    }

    /// Orthonormalizes an arbitrary spanning list.
    pub fn span_of(members: &[MatrixElement], tol: &Tolerance) -> Result<Self> {
        let n = first_dim(members)?;
        let cols: Vec<DVector<C64>> = members.iter().map(vectorize).collect();
        let a = DMatrix::from_columns(&cols);
        let svd = a.svd(true, false);
        let u = svd.u.expect("u requested");
        let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
        let cut = tol.eps_psd * smax.max(1.0);
        let members = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > cut)
            .map(|(k, _)| devectorize(n, &u.column(k).into_owned()))
            .collect();
        Ok(Self { n, members })
    }

    /// Least-squares residual `|y - P y|_F` of projecting `y` onto the span.
    pub fn residual(&self, y: &MatrixElement) -> f64 {
        let v = vectorize(y);
        let mut r = v.clone();
        for b in &self.members {
            let bv = vectorize(b);
            let coeff = bv.dotc(&v);
            r -= bv * coeff;
        }
        r.norm()
    }

    pub fn contains(&self, y: &MatrixElement, tol: &Tolerance) -> bool {
        self.residual(y) <= 10.0 * tol.eps_eq * y.frobenius().max(1.0)
    }

    /// Whether every member of `self` lies in `other`.
    pub fn is_subspace_of(&self, other: &CommutantBasis, tol: &Tolerance) -> bool {
        self.members.iter().all(|m| other.contains(m, tol))
    }
}

fn first_dim(members: &[MatrixElement]) -> Result<usize> {
    let n = members
        .first()
        .map(|m| m.n())
        .ok_or_else(|| Error::schema("generators", "empty generator list"))?;
    for m in members {
        if m.n() != n {
            return Err(Error::DimensionMismatch { left: n, right: m.n() });
        }
    }
    Ok(n)
}

/// Column-major stacking.
fn vectorize(x: &MatrixElement) -> DVector<C64> {
    DVector::from_column_slice(x.as_matrix().as_slice())
}

fn devectorize(n: usize, v: &DVector<C64>) -> MatrixElement {
    MatrixElement::from_matrix(DMatrix::from_column_slice(n, n, v.as_slice()))
}

/// `{S}' = {y : ys = sy for all s in S}`, as the null space of the
/// stacked linear map `y -> (ys - sy)_s`.
pub fn commutant(generators: &[MatrixElement], tol: &Tolerance) -> Result<CommutantBasis> {
    let n = first_dim(generators)?;
    let nn = n * n;
    let mut l = DMatrix::<C64>::zeros(generators.len() * nn, nn);
    for (g, s) in generators.iter().enumerate() {
        let s = s.as_matrix();
        let row0 = g * nn;
        // column for E_ij (index j*n + i): (E_ij s)_{ab} = d_ai s_jb,
        // (s E_ij)_{ab} = s_ai d_bj
        for j in 0..n {
            for i in 0..n {
                let col = j * n + i;
                for b in 0..n {
                    l[(row0 + b * n + i, col)] += s[(j, b)];
                }
                for a in 0..n {
                    l[(row0 + j * n + a, col)] -= s[(a, i)];
                }
            }
        }
    }
    let svd = l.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    let cut = tol.eps_psd * smax.max(1.0);
    let mut members = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= cut {
            members.push(devectorize(n, &v_t.row(k).adjoint()));
        }
    }
    // singular values beyond min(rows, cols) are implicitly zero; rows >= cols here
    debug_assert_eq!(svd.singular_values.len(), nn);
    Ok(CommutantBasis { n, members })
}

/// `{x}''`, the commutant of the commutant.
pub fn bicommutant(x: &MatrixElement, tol: &Tolerance) -> Result<CommutantBasis> {
    let first = commutant(std::slice::from_ref(x), tol)?;
    commutant(first.members(), tol)
}
