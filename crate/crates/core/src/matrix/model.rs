use rand_chacha::ChaCha8Rng;

use super::{bicommutant, sample, MatrixElement};
use crate::algebra::{leq, star_square, AlgebraContract, Element};
use crate::audit::Model;
use crate::tolerance::Tolerance;

/// `M_n(C)` as an audit model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixModel {
    pub n: usize,
}

impl MatrixModel {
    pub fn new(n: usize) -> Self {
        assert!((1..=super::MAX_DIM).contains(&n), "dimension out of range");
        Self { n }
    }
}

impl Model for MatrixModel {
    type Elem = MatrixElement;

    fn contract(&self) -> AlgebraContract {
        AlgebraContract {
            model: "matrix".into(),
            dimension: format!("n = {}", self.n),
            has_commutant: true,
            has_symbolic_tail: false,
        }
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> MatrixElement {
        sample::gaussian(rng, self.n)
    }

    fn random_annihilator_subject(&self, rng: &mut ChaCha8Rng) -> MatrixElement {
        sample::rank_deficient(rng, self.n)
    }

    /// Matrix units `E_ij`.
    fn spanning_set(&self, _x: &MatrixElement, _tol: &Tolerance) -> Vec<MatrixElement> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| MatrixElement::unit(n, i, j)))
            .collect()
    }

    fn bicommutant_residual(&self, x: &MatrixElement, y: &MatrixElement, tol: &Tolerance) -> Option<f64> {
        bicommutant(x, tol).ok().map(|b| b.residual(y))
    }
}

/// `x* x <= 1` implies `x x* <= 1`; vacuously true otherwise.
pub fn contraction_adjoint_check(x: &MatrixElement, tol: &Tolerance) -> bool {
    let one = x.one_like();
    !leq(&star_square(x), &one, tol) || leq(&x.mul(&x.star()), &one, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::audit_axioms;
    use crate::audit::audit_axioms_with;

    #[test]
    fn contraction_adjoint_examples() {
        let t = Tolerance::default();
        assert!(contraction_adjoint_check(&MatrixElement::unit(2, 0, 1), &t));
        let x = MatrixElement::unit(2, 0, 1);
        assert!(star_square(&x).approx_eq(&MatrixElement::diag(&[0.0, 1.0]), &t));
        assert!(x.mul(&x.star()).approx_eq(&MatrixElement::diag(&[1.0, 0.0]), &t));
        let u = MatrixElement::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(contraction_adjoint_check(&u, &t));
        assert!(contraction_adjoint_check(
            &MatrixElement::identity(2).scale_real(2.0),
            &t
        ));
    }

    #[test]
    fn audit_passes_on_matrices() {
        let t = Tolerance::default();
        let report = audit_axioms(&MatrixModel::new(2), 7, 100, &t);
        assert!(report.all_pass(), "{report:#?}");
        assert_eq!(report.seed, 7);
    }

    #[test]
    fn audit_flags_injected_non_positive() {
        let t = Tolerance::default();
        let bad = MatrixElement::diag(&[1.0, -1.0]);
        let report = audit_axioms_with(&MatrixModel::new(2), 7, 5, &t, std::slice::from_ref(&bad));
        let rec = report.get("cone.asserted_members").unwrap();
        assert!(!rec.pass);
        assert_eq!(rec.witness, vec![bad.to_document()]);
        assert!(rec.detail.contains("-1"), "{}", rec.detail);
    }
}
