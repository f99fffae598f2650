use proptest::prelude::*;
use rickart_core::cocountable::Point;
use rickart_core::{
    abs, contraction_adjoint_check, join, leq, meet, order_norm, positive_part, riemann_reconstruct, star_square,
    AnyElement, Element, ElementDocument, MatrixElement, Partition, Spectral, StepFunction, TagRule, Tolerance, C64,
};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn complex() -> impl Strategy<Value = C64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(n: usize) -> impl Strategy<Value = MatrixElement> {
    prop::collection::vec(complex(), n * n).prop_map(move |zs| MatrixElement::from_row_major(n, &zs).unwrap())
}

fn any_matrix() -> impl Strategy<Value = MatrixElement> {
    (1usize..=5).prop_flat_map(matrix)
}

fn matrix_pair() -> impl Strategy<Value = (MatrixElement, MatrixElement)> {
    (1usize..=5).prop_flat_map(|n| (matrix(n), matrix(n)))
}

fn hermitian() -> impl Strategy<Value = MatrixElement> {
    any_matrix().prop_map(|x| x.hermitian_part())
}

/// Exceptions at dyadic and thirds points, so labels can collide.
fn stepfn() -> impl Strategy<Value = StepFunction> {
    let label = prop::sample::select(vec!["0.5", "0.25", "0.75", "1/3", "2/3", "0.125", "0.9"]);
    (complex(), prop::collection::btree_map(label, complex(), 0..5)).prop_map(|(d, ex)| {
        let ex: Vec<(&str, C64)> = ex.into_iter().collect();
        StepFunction::with_exceptions(d, &ex).unwrap()
    })
}

fn real_stepfn() -> impl Strategy<Value = StepFunction> {
    stepfn().prop_map(|f| f.hermitian_part())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn involution_reverses_products((x, y) in matrix_pair()) {
        let t = tol();
        let scale = x.magnitude(&t) * y.magnitude(&t);
        let lhs = x.mul(&y).star();
        let rhs = y.star().mul(&x.star());
        prop_assert!(lhs.distance(&rhs, &t) <= 1e-12 * scale.max(1.0));
        prop_assert_eq!(x.star().star(), x);
    }

    #[test]
    fn star_squares_are_positive(x in any_matrix()) {
        prop_assert!(star_square(&x).in_cone(&tol()));
    }

    #[test]
    fn square_root_squares_back(x in any_matrix()) {
        let t = tol();
        let p = star_square(&x);
        let y = p.sqrt_psd(&t).unwrap();
        prop_assert!(y.in_cone(&t));
        prop_assert!(y.mul(&y).distance(&p, &t) <= 10.0 * t.eps_eq * p.magnitude(&t).max(1.0));
    }

    #[test]
    fn right_projection_laws(x in any_matrix()) {
        let t = tol();
        let rp = x.right_projection(&t);
        prop_assert!(rp.approx_eq(&rp.star(), &t));
        prop_assert!(rp.approx_eq(&rp.mul(&rp), &t));
        let scaled = Tolerance { eps_eq: 10.0 * t.eps_eq * x.magnitude(&t).max(1.0), ..t };
        prop_assert!(x.mul(&rp).approx_eq(&x, &scaled));
    }

    #[test]
    fn order_norm_is_the_spectral_radius(x in hermitian()) {
        let t = tol();
        let n = order_norm(&x, &t).unwrap();
        let oracle = x.spectral_norm();
        prop_assert!((n - oracle).abs() <= 10.0 * t.eps_eq * oracle.max(1.0), "{} vs {}", n, oracle);
    }

    #[test]
    fn cstar_identity(x in any_matrix()) {
        let t = tol();
        let lhs = order_norm(&star_square(&x).hermitian_part(), &t).unwrap();
        let nx = order_norm(&x, &t).unwrap();
        prop_assert!((lhs - nx * nx).abs() <= 1e-6 * lhs.max(1.0));
    }

    #[test]
    fn contractions_stay_contractions(x in any_matrix()) {
        let t = tol();
        let s = x.spectral_norm();
        let y = if s > 0.0 { x.scale_real(1.0 / s) } else { x };
        prop_assert!(contraction_adjoint_check(&y, &t));
    }

    #[test]
    fn positive_part_matches_the_oracle(x in hermitian()) {
        let t = tol();
        let p = positive_part(&x, &t).unwrap();
        let oracle = x.oracle_positive_part(&x.decompose(&t).unwrap());
        prop_assert!(p.distance(&oracle, &t) <= 10.0 * t.eps_eq * x.magnitude(&t).max(1.0));
        prop_assert!(p.in_cone(&t));
        prop_assert!(leq(&x, &p, &t));
    }

    #[test]
    fn join_and_meet_bracket((x, z) in matrix_pair()) {
        let t = tol();
        let (x, z) = (x.hermitian_part(), z.hermitian_part());
        let j = join(&x, &z, &t).unwrap();
        let m = meet(&x, &z, &t).unwrap();
        prop_assert!(leq(&x, &j, &t) && leq(&z, &j, &t));
        prop_assert!(leq(&m, &x, &t) && leq(&m, &z, &t));
        // x v z + x ^ z = x + z
        let scale = x.magnitude(&t) + z.magnitude(&t);
        prop_assert!(j.add(&m).distance(&x.add(&z), &t) <= 100.0 * t.eps_eq * scale.max(1.0));
        let j2 = join(&z, &x, &t).unwrap();
        prop_assert!(j.distance(&j2, &t) <= 100.0 * t.eps_eq * scale.max(1.0));
    }

    #[test]
    fn modulus_dominates(x in hermitian()) {
        let t = tol();
        let a = abs(&x, &t).unwrap();
        prop_assert!(leq(&x, &a, &t) && leq(&x.neg(), &a, &t));
    }

    #[test]
    fn reconstruction_within_mesh(x in hermitian(), denom in prop::sample::select(vec![1u32, 10, 100])) {
        let t = tol();
        let s = x.spectral_norm();
        let lo = -(s.ceil() + 1.0);
        let cells = ((2.0 * (-lo)) * denom as f64) as usize;
        let p = Partition::regular(lo, denom, cells, TagRule::Left).unwrap();
        let r = riemann_reconstruct(&x, &p, &t).unwrap();
        prop_assert!(r.error <= p.mesh() + 10.0 * t.eps_eq * s.max(1.0), "{} > {}", r.error, p.mesh());
    }

    #[test]
    fn matrix_documents_round_trip(x in any_matrix()) {
        let text = serde_json::to_string(&x.to_document()).unwrap();
        let back = ElementDocument::parse_str(&text).unwrap().to_element().unwrap();
        prop_assert_eq!(back, AnyElement::Matrix(x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stepfn_ring_laws(f in stepfn(), g in stepfn(), h in stepfn()) {
        let t = tol();
        prop_assert!(f.mul(&g).approx_eq(&g.mul(&f), &t));
        prop_assert!(f.mul(&g.add(&h)).approx_eq(&f.mul(&g).add(&f.mul(&h)), &t));
        prop_assert!(f.mul(&g).star().approx_eq(&g.star().mul(&f.star()), &t));
    }

    #[test]
    fn stepfn_square_roots(f in stepfn()) {
        let t = tol();
        let p = star_square(&f);
        prop_assert!(p.in_cone(&t));
        let y = p.sqrt_psd(&t).unwrap();
        let loose = Tolerance { eps_eq: 1e-8 * p.magnitude(&t).max(1.0), ..t };
        prop_assert!(y.mul(&y).approx_eq(&p, &loose));
    }

    #[test]
    fn stepfn_right_projection(f in stepfn()) {
        let t = tol();
        let rp = f.right_projection(&t);
        prop_assert!(rp.approx_eq(&rp.mul(&rp), &t));
        prop_assert!(f.mul(&rp).approx_eq(&f, &t));
        // zero exactly where f vanishes
        let kill = rp.one_like().sub(&rp);
        prop_assert!(f.mul(&kill).magnitude(&t) <= t.eps_eq);
    }

    #[test]
    fn stepfn_positive_part(f in real_stepfn()) {
        let t = tol();
        let p = positive_part(&f, &t).unwrap();
        let oracle = f.oracle_positive_part(&f.decompose(&t).unwrap());
        let loose = Tolerance { eps_eq: 1e-8, ..t };
        prop_assert!(p.approx_eq(&oracle, &loose));
    }

    #[test]
    fn stepfn_norm_is_the_largest_value(f in real_stepfn()) {
        let t = tol();
        let n = order_norm(&f, &t).unwrap();
        let oracle = f.probe_values(&t).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!((n - oracle).abs() <= 10.0 * t.eps_eq * oracle.max(1.0));
    }

    #[test]
    fn stepfn_documents_round_trip(f in stepfn()) {
        let text = serde_json::to_string(&f.to_document()).unwrap();
        let AnyElement::Stepfn(back) = ElementDocument::parse_str(&text).unwrap().to_element().unwrap() else {
            panic!("kind changed");
        };
        prop_assert!(back.approx_eq(&f, &tol()));
    }

    #[test]
    fn fraction_and_decimal_labels_agree(num in 0u32..=64, den in 1u32..=64) {
        prop_assume!(num <= den);
        let a = Point::parse(&format!("{num}/{den}")).unwrap();
        let b = Point::parse(&a.label()).unwrap();
        prop_assert_eq!(a.clone(), b);
        prop_assert!((a.to_f64() - num as f64 / den as f64).abs() < 1e-15);
    }
}
