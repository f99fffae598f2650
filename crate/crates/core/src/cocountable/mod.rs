//! Functions on `[0, 1]` measurable for the countable/co-countable
//! sigma-algebra: a Rickart ordered *-algebra that is not Baer.

mod baer;
mod expr;
mod model;
mod point;
mod set;
mod stepfn;

pub use baer::{not_baer_witness, IntervalSet};
pub use expr::TailExpr;
pub use model::StepFnModel;
pub use point::Point;
pub use set::{CocountableSet, SetTag};
pub use stepfn::{Op, Probe, StepFunction};

use crate::algebra::Element;
use crate::error::Result;
use crate::norm::{fr_sup, DominatedSeries};
use crate::tolerance::Tolerance;

/// Right projection: the indicator of the support.
pub fn rp_fn(f: &StepFunction, tol: &Tolerance) -> StepFunction {
    f.right_projection(tol)
}

/// Supremum of the partial sums of a finite dominated sequence.
pub fn fr_sup_fn(xs: &[StepFunction], eps: &[f64], tol: &Tolerance) -> Result<StepFunction> {
    fr_sup(&DominatedSeries::finite(xs.to_vec(), eps.to_vec()), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::C64;
    use crate::error::Error;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn rp_examples() {
        let t = Tolerance::default();
        let f = StepFunction::with_exceptions(c(2.0), &[("0.5", c(0.0))]).unwrap();
        let e = rp_fn(&f, &t);
        assert_eq!(e, StepFunction::with_exceptions(c(1.0), &[("0.5", c(0.0))]).unwrap());
        assert_eq!(rp_fn(&StepFunction::real(0.0), &t), StepFunction::real(0.0));
        let g = StepFunction::with_exceptions(c(0.0), &[("0.5", c(3.0))]).unwrap();
        assert_eq!(
            rp_fn(&g, &t),
            StepFunction::with_exceptions(c(0.0), &[("0.5", c(1.0))]).unwrap()
        );
        assert_eq!(rp_fn(&e, &t), e);
    }

    #[test]
    fn fr_sup_examples() {
        let t = Tolerance::default();
        let n = 10;
        let xs: Vec<_> = (1..=n)
            .map(|k| StepFunction::point_indicator(Point::reserved(k)).scale_real(0.5f64.powi(k as i32)))
            .collect();
        let eps: Vec<_> = (1..=n).map(|k| 0.5f64.powi(k as i32)).collect();
        let sup = fr_sup_fn(&xs, &eps, &t).unwrap();
        assert_eq!(sup.default_value(), c(0.0));
        for k in 1..=n {
            assert_eq!(sup.value_at(&Point::reserved(k)), c(0.5f64.powi(k as i32)));
        }

        let ones: Vec<_> = eps.iter().map(|&e| StepFunction::real(e)).collect();
        let s = fr_sup_fn(&ones, &eps, &t).unwrap();
        assert!((s.default_value().re - (1.0 - 0.5f64.powi(n as i32))).abs() < 1e-15);

        let zeros = vec![StepFunction::real(0.0); 3];
        assert_eq!(
            fr_sup_fn(&zeros, &[0.5, 0.25, 0.125], &t).unwrap(),
            StepFunction::real(0.0)
        );

        let bad = [StepFunction::real(1.0)];
        assert!(matches!(
            fr_sup_fn(&bad, &[0.5], &t),
            Err(Error::DominationViolated { index: 1, .. })
        ));
    }
}
