use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Point, Probe, StepFunction, TailExpr};
use crate::algebra::{AlgebraContract, C64};
use crate::audit::Model;
use crate::matrix::sample::complex_normal;
use crate::tolerance::Tolerance;

/// A label outside every random exceptional set and off the reserved grid.
pub const FRESH_LABEL: &str = "0.70710678118654752440";

/// Random step functions with up to `max_exceptions` exceptional points
/// and, with probability `tail_probability`, a bounded symbolic tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepFnModel {
    pub max_exceptions: usize,
    pub tail_probability: f64,
}

impl Default for StepFnModel {
    fn default() -> Self {
        Self {
            max_exceptions: 8,
            tail_probability: 0.3,
        }
    }
}

impl StepFnModel {
    fn random_label(rng: &mut ChaCha8Rng) -> Point {
        let k: u32 = rng.random_range(0..1000);
        Point::parse(&format!("0.{k:03}")).expect("three-digit label")
    }

    /// `a + b / (n + k)`: bounded, non-constant.
    fn random_tail(rng: &mut ChaCha8Rng) -> TailExpr {
        let a = complex_normal(rng);
        let b = complex_normal(rng);
        let k: f64 = rng.random_range(0..4) as f64;
        TailExpr::constant(a).add(&TailExpr::index().add(&TailExpr::real(k)).recip().scale(b))
    }

    fn build(&self, rng: &mut ChaCha8Rng, value: impl Fn(&mut ChaCha8Rng) -> C64) -> StepFunction {
        let default = value(rng);
        let count = rng.random_range(0..=self.max_exceptions);
        let exceptions = (0..count).map(|_| (Self::random_label(rng), value(rng))).collect();
        let tail = rng.random_bool(self.tail_probability).then(|| Self::random_tail(rng));
        StepFunction::new(default, exceptions, tail)
    }
}

impl Model for StepFnModel {
    type Elem = StepFunction;

    fn contract(&self) -> AlgebraContract {
        AlgebraContract {
            model: "stepfn".into(),
            dimension: format!("<= {} exceptions", self.max_exceptions),
            has_commutant: false,
            has_symbolic_tail: true,
        }
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> StepFunction {
        self.build(rng, complex_normal)
    }

    /// Values vanish with probability one half, so supports are proper.
    fn random_annihilator_subject(&self, rng: &mut ChaCha8Rng) -> StepFunction {
        self.build(rng, |r| {
            if r.random_bool(0.5) {
                C64::new(0.0, 0.0)
            } else {
                complex_normal(r)
            }
        })
    }

    /// Point indicators at the probes of `x`, an indicator at a generic
    /// point, and the constant 1.
    fn spanning_set(&self, x: &StepFunction, tol: &Tolerance) -> Vec<StepFunction> {
        let mut out: Vec<StepFunction> = StepFunction::probes(&[x], tol)
            .into_iter()
            .filter_map(|p| match p {
                Probe::At(pt) => Some(StepFunction::point_indicator(pt)),
                Probe::Generic => None,
            })
            .collect();
        out.push(StepFunction::point_indicator(
            Point::parse(FRESH_LABEL).expect("fresh label"),
        ));
        out.push(StepFunction::real(1.0));
        out
    }

    fn bicommutant_residual(&self, _x: &StepFunction, _y: &StepFunction, _tol: &Tolerance) -> Option<f64> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Element;
    use crate::audit::{audit_axioms, sample_rng};

    #[test]
    fn audit_passes() {
        let r = audit_axioms(&StepFnModel::default(), 7, 200, &Tolerance::default());
        assert!(r.all_pass(), "{:#?}", r.failures().collect::<Vec<_>>());
        assert!(r.get("psr.in_bicommutant").is_none());
    }

    #[test]
    fn random_tails_are_bounded() {
        let t = Tolerance::default();
        let m = StepFnModel {
            max_exceptions: 4,
            tail_probability: 1.0,
        };
        for i in 0..50 {
            let f = m.random_element(&mut sample_rng(1, 0, i));
            assert!(f.tail().is_some());
            assert!(f.order_bracket(&t).is_some(), "{f:?}");
        }
    }
}
