//! Why the model is Rickart but not Baer.
//!
//! Single elements have support projections: every model function takes
//! its default value off a countable set, so its support is countable or
//! co-countable and its indicator is in the model. For a family of point
//! indicators indexed by a set `A` such that both `A` and its complement
//! are uncountable, the right annihilator consists of the functions
//! vanishing on `A`; a generating projection would have support exactly
//! `X \ A`, which is neither countable nor co-countable.

use super::model::FRESH_LABEL;
use super::{CocountableSet, Point, SetTag, StepFnModel, StepFunction, TailExpr};
use crate::algebra::{Element, C64};
use crate::audit::{sample_rng, Model};
use crate::norm::{fr_sup, DominatedSeries};
use crate::report::{AxiomReport, CheckRecord};
use crate::tolerance::Tolerance;

/// A closed interval `[lo, hi]` of `[0, 1]`, used symbolically: for
/// `lo < hi` it and its complement in `[0, 1]` are uncountable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSet {
    pub lo: Point,
    pub hi: Point,
}

impl IntervalSet {
    pub fn contains(&self, p: &Point) -> bool {
        &self.lo <= p && p <= &self.hi
    }

    /// Uncountable when non-degenerate.
    pub fn uncountable(&self) -> bool {
        self.lo < self.hi
    }

    /// The complement in `[0, 1]` is uncountable when it contains an open
    /// interval, i.e. the interval is not all of `[0, 1]`.
    pub fn complement_uncountable(&self) -> bool {
        self.lo.to_f64() > 0.0 || self.hi.to_f64() < 1.0
    }

    /// A point of the interval that `avoid` does not reject.
    fn point_inside(&self, avoid: impl Fn(&Point) -> bool) -> Option<Point> {
        candidates().find(|p| self.contains(p) && !avoid(p))
    }

    /// A point of the complement that `avoid` does not reject.
    fn point_outside(&self, avoid: impl Fn(&Point) -> bool) -> Option<Point> {
        candidates().find(|p| !self.contains(p) && !avoid(p))
    }
}

/// Points `1/k`, `1 - 1/k` and `2/(2k+1)`, dense enough near both ends of
/// `[0, 1]`; the last family is off the reserved grid.
fn candidates() -> impl Iterator<Item = Point> {
    (2..100_000u64).flat_map(|k| {
        [format!("1/{k}"), format!("{}/{k}", k - 1), format!("2/{}", 2 * k + 1)]
            .into_iter()
            .filter_map(|s| Point::parse(&s).ok())
    })
}

/// Shows that a candidate projection `e` does not generate the right
/// annihilator of `{delta_t : t in A}`. Returns the refuting point.
fn refute(e: &StepFunction, a: &IntervalSet) -> Option<(Point, String)> {
    // with a tail, reserved points carry tail values, so avoid them too
    let avoid = |t: &Point| e.exceptions().contains_key(t) || (e.tail().is_some() && t.reserved_index().is_some());
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    match e.support_tag() {
        // supp(e) is countable: some t outside A and outside supp(e) has
        // delta_t in the annihilator, but e delta_t = 0.
        SetTag::Countable => {
            let t = a.point_outside(avoid)?;
            (e.value_at(&t) == zero).then(|| {
                (
                    t.clone(),
                    format!(
                        "support countable; delta_{} annihilates the family but e delta = 0",
                        t.label()
                    ),
                )
            })
        }
        // supp(e) is co-countable: some t in A lies in supp(e), so
        // e delta_t = delta_t although delta_t delta_t != 0.
        SetTag::CoCountable => {
            let t = a.point_inside(avoid)?;
            (e.value_at(&t) == one).then(|| {
                (
                    t.clone(),
                    format!(
                        "support co-countable; e fixes delta_{} which lies outside the annihilator",
                        t.label()
                    ),
                )
            })
        }
    }
}

fn p(label: &str) -> Point {
    Point::parse(label).expect("static label")
}

/// The non-Baer demonstration together with its positive controls.
pub fn not_baer_witness() -> AxiomReport {
    let tol = Tolerance::default();
    let mut report = AxiomReport::new(0, 0);
    let one = StepFunction::real(1.0);

    // Every projection representable in the model, by case analysis on the
    // two tags: its default is 0 or 1, fixing a countable or co-countable
    // support, and the indicator of that set reproduces it.
    let mut tag_failures = Vec::new();
    let mut tag_cases = 0;
    let pts = [p("0.1"), p("1/3"), p("0.5")];
    for tag in [SetTag::Countable, SetTag::CoCountable] {
        for k in 0..=pts.len() {
            let set = CocountableSet {
                tag,
                points: pts[..k].iter().cloned().collect(),
            };
            let e = StepFunction::indicator(&set);
            tag_cases += 1;
            let ok = e.support_tag() == tag && e.support_set().as_ref() == Some(&set) && is_projection(&e, &tol);
            if !ok {
                tag_failures.push(e);
            }
        }
    }
    let model = StepFnModel::default();
    for i in 0..64 {
        let x = model.random_annihilator_subject(&mut sample_rng(0, 900, i));
        let e = x.right_projection(&tol);
        tag_cases += 1;
        let consistent = match e.support_tag() {
            SetTag::Countable => e.default_value() == C64::new(0.0, 0.0),
            SetTag::CoCountable => e.default_value() == C64::new(1.0, 0.0),
        };
        if !(consistent && is_projection(&e, &tol)) {
            tag_failures.push(e);
        }
    }
    report.push(if tag_failures.is_empty() {
        CheckRecord::pass(
            "baer.projection_support_tags",
            format!("{tag_cases} projections; every support is Countable or CoCountable"),
        )
    } else {
        CheckRecord::fail(
            "baer.projection_support_tags",
            "projection with inconsistent support tag",
            tag_failures.iter().map(|e| e.to_document()).collect(),
        )
    });

    // Countable family {delta_{p_n}}: the supremum projection is the
    // support of the dominated sum, a countable set.
    let n = tol.probe_count;
    let terms: Vec<StepFunction> = (1..=n)
        .map(|k| StepFunction::point_indicator(Point::reserved(k)).scale_real(0.5f64.powi(k as i32)))
        .collect();
    let eps: Vec<f64> = (1..=n).map(|k| 0.5f64.powi(k as i32)).collect();
    let countable = fr_sup(&DominatedSeries::finite(terms, eps), &tol).map(|s| s.right_projection(&tol));
    report.push(match countable {
        Ok(e) => {
            let expected = CocountableSet::countable((1..=n).map(Point::reserved));
            let dominates = (1..=n).all(|k| e.value_at(&Point::reserved(k)) == C64::new(1.0, 0.0));
            if e.support_set() == Some(expected) && dominates && is_projection(&e, &tol) {
                CheckRecord::pass(
                    "baer.countable_family",
                    format!("sup of {n} point indicators is the indicator of a Countable set"),
                )
            } else {
                CheckRecord::fail("baer.countable_family", "unexpected supremum", vec![e.to_document()])
            }
        }
        Err(err) => CheckRecord::fail("baer.countable_family", err.to_string(), vec![]),
    });

    // The whole reserved grid at once, symbolically: supp(1/n) at p_n.
    let grid = StepFunction::real(0.0).with_tail(TailExpr::index().recip());
    let e = grid.right_projection(&tol);
    let ok = e.support_tag() == SetTag::Countable
        && is_projection(&e, &tol)
        && (1..=n).all(|k| e.value_at(&Point::reserved(k)) == C64::new(1.0, 0.0))
        && e.value_at(&p(FRESH_LABEL)) == C64::new(0.0, 0.0);
    report.push(if ok {
        CheckRecord::pass("baer.countable_symbolic", "support of the reserved grid is Countable")
    } else {
        CheckRecord::fail(
            "baer.countable_symbolic",
            "unexpected support projection",
            vec![e.to_document()],
        )
    });

    // Co-countable supports: family {1 - delta_q}; the annihilator is
    // generated by the indicator of the complement of the union of
    // supports, computed by tag arithmetic.
    let qs = [p("0.2"), p("0.3"), p("0.9")];
    let family: Vec<StepFunction> = qs
        .iter()
        .map(|q| one.sub(&StepFunction::point_indicator(q.clone())))
        .collect();
    let union = family
        .iter()
        .filter_map(|s| s.support_set())
        .fold(CocountableSet::empty(), |u, s| u.union(&s));
    let e = StepFunction::indicator(&union.complement());
    let mut probes: Vec<Point> = qs.to_vec();
    probes.extend([p("0.5"), p(FRESH_LABEL)]);
    let kills = |y: &StepFunction| family.iter().all(|s| s.mul(y).approx_eq(&y.zero_like(), &tol));
    let generated = probes.iter().all(|t| {
        let d = StepFunction::point_indicator(t.clone());
        kills(&d) == e.mul(&d).approx_eq(&d, &tol)
    }) && family.iter().all(|s| s.mul(&e).approx_eq(&e.zero_like(), &tol));
    report.push(if union.tag == SetTag::CoCountable && generated {
        CheckRecord::pass(
            "baer.cocountable_family",
            format!(
                "union of supports is CoCountable; annihilator generated by {}",
                describe(&union.complement())
            ),
        )
    } else {
        CheckRecord::fail(
            "baer.cocountable_family",
            "annihilator not generated",
            vec![e.to_document()],
        )
    });

    // The uncountable family: A = [0, 1/2].
    let a = IntervalSet {
        lo: p("0"),
        hi: p("0.5"),
    };
    let mut candidates: Vec<StepFunction> = vec![
        StepFunction::real(0.0),
        one.clone(),
        StepFunction::indicator(&CocountableSet::countable([p("0.75"), p("0.9")])),
        StepFunction::indicator(&CocountableSet::cocountable([p("0.25"), p("0.5")])),
        grid.right_projection(&tol),
        one.sub(&grid.right_projection(&tol)),
    ];
    for i in 0..32 {
        let x = model.random_annihilator_subject(&mut sample_rng(0, 901, i));
        candidates.push(x.right_projection(&tol));
    }
    let mut unrefuted = Vec::new();
    let mut lines = Vec::new();
    for e in &candidates {
        match refute(e, &a) {
            Some((_, why)) => {
                if lines.len() < 2 {
                    lines.push(why)
                }
            }
            None => unrefuted.push(e.to_document()),
        }
    }
    let premises = a.uncountable() && a.complement_uncountable();
    report.push(if premises && unrefuted.is_empty() {
        CheckRecord::pass(
            "baer.uncountable_family",
            format!(
                "A = [0, 0.5] and its complement are uncountable; r({{delta_t : t in A}}) needs a projection \
                 supported exactly on X \\ A; a Countable support misses points of X \\ A, a CoCountable \
                 support meets A; {} candidate projections refuted ({})",
                candidates.len(),
                lines.join("; ")
            ),
        )
    } else {
        CheckRecord::fail(
            "baer.uncountable_family",
            "a candidate projection was not refuted",
            unrefuted,
        )
    });

    report
}

fn is_projection(e: &StepFunction, tol: &Tolerance) -> bool {
    e.approx_eq(&e.star(), tol)
        && e.approx_eq(&e.mul(e), tol)
        && StepFunction::probes(&[e], tol)
            .iter()
            .all(|pr| matches!(e.value(pr), v if v == C64::new(0.0, 0.0) || v == C64::new(1.0, 0.0)))
}

fn describe(s: &CocountableSet) -> String {
    let pts: Vec<String> = s.points.iter().map(|p| p.label()).collect();
    match s.tag {
        SetTag::Countable => format!("Countable{{{}}}", pts.join(", ")),
        SetTag::CoCountable => format!("CoCountable{{{}}}", pts.join(", ")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn witness_passes() {
        let r = not_baer_witness();
        assert!(r.all_pass(), "{:#?}", r.failures().collect::<Vec<_>>());
        for name in [
            "baer.projection_support_tags",
            "baer.countable_family",
            "baer.countable_symbolic",
            "baer.cocountable_family",
            "baer.uncountable_family",
        ] {
            assert!(r.get(name).is_some(), "{name}");
        }
    }

    #[test]
    fn interval_points() {
        let a = IntervalSet {
            lo: p("0"),
            hi: p("0.5"),
        };
        let avoid: BTreeSet<Point> = [p("1/2"), p("1/3")].into_iter().collect();
        let inside = a.point_inside(|t| avoid.contains(t)).unwrap();
        assert!(a.contains(&inside) && !avoid.contains(&inside));
        let outside = a.point_outside(|t| avoid.contains(t)).unwrap();
        assert!(!a.contains(&outside));
    }

    #[test]
    fn refutes_both_tags() {
        let a = IntervalSet {
            lo: p("0"),
            hi: p("0.5"),
        };
        assert!(refute(&StepFunction::real(0.0), &a).is_some());
        assert!(refute(&StepFunction::real(1.0), &a).is_some());
    }
}
