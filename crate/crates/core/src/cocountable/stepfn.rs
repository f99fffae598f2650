use std::collections::{BTreeMap, BTreeSet};

use super::{CocountableSet, Point, SetTag, TailExpr};
use crate::algebra::{Element, C64};
use crate::document::ElementDocument;
use crate::error::{Error, Result};
use crate::norm::State;
use crate::tolerance::Tolerance;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Where a function is sampled: at a generic point (one outside every
/// exceptional set, where the default applies) or at a named point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Probe {
    Generic,
    At(Point),
}

/// A measurable function for the countable/co-countable sigma-algebra.
///
/// The value at `t` is, in order of precedence: the explicit exception at
/// `t`; the tail value `tail(n)` if `t = p_n` is a reserved point and a
/// tail is present; otherwise `default`. Exceptions equal to the value
/// they would otherwise take are dropped on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    default: C64,
    exceptions: BTreeMap<Point, C64>,
    tail: Option<TailExpr>,
}

/// Pointwise *-algebra operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    Add,
    Mul,
    Star,
    Scale(C64),
}

impl StepFunction {
    pub fn new(default: C64, exceptions: BTreeMap<Point, C64>, tail: Option<TailExpr>) -> Self {
        let mut f = Self {
            default,
            exceptions,
            tail,
        };
        f.normalize();
        f
    }

    pub fn constant(c: C64) -> Self {
        Self::new(c, BTreeMap::new(), None)
    }

    pub fn real(r: f64) -> Self {
        Self::constant(C64::new(r, 0.0))
    }

    /// Convenience constructor from `(label, value)` pairs.
    pub fn with_exceptions(default: C64, exceptions: &[(&str, C64)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (label, v) in exceptions {
            map.insert(Point::parse(label)?, *v);
        }
        Ok(Self::new(default, map, None))
    }

    pub fn with_tail(mut self, tail: TailExpr) -> Self {
        self.tail = Some(tail);
        self.normalize();
        self
    }

    /// Indicator of a set in the sigma-algebra.
    pub fn indicator(set: &CocountableSet) -> Self {
        let (inside, outside) = match set.tag {
            SetTag::Countable => (ONE, ZERO),
            SetTag::CoCountable => (ZERO, ONE),
        };
        Self::new(outside, set.points.iter().map(|p| (p.clone(), inside)).collect(), None)
    }

    pub fn point_indicator(p: Point) -> Self {
        Self::indicator(&CocountableSet::countable([p]))
    }

    pub fn default_value(&self) -> C64 {
        self.default
    }

    pub fn exceptions(&self) -> &BTreeMap<Point, C64> {
        &self.exceptions
    }

    pub fn tail(&self) -> Option<&TailExpr> {
        self.tail.as_ref()
    }

    pub fn value_at(&self, p: &Point) -> C64 {
        if let Some(v) = self.exceptions.get(p) {
            return *v;
        }
        self.background(p)
    }

    pub fn value(&self, probe: &Probe) -> C64 {
        match probe {
            Probe::Generic => self.default,
            Probe::At(p) => self.value_at(p),
        }
    }

    /// Values at many probes, evaluating the tail once for all of them.
    pub fn values(&self, probes: &[Probe]) -> Vec<C64> {
        let Some(t) = &self.tail else {
            return probes.iter().map(|p| self.value(p)).collect();
        };
        let tail_index = |p: &Probe| match p {
            Probe::At(pt) if !self.exceptions.contains_key(pt) => pt.reserved_index(),
            _ => None,
        };
        let ns: Vec<usize> = probes.iter().filter_map(tail_index).collect();
        let mut tail_values = t.eval_many(&ns).into_iter();
        probes
            .iter()
            .map(|p| match tail_index(p) {
                Some(_) => tail_values.next().expect("one value per index"),
                None => self.value(p),
            })
            .collect()
    }

    fn background(&self, p: &Point) -> C64 {
        match (&self.tail, p.reserved_index()) {
            (Some(t), Some(n)) => t.eval(n),
            _ => self.default,
        }
    }

    fn normalize(&mut self) {
        if let Some(c) = self.tail.as_ref().and_then(|t| t.as_constant()) {
            if c == self.default {
                self.tail = None;
            }
        }
        let keep: BTreeMap<Point, C64> = self
            .exceptions
            .iter()
            .filter(|(p, v)| **v != self.background(p))
            .map(|(p, v)| (p.clone(), *v))
            .collect();
        self.exceptions = keep;
    }

    fn tail_or_const(&self) -> TailExpr {
        self.tail.clone().unwrap_or_else(|| TailExpr::constant(self.default))
    }

    /// Pointwise unary map; `tail_map` must describe the same map on tails.
    pub fn map(&self, f: impl Fn(C64) -> C64, tail_map: impl Fn(&TailExpr) -> TailExpr) -> Self {
        Self::new(
            f(self.default),
            self.exceptions.iter().map(|(p, v)| (p.clone(), f(*v))).collect(),
            self.tail.as_ref().map(tail_map),
        )
    }

    /// Pointwise binary map over the union of exceptional supports.
    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(C64, C64) -> C64,
        tail_map: impl Fn(&TailExpr, &TailExpr) -> TailExpr,
    ) -> Self {
        let keys: BTreeSet<&Point> = self.exceptions.keys().chain(other.exceptions.keys()).collect();
        let exceptions = keys
            .into_iter()
            .map(|p| (p.clone(), f(self.value_at(p), other.value_at(p))))
            .collect();
        let tail = if self.tail.is_some() || other.tail.is_some() {
            Some(tail_map(&self.tail_or_const(), &other.tail_or_const()))
        } else {
            None
        };
        Self::new(f(self.default, other.default), exceptions, tail)
    }

    pub fn combine(op: Op, f: &Self, g: Option<&Self>) -> Result<Self> {
        let need = || Error::schema("operand", "binary operation needs two operands");
        Ok(match op {
            Op::Add => f.zip_with(g.ok_or_else(need)?, |a, b| a + b, |a, b| a.add(b)),
            Op::Mul => f.zip_with(g.ok_or_else(need)?, |a, b| a * b, |a, b| a.mul(b)),
            Op::Star => f.map(|v| v.conj(), |t| t.conj()),
            Op::Scale(alpha) => f.map(|v| v * alpha, |t| t.scale(alpha)),
        })
    }

    /// Probe set shared by the given functions: the generic point, every
    /// exceptional point, and the first `probe_count` reserved points when
    /// any of them carries a tail.
    pub fn probes(fs: &[&Self], tol: &Tolerance) -> Vec<Probe> {
        let mut pts: BTreeSet<Point> = BTreeSet::new();
        for f in fs {
            pts.extend(f.exceptions.keys().cloned());
        }
        if fs.iter().any(|f| f.tail.is_some()) {
            pts.extend((1..=tol.probe_count).map(Point::reserved));
        }
        std::iter::once(Probe::Generic)
            .chain(pts.into_iter().map(Probe::At))
            .collect()
    }

    pub fn probe_values(&self, tol: &Tolerance) -> Vec<C64> {
        self.values(&Self::probes(&[self], tol))
    }

    /// Growth heuristic for symbolic tails: the tail is declared unbounded
    /// when its modulus on the extended grid `n = 2P, 4P, 8P, 16P` exceeds
    /// twice its maximum over `n <= P`, or when any value is not finite.
    pub fn tail_unbounded(&self, tol: &Tolerance) -> bool {
        let Some(t) = &self.tail else { return false };
        let p = tol.probe_count;
        let ns: Vec<usize> = (1..=p).chain([2, 4, 8, 16].map(|k| k * p)).collect();
        let vals = t.eval_many(&ns);
        let (head, tail) = vals.split_at(p);
        let near = head.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        let far = tail.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        !near.is_finite() || !far.is_finite() || far > 2.0 * near.max(f64::MIN_POSITIVE)
    }

    /// Indicator of the strict sublevel set `{t : Re x(t) < lambda}`.
    pub fn strict_sublevel(&self, lambda: f64) -> Self {
        let ind = |v: C64| if v.re < lambda { ONE } else { ZERO };
        self.map(ind, |t| {
            let re = t.add(&t.conj()).scale(C64::new(0.5, 0.0));
            let d = TailExpr::real(lambda).add(&re.scale(C64::new(-1.0, 0.0)));
            let abs = d.conj().mul(&d).sqrt();
            d.add(&abs).scale(C64::new(0.5, 0.0)).supp()
        })
    }

    /// The tag of the support `{t : f(t) != 0}`. Every model function has
    /// countably many non-default values, so the tag is fixed by the default.
    pub fn support_tag(&self) -> SetTag {
        if self.default == ZERO {
            SetTag::Countable
        } else {
            SetTag::CoCountable
        }
    }

    /// The support as an explicit set, available when there is no tail.
    pub fn support_set(&self) -> Option<CocountableSet> {
        if self.tail.is_some() {
            return None;
        }
        Some(match self.support_tag() {
            SetTag::Countable => CocountableSet::countable(
                self.exceptions
                    .iter()
                    .filter(|(_, v)| **v != ZERO)
                    .map(|(p, _)| p.clone()),
            ),
            SetTag::CoCountable => CocountableSet::cocountable(
                self.exceptions
                    .iter()
                    .filter(|(_, v)| **v == ZERO)
                    .map(|(p, _)| p.clone()),
            ),
        })
    }
}

impl Element for StepFunction {
    fn zero_like(&self) -> Self {
        Self::constant(ZERO)
    }

    fn one_like(&self) -> Self {
        Self::constant(ONE)
    }

    fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b, |a, b| a.add(b))
    }

    fn scale(&self, alpha: C64) -> Self {
        self.map(|v| v * alpha, |t| t.scale(alpha))
    }

    fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b, |a, b| a.mul(b))
    }

    fn star(&self) -> Self {
        self.map(|v| v.conj(), |t| t.conj())
    }

    fn check_compatible(&self, _other: &Self) -> Result<()> {
        Ok(())
    }

    fn distance(&self, other: &Self, tol: &Tolerance) -> f64 {
        let probes = Self::probes(&[self, other], tol);
        self.values(&probes)
            .iter()
            .zip(other.values(&probes))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Real and `>= -eps_psd` at every probe. Pointwise, a non-negative
    /// function is `conj(sqrt f) * sqrt f`, matching the sums-of-squares cone.
    fn in_cone(&self, tol: &Tolerance) -> bool {
        self.probe_values(tol)
            .iter()
            .all(|v| v.im.abs() <= tol.eps_eq * v.re.abs().max(1.0) && v.re >= -tol.eps_psd)
    }

    fn min_spectral_value(&self, tol: &Tolerance) -> Result<f64> {
        self.require_hermitian(tol)?;
        Ok(self
            .probe_values(tol)
            .iter()
            .map(|v| v.re)
            .fold(f64::INFINITY, f64::min))
    }

    fn sqrt_psd(&self, tol: &Tolerance) -> Result<Self> {
        if !self.in_cone(tol) {
            let min = self
                .probe_values(tol)
                .iter()
                .map(|v| v.re)
                .fold(f64::INFINITY, f64::min);
            return Err(Error::NotPositive { min });
        }
        Ok(self.map(|v| C64::new(v.re.max(0.0).sqrt(), 0.0), |t| t.sqrt()))
    }

    /// Indicator of the support.
    fn right_projection(&self, _tol: &Tolerance) -> Self {
        self.map(|v| if v == ZERO { ZERO } else { ONE }, |t| t.supp())
    }

    fn order_bracket(&self, tol: &Tolerance) -> Option<f64> {
        if self.tail_unbounded(tol) {
            return None;
        }
        Some(self.probe_values(tol).iter().map(|v| v.norm()).fold(0.0, f64::max))
    }

    fn apply_state(&self, state: &State) -> Result<C64> {
        match state {
            State::Weights(atoms) => Ok(atoms.iter().map(|(p, w)| self.value(p) * *w).fold(ZERO, |a, b| a + b)),
            _ => Err(Error::StateMismatch),
        }
    }

    fn to_document(&self) -> ElementDocument {
        ElementDocument::Stepfn {
            default: [self.default.re, self.default.im],
            exceptions: self.exceptions.iter().map(|(p, v)| (p.label(), [v.re, v.im])).collect(),
            tail: self.tail.as_ref().map(|t| t.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn p(s: &str) -> Point {
        Point::parse(s).unwrap()
    }

    #[test]
    fn pointwise_product() {
        let f = StepFunction::with_exceptions(c(1.0, 0.0), &[("0.5", c(0.0, 0.0))]).unwrap();
        let g = StepFunction::with_exceptions(c(2.0, 0.0), &[("0.25", c(3.0, 0.0))]).unwrap();
        let h = StepFunction::combine(Op::Mul, &f, Some(&g)).unwrap();
        let expected =
            StepFunction::with_exceptions(c(2.0, 0.0), &[("0.5", c(0.0, 0.0)), ("0.25", c(3.0, 0.0))]).unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn star_and_cancellation() {
        let f = StepFunction::constant(c(0.0, 1.0));
        let s = StepFunction::combine(Op::Star, &f, None).unwrap();
        assert_eq!(s, StepFunction::constant(c(0.0, -1.0)));

        let g = StepFunction::with_exceptions(c(1.5, -2.0), &[("0.7", c(4.0, 1.0))])
            .unwrap()
            .with_tail(TailExpr::parse("1/n").unwrap());
        let neg = StepFunction::combine(Op::Scale(c(-1.0, 0.0)), &g, None).unwrap();
        let z = StepFunction::combine(Op::Add, &g, Some(&neg)).unwrap();
        assert!(z.approx_eq(&z.zero_like(), &tol()));
        assert!(z.exceptions().is_empty());
        assert!(StepFunction::combine(Op::Add, &g, None).is_err());
    }

    #[test]
    fn exceptions_override_tail() {
        let f = StepFunction::with_exceptions(c(0.0, 0.0), &[("0.25", c(9.0, 0.0))])
            .unwrap()
            .with_tail(TailExpr::index());
        assert_eq!(f.value_at(&Point::reserved(2)), c(9.0, 0.0));
        assert_eq!(f.value_at(&Point::reserved(3)), c(3.0, 0.0));
        assert_eq!(f.value_at(&p("0.3")), c(0.0, 0.0));
        // an exception equal to the tail value is redundant
        let g = StepFunction::with_exceptions(c(0.0, 0.0), &[("0.2", c(3.0, 0.0))])
            .unwrap()
            .with_tail(TailExpr::index());
        assert!(g.exceptions().is_empty());
    }

    #[test]
    fn support_projection() {
        let t = tol();
        let f = StepFunction::with_exceptions(c(2.0, 0.0), &[("0.5", c(0.0, 0.0))]).unwrap();
        let e = f.right_projection(&t);
        assert_eq!(
            e,
            StepFunction::with_exceptions(c(1.0, 0.0), &[("0.5", c(0.0, 0.0))]).unwrap()
        );
        assert_eq!(StepFunction::real(0.0).right_projection(&t), StepFunction::real(0.0));
        let g = StepFunction::with_exceptions(c(0.0, 0.0), &[("0.5", c(3.0, 0.0))]).unwrap();
        assert_eq!(
            g.right_projection(&t),
            StepFunction::with_exceptions(c(0.0, 0.0), &[("0.5", c(1.0, 0.0))]).unwrap()
        );
    }

    #[test]
    fn cone_and_sqrt_pointwise() {
        let t = tol();
        let f = StepFunction::with_exceptions(c(4.0, 0.0), &[("0.1", c(9.0, 0.0))])
            .unwrap()
            .with_tail(TailExpr::parse("n*n").unwrap());
        assert!(f.in_cone(&t));
        let r = f.sqrt_psd(&t).unwrap();
        assert!(r.mul(&r).approx_eq(&f, &t));
        assert_eq!(r.value_at(&Point::reserved(5)), c(5.0, 0.0));
        let g = StepFunction::with_exceptions(c(1.0, 0.0), &[("0.1", c(-1.0, 0.0))]).unwrap();
        assert!(!g.in_cone(&t));
        assert!(matches!(g.sqrt_psd(&t), Err(Error::NotPositive { .. })));
        assert!(!StepFunction::constant(c(1.0, 1.0)).in_cone(&t));
    }

    #[test]
    fn tail_growth_heuristic() {
        let t = tol();
        let grow = StepFunction::real(0.0).with_tail(TailExpr::index());
        assert!(grow.tail_unbounded(&t));
        assert!(grow.order_bracket(&t).is_none());
        let slow = StepFunction::real(0.0).with_tail(TailExpr::parse("sqrt(n)").unwrap());
        assert!(slow.tail_unbounded(&t));
        let bounded = StepFunction::real(2.0).with_tail(TailExpr::parse("n/(n+1)").unwrap());
        assert!(!bounded.tail_unbounded(&t));
        let decay = StepFunction::real(2.0).with_tail(TailExpr::parse("1/n").unwrap());
        assert_eq!(decay.order_bracket(&t), Some(2.0));
    }

    #[test]
    fn strict_sublevel_matches_pointwise() {
        let t = tol();
        let f = StepFunction::with_exceptions(c(3.0, 0.0), &[("0.5", c(-1.0, 0.0))]).unwrap();
        let e0 = f.strict_sublevel(0.0);
        assert_eq!(e0, StepFunction::point_indicator(p("0.5")));
        assert_eq!(f.strict_sublevel(4.0), StepFunction::real(1.0));
        assert_eq!(f.strict_sublevel(-1.0), StepFunction::real(0.0));

        let g = StepFunction::real(0.0).with_tail(TailExpr::index());
        let e = g.strict_sublevel(3.0);
        for n in 1..10 {
            let expect = if (n as f64) < 3.0 { 1.0 } else { 0.0 };
            assert_eq!(e.value_at(&Point::reserved(n)), c(expect, 0.0));
        }
        assert_eq!(e.default_value(), c(1.0, 0.0));
        assert!(e.mul(&e).approx_eq(&e, &t));
    }

    #[test]
    fn support_tags() {
        let f = StepFunction::with_exceptions(c(2.0, 0.0), &[("0.5", c(0.0, 0.0))]).unwrap();
        assert_eq!(f.support_tag(), SetTag::CoCountable);
        assert_eq!(f.support_set(), Some(CocountableSet::cocountable([p("0.5")])));
        let g = StepFunction::point_indicator(p("0.5"));
        assert_eq!(g.support_set(), Some(CocountableSet::countable([p("0.5")])));
    }
}
