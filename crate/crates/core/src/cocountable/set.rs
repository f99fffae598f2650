use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SetTag {
    Countable,
    CoCountable,
}

/// A member of the countable/co-countable sigma-algebra on `[0, 1]`:
/// either a finite point set or the complement of one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocountableSet {
    pub tag: SetTag,
    pub points: BTreeSet<Point>,
}

impl CocountableSet {
    pub fn countable(points: impl IntoIterator<Item = Point>) -> Self {
        Self {
            tag: SetTag::Countable,
            points: points.into_iter().collect(),
        }
    }

    pub fn cocountable(points: impl IntoIterator<Item = Point>) -> Self {
        Self {
            tag: SetTag::CoCountable,
            points: points.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Self::countable([])
    }

    pub fn everything() -> Self {
        Self::cocountable([])
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self.tag {
            SetTag::Countable => self.points.contains(p),
            SetTag::CoCountable => !self.points.contains(p),
        }
    }

    pub fn complement(&self) -> Self {
        let tag = match self.tag {
            SetTag::Countable => SetTag::CoCountable,
            SetTag::CoCountable => SetTag::Countable,
        };
        Self {
            tag,
            points: self.points.clone(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        use SetTag::*;
        match (self.tag, other.tag) {
            (Countable, Countable) => Self::countable(self.points.union(&other.points).cloned()),
            (Countable, CoCountable) => Self::cocountable(other.points.difference(&self.points).cloned()),
            (CoCountable, Countable) => Self::cocountable(self.points.difference(&other.points).cloned()),
            (CoCountable, CoCountable) => Self::cocountable(self.points.intersection(&other.points).cloned()),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.complement().union(&other.complement()).complement()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Point {
        Point::parse(s).unwrap()
    }

    #[test]
    fn tag_arithmetic() {
        let a = CocountableSet::countable([p("0.1"), p("0.2")]);
        let b = CocountableSet::cocountable([p("0.2"), p("0.3")]);
        let u = a.union(&b);
        assert_eq!(u.tag, SetTag::CoCountable);
        assert!(u.contains(&p("0.2")) && !u.contains(&p("0.3")) && u.contains(&p("0.9")));
        let i = a.intersection(&b);
        assert_eq!(i, CocountableSet::countable([p("0.1")]));
        assert_eq!(a.complement().complement(), a);
        assert_eq!(a.union(&a.complement()), CocountableSet::everything());
        assert_eq!(b.intersection(&b.complement()), CocountableSet::empty());
    }

    #[test]
    fn membership_matches_pointwise_definition() {
        let sets = [
            CocountableSet::countable([p("0.1"), p("0.5")]),
            CocountableSet::cocountable([p("0.5"), p("0.7")]),
            CocountableSet::empty(),
            CocountableSet::everything(),
        ];
        let probes = [p("0.1"), p("0.5"), p("0.7"), p("0.9")];
        for a in &sets {
            for b in &sets {
                for q in &probes {
                    assert_eq!(a.union(b).contains(q), a.contains(q) || b.contains(q));
                    assert_eq!(a.intersection(b).contains(q), a.contains(q) && b.contains(q));
                    assert_eq!(a.complement().contains(q), !a.contains(q));
                }
            }
        }
    }
}
