//! Finite unions of points and open intervals in the positive reals.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// An open interval `(lo, hi)`; `hi = None` means unbounded above.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OpenInterval {
    lo: Rational,
    hi: Option<Rational>,
}

impl OpenInterval {
    pub fn new(lo: Rational, hi: Option<Rational>) -> Result<Self> {
        if lo.is_negative() {
            return Err(Error::InvalidChoiceSet(format!(
                "interval lower end {lo} is negative"
            )));
        }
        if let Some(h) = &hi {
            if h <= &lo {
                return Err(Error::InvalidChoiceSet(format!(
                    "empty interval ({lo}, {h})"
                )));
            }
        }
        Ok(OpenInterval { lo, hi })
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> Option<&Rational> {
        self.hi.as_ref()
    }

    pub fn contains(&self, r: &Rational) -> bool {
        r > &self.lo && self.hi.as_ref().is_none_or(|h| r < h)
    }

    /// A representative point: `lo + (hi - lo)/4`, or `lo + 1` when unbounded.
    fn representative(&self) -> Rational {
        match &self.hi {
            Some(h) => &self.lo + &((h - &self.lo) / Rational::from_integer(4)),
            None => &self.lo + &Rational::one(),
        }
    }
}

impl Serialize for OpenInterval {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let hi = self
            .hi
            .as_ref()
            .map_or_else(|| "inf".to_string(), ToString::to_string);
        [self.lo.to_string(), hi].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OpenInterval {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let [lo, hi] = <[String; 2]>::deserialize(deserializer)?;
        let lo: Rational = lo.parse().map_err(D::Error::custom)?;
        let hi = match hi.trim() {
            "inf" | "+inf" => None,
            h => Some(h.parse::<Rational>().map_err(D::Error::custom)?),
        };
        OpenInterval::new(lo, hi).map_err(D::Error::custom)
    }
}

/// `sup |x - y|` over a choice set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Diameter {
    Finite(Rational),
    Infinite,
}

impl Diameter {
    /// `value < self`.
    pub fn exceeds(&self, value: &Rational) -> bool {
        match self {
            Diameter::Finite(d) => d > value,
            Diameter::Infinite => true,
        }
    }
}

impl fmt::Display for Diameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diameter::Finite(d) => write!(f, "{d}"),
            Diameter::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Diameter {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChoiceSet {
    #[serde(default)]
    points: BTreeSet<Rational>,
    #[serde(default)]
    intervals: Vec<OpenInterval>,
}

/// A nonempty set of admissible answers: finitely many points plus finitely
/// many open intervals, all inside `(0, inf)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawChoiceSet")]
pub struct ChoiceSet {
    points: BTreeSet<Rational>,
    intervals: Vec<OpenInterval>,
}

impl TryFrom<RawChoiceSet> for ChoiceSet {
    type Error = Error;
    fn try_from(raw: RawChoiceSet) -> Result<Self> {
        ChoiceSet::new(raw.points, raw.intervals)
    }
}

/// Why [`ChoiceSet::pick_within`] found nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PickFailure {
    /// The set does not meet the requested range at all.
    Disjoint,
    /// It meets the range only in values that must be avoided.
    Exhausted,
}

impl ChoiceSet {
    pub fn new(
        points: impl IntoIterator<Item = Rational>,
        intervals: Vec<OpenInterval>,
    ) -> Result<Self> {
        let points: BTreeSet<Rational> = points.into_iter().collect();
        if points.is_empty() && intervals.is_empty() {
            return Err(Error::InvalidChoiceSet("choice set is empty".into()));
        }
        if let Some(p) = points.iter().find(|p| !p.is_positive()) {
            return Err(Error::InvalidChoiceSet(format!(
                "point {p} is not positive"
            )));
        }
        Ok(ChoiceSet { points, intervals })
    }

    pub fn point(r: Rational) -> Result<Self> {
        Self::new([r], Vec::new())
    }

    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new([], vec![OpenInterval::new(lo, Some(hi))?])
    }

    /// `(lo, inf)`.
    pub fn above(lo: Rational) -> Result<Self> {
        Self::new([], vec![OpenInterval::new(lo, None)?])
    }

    pub fn points(&self) -> &BTreeSet<Rational> {
        &self.points
    }

    pub fn intervals(&self) -> &[OpenInterval] {
        &self.intervals
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.points.contains(r) || self.intervals.iter().any(|i| i.contains(r))
    }

    pub fn diameter(&self) -> Diameter {
        if self.intervals.iter().any(|i| i.hi.is_none()) {
            return Diameter::Infinite;
        }
        let lows = self
            .points
            .iter()
            .chain(self.intervals.iter().map(|i| &i.lo));
        let highs = self
            .points
            .iter()
            .chain(self.intervals.iter().filter_map(|i| i.hi.as_ref()));
        let inf = lows.min().expect("choice sets are nonempty");
        let sup = highs.max().expect("choice sets are nonempty");
        Diameter::Finite(sup - inf)
    }

    /// Contains at least two values.
    pub fn is_nondegenerate(&self) -> bool {
        !self.intervals.is_empty() || self.points.len() >= 2
    }

    /// The least of the points and the interval representatives
    /// `lo + (hi - lo)/4`.
    pub fn canonical_answer(&self) -> Rational {
        self.points
            .iter()
            .cloned()
            .chain(self.intervals.iter().map(OpenInterval::representative))
            .min()
            .expect("choice sets are nonempty")
    }

    /// Some element `x` with `|x - center| > radius`, if one exists.
    pub fn value_far_from(&self, center: &Rational, radius: &Rational) -> Option<Rational> {
        if let Some(p) = self.points.iter().find(|p| &(*p - center).abs() > radius) {
            return Some(p.clone());
        }
        let above = center + radius;
        let below = center - radius;
        for i in &self.intervals {
            let floor = i.lo.clone().max(above.clone());
            match &i.hi {
                None => return Some(floor + Rational::one()),
                Some(h) if &floor < h => return Some(floor.midpoint(h)),
                _ => {}
            }
            let ceil = match &i.hi {
                Some(h) => h.clone().min(below.clone()),
                None => below.clone(),
            };
            if i.lo < ceil {
                return Some(i.lo.midpoint(&ceil));
            }
        }
        None
    }

    /// A value of the set inside `[lo, hi)` that is not in `avoid`.
    ///
    /// Points are preferred in ascending order. Inside an interval the
    /// midpoint of the overlap is tried first, then repeatedly bisected
    /// toward the upper end until it misses `avoid`.
    pub fn pick_within(
        &self,
        lo: &Rational,
        hi: &Rational,
        avoid: &BTreeSet<Rational>,
    ) -> std::result::Result<Rational, PickFailure> {
        let mut meets = false;
        for p in self.points.range(lo.clone()..hi.clone()) {
            meets = true;
            if !avoid.contains(p) {
                return Ok(p.clone());
            }
        }
        for i in &self.intervals {
            let floor = i.lo.clone().max(lo.clone());
            let ceil = match &i.hi {
                Some(h) => h.clone().min(hi.clone()),
                None => hi.clone(),
            };
            if floor >= ceil {
                continue;
            }
            let mut candidate = floor.midpoint(&ceil);
            while avoid.contains(&candidate) {
                candidate = candidate.midpoint(&ceil);
            }
            return Ok(candidate);
        }
        Err(if meets {
            PickFailure::Exhausted
        } else {
            PickFailure::Disjoint
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_empty_and_nonpositive() {
        assert!(ChoiceSet::new([], vec![]).is_err());
        assert!(ChoiceSet::point(q("0")).is_err());
        assert!(ChoiceSet::interval(q("2"), q("2")).is_err());
        assert!(ChoiceSet::interval(q("-1"), q("2")).is_err());
    }

    #[test]
    fn membership_and_diameter() {
        let s = ChoiceSet::new(
            [q("1"), q("100")],
            vec![OpenInterval::new(q("3"), Some(q("4"))).unwrap()],
        )
        .unwrap();
        assert!(
            s.contains(&q("1"))
                && s.contains(&q("7/2"))
                && !s.contains(&q("3"))
                && !s.contains(&q("4"))
        );
        assert_eq!(s.diameter(), Diameter::Finite(q("99")));
        assert_eq!(
            ChoiceSet::point(q("5")).unwrap().diameter(),
            Diameter::Finite(q("0"))
        );
        assert_eq!(
            ChoiceSet::above(q("1")).unwrap().diameter(),
            Diameter::Infinite
        );
        assert!(Diameter::Infinite > Diameter::Finite(q("1000000")));
        assert!(!ChoiceSet::point(q("5")).unwrap().is_nondegenerate());
    }

    #[test]
    fn canonical_answer_orders_points_and_intervals() {
        let s = ChoiceSet::new(
            [q("2")],
            vec![OpenInterval::new(q("1"), Some(q("3"))).unwrap()],
        )
        .unwrap();
        assert_eq!(s.canonical_answer(), q("3/2"));
        let s = ChoiceSet::new(
            [q("1")],
            vec![OpenInterval::new(q("1"), Some(q("3"))).unwrap()],
        )
        .unwrap();
        assert_eq!(s.canonical_answer(), q("1"));
    }

    #[test]
    fn far_values() {
        let s = ChoiceSet::new([q("1"), q("100")], vec![]).unwrap();
        assert_eq!(s.value_far_from(&q("1"), &q("2")), Some(q("100")));
        assert_eq!(s.value_far_from(&q("50"), &q("60")), None);
        let i = ChoiceSet::interval(q("0"), q("10")).unwrap();
        let x = i.value_far_from(&q("5"), &q("3")).unwrap();
        assert!(i.contains(&x) && (&x - &q("5")).abs() > q("3"));
        assert_eq!(i.value_far_from(&q("5"), &q("5")), None);
        let x = ChoiceSet::above(q("1"))
            .unwrap()
            .value_far_from(&q("2"), &q("7"))
            .unwrap();
        assert!(x > q("9"));
    }

    #[test]
    fn pick_within_bisects_past_used_values() {
        let s = ChoiceSet::above(q("0")).unwrap();
        let mut used = BTreeSet::new();
        for _ in 0..20 {
            let r = s.pick_within(&q("1"), &q("2"), &used).unwrap();
            assert!(r >= q("1") && r < q("2") && !used.contains(&r));
            used.insert(r);
        }
        let pts = ChoiceSet::new([q("1")], vec![]).unwrap();
        assert_eq!(
            pts.pick_within(&q("2"), &q("3"), &used),
            Err(PickFailure::Disjoint)
        );
        let used: BTreeSet<_> = [q("1")].into();
        assert_eq!(
            pts.pick_within(&q("1"), &q("3"), &used),
            Err(PickFailure::Exhausted)
        );
    }

    #[test]
    fn json_shape() {
        let s: ChoiceSet =
            serde_json::from_str(r#"{"points":["1","100"],"intervals":[["0","inf"],["1/2","3"]]}"#)
                .unwrap();
        assert_eq!(s.diameter(), Diameter::Infinite);
        let out = serde_json::to_value(&s).unwrap();
        assert_eq!(out["intervals"][0], serde_json::json!(["0", "inf"]));
        assert!(serde_json::from_str::<ChoiceSet>(r#"{"points":[]}"#).is_err());
    }
}
