use serde::Serialize;

use crate::error::{Error, Result};

/// A finite union of closed intervals kept in canonical form: sorted by
/// left endpoint, pairwise disjoint, with touching intervals merged.
/// Zero-width intervals (single points) are allowed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    /// Canonicalizes an arbitrary collection of closed intervals.
    pub fn new(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &pairs {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::domain("interval endpoints must be finite"));
            }
            if hi < lo {
                return Err(Error::domain(format!(
                    "interval [{lo}, {hi}] has hi < lo"
                )));
            }
        }
        pairs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self::merge_sorted(pairs))
    }

    /// Canonicalizes a list already sorted by left endpoint. Used by stage
    /// construction where anchors come out of enumeration sorted.
    pub(crate) fn from_sorted(pairs: Vec<(f64, f64)>) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0].0 <= w[1].0));
        Self::merge_sorted(pairs)
    }

    fn merge_sorted(pairs: Vec<(f64, f64)>) -> Self {
        let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(pairs.len().min(1024));
        for (lo, hi) in pairs {
            match intervals.last_mut() {
                // Touching intervals (gap <= 0) merge.
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => intervals.push((lo, hi)),
            }
        }
        IntervalSet { intervals }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn count(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure: the sweep already merged overlaps, so this is a
    /// plain sum of lengths.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    /// Closed-interval membership.
    pub fn contains(&self, x: f64) -> bool {
        let idx = self.intervals.partition_point(|&(lo, _)| lo <= x);
        idx > 0 && x <= self.intervals[idx - 1].1
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.intervals, &other.intervals);
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 <= b[j].0);
            let (lo, hi) = if take_a {
                i += 1;
                a[i - 1]
            } else {
                j += 1;
                b[j - 1]
            };
            match out.last_mut() {
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => out.push((lo, hi)),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.intervals, &other.intervals);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a[i].1 <= b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces of closed-interval intersections can touch at points.
        IntervalSet::merge_sorted(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_pair_merges() {
        let s = IntervalSet::new(vec![(0.0, 0.5), (0.25, 0.75)]).unwrap();
        assert_eq!(s.count(), 1);
        assert_eq!(s.measure(), 0.75);
    }

    #[test]
    fn empty_measure_zero() {
        assert_eq!(IntervalSet::empty().measure(), 0.0);
        assert_eq!(IntervalSet::new(vec![]).unwrap().measure(), 0.0);
    }

    #[test]
    fn touching_intervals_merge() {
        let s = IntervalSet::new(vec![(0.0, 0.25), (0.25, 0.5)]).unwrap();
        assert_eq!(s.count(), 1);
        assert_eq!(s.intervals(), &[(0.0, 0.5)]);
    }

    #[test]
    fn disjoint_intervals_stay_separate() {
        let s = IntervalSet::new(vec![(0.5, 0.6), (0.0, 0.1)]).unwrap();
        assert_eq!(s.count(), 2);
        assert_eq!(s.intervals()[0], (0.0, 0.1));
        assert!((s.measure() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn zero_width_points_allowed() {
        let s = IntervalSet::new(vec![(0.3, 0.3), (0.1, 0.1)]).unwrap();
        assert_eq!(s.count(), 2);
        assert_eq!(s.measure(), 0.0);
        assert!(s.contains(0.3));
        assert!(!s.contains(0.2));
    }

    #[test]
    fn rejects_inverted_and_nan() {
        assert!(IntervalSet::new(vec![(1.0, 0.0)]).is_err());
        assert!(IntervalSet::new(vec![(f64::NAN, 1.0)]).is_err());
    }

    #[test]
    fn contains_hits_closed_endpoints() {
        let s = IntervalSet::new(vec![(0.1, 0.2), (0.4, 0.5)]).unwrap();
        assert!(s.contains(0.1));
        assert!(s.contains(0.2));
        assert!(s.contains(0.45));
        assert!(!s.contains(0.3));
        assert!(!s.contains(0.05));
    }

    #[test]
    fn union_matches_rebuild() {
        let a = IntervalSet::new(vec![(0.0, 0.3), (0.6, 0.9)]).unwrap();
        let b = IntervalSet::new(vec![(0.2, 0.7)]).unwrap();
        let u = a.union(&b);
        assert_eq!(u.intervals(), &[(0.0, 0.9)]);
        let v = b.union(&a);
        assert_eq!(u, v);
    }

    #[test]
    fn intersection_by_hand() {
        let a = IntervalSet::new(vec![(0.0, 0.4), (0.5, 1.0)]).unwrap();
        let b = IntervalSet::new(vec![(0.3, 0.6), (0.9, 2.0)]).unwrap();
        let i = a.intersection(&b);
        assert_eq!(i.intervals(), &[(0.3, 0.4), (0.5, 0.6), (0.9, 1.0)]);
    }

    #[test]
    fn subadditive_measure() {
        let a = IntervalSet::new(vec![(0.0, 0.5), (0.7, 0.8)]).unwrap();
        let b = IntervalSet::new(vec![(0.25, 0.75)]).unwrap();
        let u = a.union(&b);
        assert!(u.measure() <= a.measure() + b.measure() + 1e-15);
    }
}
