//! Domain vocabulary: elements, times, points, access sequences, weights and
//! cost ledgers.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A key in the universe `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(u32);

impl Element {
    pub const fn new(key: u32) -> Self {
        Element(key)
    }

    pub const fn get(self) -> u32 {
        self.0
    }

    /// Zero-based slot for array-indexed tables.
    pub const fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn check(self, n: usize) -> Result<Self> {
        if self.0 == 0 || self.0 as usize > n {
            Err(Error::ElementOutOfRange { key: self.0, n })
        } else {
            Ok(self)
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A search index `1..=m`. Zero means "never accessed".
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Time(u32);

impl Time {
    pub const NEVER: Time = Time(0);

    pub const fn new(t: u32) -> Self {
        Time(t)
    }

    pub const fn get(self) -> u32 {
        self.0
    }

    pub const fn next(self) -> Self {
        Time(self.0 + 1)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A grid point `(x, y)`: element `x` accessed at time `y`.
///
/// Points order row-major (by `y`, then `x`), so iterating a [`PointSet`]
/// walks the execution forward in time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: Element,
    pub y: Time,
}

impl Point {
    pub const fn new(x: u32, y: u32) -> Self {
        Point { x: Element(x), y: Time(y) }
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// The search workload `s_1, ..., s_m` over the universe `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessSequence {
    n: usize,
    searches: Vec<Element>,
}

impl AccessSequence {
    pub fn new(n: usize, searches: Vec<Element>) -> Result<Self> {
        for s in &searches {
            s.check(n)?;
        }
        Ok(AccessSequence { n, searches })
    }

    pub fn from_keys(n: usize, keys: &[u32]) -> Result<Self> {
        Self::new(n, keys.iter().copied().map(Element::new).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.searches.len()
    }

    pub fn searches(&self) -> &[Element] {
        &self.searches
    }

    pub fn is_empty(&self) -> bool {
        self.searches.is_empty()
    }

    /// The search at 1-based time `t`.
    pub fn at(&self, t: Time) -> Element {
        self.searches[t.get() as usize - 1]
    }

    /// The geometric view `{(s_i, i)}`.
    pub fn geometric_view(&self) -> PointSet {
        let mut p = PointSet::new(self.n, self.m());
        for (i, &s) in self.searches.iter().enumerate() {
            p.points.insert(Point { x: s, y: Time(i as u32 + 1) });
        }
        p
    }

    /// The first `len` searches as a sequence over the same universe.
    pub fn prefix(&self, len: usize) -> AccessSequence {
        AccessSequence { n: self.n, searches: self.searches[..len].to_vec() }
    }
}

/// Free-function form of [`AccessSequence::geometric_view`].
pub fn geometric_view_of_sequence(s: &AccessSequence) -> PointSet {
    s.geometric_view()
}

/// A deduplicated set of points confined to the `n x m` grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    n: usize,
    m: usize,
    points: BTreeSet<Point>,
}

impl PointSet {
    pub fn new(n: usize, m: usize) -> Self {
        PointSet { n, m, points: BTreeSet::new() }
    }

    pub fn from_points(n: usize, m: usize, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        let mut set = PointSet::new(n, m);
        for p in points {
            set.insert(p)?;
        }
        Ok(set)
    }

    /// Inserts a point; returns whether it was new.
    pub fn insert(&mut self, p: Point) -> Result<bool> {
        if p.x.get() == 0 || p.x.get() as usize > self.n || p.y.get() == 0 || p.y.get() as usize > self.m {
            return Err(Error::PointOutOfBounds { point: p, n: self.n, m: self.m });
        }
        Ok(self.points.insert(p))
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.contains(p)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Points in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = &Point> + '_ {
        self.points.iter()
    }

    pub fn points(&self) -> &BTreeSet<Point> {
        &self.points
    }

    /// Points with `y <= row`.
    pub fn rows_through(&self, row: Time) -> PointSet {
        PointSet { n: self.n, m: self.m, points: self.points.iter().filter(|p| p.y <= row).copied().collect() }
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet {
            n: self.n.max(other.n),
            m: self.m.max(other.m),
            points: self.points.union(&other.points).copied().collect(),
        }
    }
}

/// Positive exact weights `w(x)` with cached prefix sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightAssignment {
    weights: Vec<BigRational>,
    // prefix[k] = w(1) + ... + w(k)
    prefix: Vec<BigRational>,
}

impl WeightAssignment {
    pub fn new(weights: Vec<BigRational>) -> Result<Self> {
        let mut prefix = Vec::with_capacity(weights.len() + 1);
        prefix.push(BigRational::zero());
        for (i, w) in weights.iter().enumerate() {
            if !w.is_positive() {
                return Err(Error::InvalidWeight {
                    element: Element(i as u32 + 1),
                    reason: format!("{w} is not positive"),
                });
            }
            let next = &prefix[i] + w;
            prefix.push(next);
        }
        Ok(WeightAssignment { weights, prefix })
    }

    pub fn uniform(n: usize) -> Self {
        Self::new(vec![BigRational::one(); n]).expect("unit weights are positive")
    }

    pub fn from_integers(ws: &[u64]) -> Result<Self> {
        Self::new(ws.iter().map(|&w| BigRational::from_integer(BigInt::from(w))).collect())
    }

    /// Parses the two-column text format: one `element p/q` pair per line.
    /// Blank lines and `#` comments are ignored; every element of `1..=n`
    /// must appear exactly once.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let mut slots: Vec<Option<BigRational>> = vec![None; n];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace();
            let (Some(key), Some(w), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::Parse(format!("line {}: expected `element p/q`", lineno + 1)));
            };
            let key: u32 =
                key.parse().map_err(|_| Error::Parse(format!("line {}: bad element `{key}`", lineno + 1)))?;
            let e = Element(key).check(n)?;
            let w: BigRational =
                w.parse().map_err(|_| Error::Parse(format!("line {}: bad rational `{w}`", lineno + 1)))?;
            if slots[e.index()].replace(w).is_some() {
                return Err(Error::Parse(format!("line {}: duplicate element {key}", lineno + 1)));
            }
        }
        let weights = slots
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                w.ok_or_else(|| Error::InvalidWeight { element: Element(i as u32 + 1), reason: "missing".into() })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(weights)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, w) in self.weights.iter().enumerate() {
            out.push_str(&format!("{} {}/{}\n", i + 1, w.numer(), w.denom()));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, x: Element) -> &BigRational {
        &self.weights[x.index()]
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// `W`, the total weight.
    pub fn total(&self) -> &BigRational {
        &self.prefix[self.weights.len()]
    }

    /// Total weight of the closed key interval `[lo, hi]`; zero when empty.
    pub fn interval(&self, lo: u32, hi: u32) -> BigRational {
        if lo > hi {
            return BigRational::zero();
        }
        &self.prefix[hi as usize] - &self.prefix[lo as usize - 1]
    }

    /// Every weight multiplied by `2^c`.
    pub fn scaled_pow2(&self, c: i32) -> Self {
        let factor = if c >= 0 {
            BigRational::from_integer(BigInt::one() << c as usize)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-c) as usize)
        };
        Self::new(self.weights.iter().map(|w| w * &factor).collect()).expect("scaling keeps weights positive")
    }
}

/// One search's entry in a [`CostLedger`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCost {
    pub time: Time,
    pub searched: Element,
    pub accessed: u64,
}

/// Per-search access counts and their total.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CostLedger {
    per_search: Vec<SearchCost>,
    total: u64,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, time: Time, searched: Element, accessed: u64) {
        debug_assert!(accessed >= 1);
        self.per_search.push(SearchCost { time, searched, accessed });
        self.total += accessed;
    }

    pub fn per_search(&self) -> &[SearchCost] {
        &self.per_search
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.per_search.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_search.is_empty()
    }

    /// Appends another ledger whose times continue this one.
    pub fn extend(&mut self, other: &CostLedger) {
        for c in &other.per_search {
            self.record(c.time, c.searched, c.accessed);
        }
    }
}

/// `Σ accessedCount_i` over the ledger.
pub fn total_cost(ledger: &CostLedger) -> u64 {
    ledger.per_search.iter().map(|c| c.accessed).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(u32, u32)]) -> BTreeSet<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn geometric_view_examples() {
        let s = AccessSequence::from_keys(3, &[1, 3, 2]).unwrap();
        assert_eq!(s.geometric_view().points(), &pts(&[(1, 1), (3, 2), (2, 3)]));

        let s = AccessSequence::from_keys(3, &[]).unwrap();
        assert!(geometric_view_of_sequence(&s).is_empty());

        let s = AccessSequence::from_keys(3, &[2, 2, 2]).unwrap();
        let p = s.geometric_view();
        assert_eq!(p.len(), 3);
        assert_eq!(p.points(), &pts(&[(2, 1), (2, 2), (2, 3)]));
    }

    #[test]
    fn sequence_rejects_out_of_range() {
        assert!(matches!(AccessSequence::from_keys(3, &[1, 4]), Err(Error::ElementOutOfRange { key: 4, n: 3 })));
        assert!(AccessSequence::from_keys(3, &[0]).is_err());
    }

    #[test]
    fn point_set_bounds_and_dedup() {
        let mut p = PointSet::new(2, 2);
        assert!(p.insert(Point::new(1, 1)).unwrap());
        assert!(!p.insert(Point::new(1, 1)).unwrap());
        assert!(p.insert(Point::new(3, 1)).is_err());
        assert!(p.insert(Point::new(1, 0)).is_err());
    }

    #[test]
    fn ledger_totals() {
        let mut l = CostLedger::new();
        for (i, c) in [1u64, 2, 3].into_iter().enumerate() {
            l.record(Time::new(i as u32 + 1), Element::new(1), c);
        }
        assert_eq!(total_cost(&l), 6);
        assert_eq!(l.total(), 6);
        assert_eq!(total_cost(&CostLedger::new()), 0);

        let mut one = CostLedger::new();
        one.record(Time::new(1), Element::new(5), 5);
        assert_eq!(total_cost(&one), 5);

        let mut joined = l.clone();
        joined.extend(&one);
        assert_eq!(joined.total(), l.total() + one.total());
    }

    #[test]
    fn weights_parse_and_total() {
        let w = WeightAssignment::parse(3, "1 4\n# c\n2 1/2\n3 3/2\n").unwrap();
        assert_eq!(w.total(), &BigRational::from_integer(6.into()));
        assert_eq!(w.interval(2, 3), BigRational::from_integer(2.into()));
        assert_eq!(w.interval(3, 2), BigRational::zero());
        assert!(WeightAssignment::parse(3, "1 1\n2 1\n").is_err());
        assert!(WeightAssignment::parse(2, "1 1\n2 0\n").is_err());
        assert!(WeightAssignment::parse(2, "1 1\n1 1\n2 1\n").is_err());
        let round = WeightAssignment::parse(3, &w.to_text()).unwrap();
        assert_eq!(round, w);
    }
}
