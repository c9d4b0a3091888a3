use num_rational::BigRational;

use super::rank::floor_log2;
use crate::error::Result;
use crate::greedyass::{step, LastAccessTable};
use crate::model::{Element, Time, WeightAssignment};

/// A closed key interval `[lo, hi]`; empty when `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyRange {
    pub lo: u32,
    pub hi: u32,
}

impl KeyRange {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn contains(&self, x: Element) -> bool {
        self.lo <= x.get() && x.get() <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> {
        (self.lo..=self.hi).map(Element::new)
    }

    /// Subset test; the empty range is a subset of everything.
    pub fn is_subset_of(&self, other: &KeyRange) -> bool {
        self.is_empty() || (!other.is_empty() && other.lo <= self.lo && self.hi <= other.hi)
    }
}

/// The last-access table at one time together with a weighting.
#[derive(Clone, Debug)]
pub struct NeighborhoodSnapshot<'w> {
    table: LastAccessTable,
    weights: &'w WeightAssignment,
}

impl<'w> NeighborhoodSnapshot<'w> {
    pub fn new(table: LastAccessTable, weights: &'w WeightAssignment) -> Self {
        assert_eq!(table.n(), weights.n(), "weights must cover the table's universe");
        NeighborhoodSnapshot { table, weights }
    }

    pub fn time(&self) -> Time {
        self.table.now()
    }

    pub fn table(&self) -> &LastAccessTable {
        &self.table
    }

    pub fn weights(&self) -> &WeightAssignment {
        self.weights
    }

    fn n(&self) -> u32 {
        self.table.n() as u32
    }

    /// Greatest `a < x` with `rho(a) >= rho(x)`, or 0.
    fn left_wall(&self, x: Element) -> u32 {
        let rho = self.table.as_slice();
        let r = rho[x.index()];
        (1..x.get()).rev().find(|&a| rho[a as usize - 1] >= r).unwrap_or(0)
    }

    /// Least `b > x` with `rho(b) >= rho(x)`, or `n + 1`.
    fn right_wall(&self, x: Element) -> u32 {
        let rho = self.table.as_slice();
        let r = rho[x.index()];
        (x.get() + 1..=self.n()).find(|&b| rho[b as usize - 1] >= r).unwrap_or(self.n() + 1)
    }

    pub fn left_neighborhood(&self, x: Element) -> Result<KeyRange> {
        let x = x.check(self.table.n())?;
        Ok(KeyRange { lo: self.left_wall(x) + 1, hi: x.get() - 1 })
    }

    pub fn right_neighborhood(&self, x: Element) -> Result<KeyRange> {
        let x = x.check(self.table.n())?;
        Ok(KeyRange { lo: x.get() + 1, hi: self.right_wall(x) - 1 })
    }

    /// `Γ(x)`: left neighborhood, `x`, right neighborhood.
    pub fn inclusive_neighborhood(&self, x: Element) -> Result<KeyRange> {
        let x = x.check(self.table.n())?;
        Ok(KeyRange { lo: self.left_wall(x) + 1, hi: self.right_wall(x) - 1 })
    }

    /// `σ(x)`, the weight of the inclusive neighborhood.
    pub fn size(&self, x: Element) -> Result<BigRational> {
        let g = self.inclusive_neighborhood(x)?;
        Ok(self.weights.interval(g.lo, g.hi))
    }

    /// `σ_ℓ(x)`, the weight of the left neighborhood; zero when it is empty.
    pub fn left_size(&self, x: Element) -> Result<BigRational> {
        let g = self.left_neighborhood(x)?;
        Ok(self.weights.interval(g.lo, g.hi))
    }

    /// `r(x) = ⌊lg σ(x)⌋`.
    pub fn rank(&self, x: Element) -> Result<i64> {
        floor_log2(&self.size(x)?)
    }

    /// `⌊lg σ_ℓ(x)⌋`, or `None` when the left neighborhood is empty.
    pub fn left_rank(&self, x: Element) -> Result<Option<i64>> {
        let g = self.left_neighborhood(x)?;
        if g.is_empty() {
            return Ok(None);
        }
        floor_log2(&self.weights.interval(g.lo, g.hi)).map(Some)
    }

    /// Inclusive neighborhoods of every key, by monotone stacks.
    pub fn all_neighborhoods(&self) -> Vec<KeyRange> {
        let rho = self.table.as_slice();
        let n = rho.len();
        let mut lo = vec![1u32; n];
        let mut hi = vec![n as u32; n];
        let mut stack: Vec<usize> = Vec::new();
        for x in 0..n {
            while stack.last().is_some_and(|&a| rho[a] < rho[x]) {
                stack.pop();
            }
            lo[x] = stack.last().map_or(1, |&a| a as u32 + 2);
            stack.push(x);
        }
        stack.clear();
        for x in (0..n).rev() {
            while stack.last().is_some_and(|&b| rho[b] < rho[x]) {
                stack.pop();
            }
            hi[x] = stack.last().map_or(n as u32, |&b| b as u32);
            stack.push(x);
        }
        lo.into_iter().zip(hi).map(|(lo, hi)| KeyRange { lo, hi }).collect()
    }

    /// `r(x)` for every key, indexed by `key - 1`.
    pub fn ranks(&self) -> Vec<i64> {
        self.all_neighborhoods()
            .into_iter()
            .map(|g| floor_log2(&self.weights.interval(g.lo, g.hi)).expect("sizes are positive"))
            .collect()
    }

    /// `Φ = Σ r(x)`.
    pub fn potential(&self) -> i64 {
        self.ranks().iter().sum()
    }
}

/// Whether `Γ(x)` is exactly the set of keys whose search next would access
/// `x`, for every `x`. Each candidate search is simulated on a copy.
pub fn check_neighborhood_semantics(table: &LastAccessTable) -> bool {
    let weights = WeightAssignment::uniform(table.n());
    let snap = NeighborhoodSnapshot::new(table.clone(), &weights);
    let n = table.n() as u32;
    let hoods = snap.all_neighborhoods();
    (1..=n).all(|k| {
        let mut t = table.clone();
        let row = step(&mut t, Element::new(k)).expect("key in range");
        let accessed = row.accessed();
        (1..=n).all(|x| {
            let x = Element::new(x);
            hoods[x.index()].contains(Element::new(k)) == accessed.binary_search(&x).is_ok()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::super::rank::ratio;
    use super::*;
    use crate::model::AccessSequence;

    fn e(v: u32) -> Element {
        Element::new(v)
    }

    fn table_after(n: usize, keys: &[u32]) -> LastAccessTable {
        crate::greedyass::run(&AccessSequence::from_keys(n, keys).unwrap()).final_state
    }

    fn members(r: KeyRange) -> Vec<u32> {
        r.iter().map(Element::get).collect()
    }

    #[test]
    fn neighborhood_examples() {
        let w = WeightAssignment::uniform(3);
        let fresh = NeighborhoodSnapshot::new(LastAccessTable::new(3), &w);
        for x in 1..=3 {
            assert_eq!(members(fresh.inclusive_neighborhood(e(x)).unwrap()), vec![x]);
        }

        let snap = NeighborhoodSnapshot::new(table_after(3, &[1, 3]), &w);
        assert_eq!(members(snap.inclusive_neighborhood(e(1)).unwrap()), vec![1, 2]);
        assert_eq!(members(snap.inclusive_neighborhood(e(3)).unwrap()), vec![2, 3]);
        assert_eq!(members(snap.inclusive_neighborhood(e(2)).unwrap()), vec![2]);
        assert_eq!(members(snap.left_neighborhood(e(3)).unwrap()), vec![2]);
        assert!(snap.right_neighborhood(e(3)).unwrap().is_empty());

        let snap = NeighborhoodSnapshot::new(table_after(3, &[1, 3, 2]), &w);
        for x in 1..=3 {
            assert_eq!(members(snap.inclusive_neighborhood(e(x)).unwrap()), vec![x]);
        }
        assert!(snap.inclusive_neighborhood(e(4)).is_err());
    }

    #[test]
    fn size_and_rank_examples() {
        let unit = WeightAssignment::uniform(3);
        let snap = NeighborhoodSnapshot::new(table_after(3, &[1, 3]), &unit);
        assert_eq!(snap.size(e(3)).unwrap(), ratio(2, 1));
        assert_eq!(snap.rank(e(3)).unwrap(), 1);
        assert_eq!(snap.left_size(e(1)).unwrap(), ratio(0, 1));
        assert_eq!(snap.left_rank(e(1)).unwrap(), None);
        assert_eq!(snap.left_rank(e(3)).unwrap(), Some(0));

        let fresh = NeighborhoodSnapshot::new(LastAccessTable::new(3), &unit);
        for x in 1..=3 {
            assert_eq!(fresh.size(e(x)).unwrap(), ratio(1, 1));
        }

        let w = WeightAssignment::from_integers(&[4, 1, 2]).unwrap();
        let snap = NeighborhoodSnapshot::new(table_after(3, &[1, 3]), &w);
        assert_eq!(snap.size(e(1)).unwrap(), ratio(5, 1));
    }

    #[test]
    fn potential_examples() {
        let unit = WeightAssignment::uniform(3);
        assert_eq!(NeighborhoodSnapshot::new(LastAccessTable::new(3), &unit).potential(), 0);
        let snap = NeighborhoodSnapshot::new(table_after(3, &[1]), &unit);
        assert_eq!(snap.ranks(), vec![1, 0, 0]);
        assert_eq!(snap.potential(), 1);
        assert_eq!(NeighborhoodSnapshot::new(table_after(3, &[1, 3]), &unit).potential(), 2);
        assert_eq!(NeighborhoodSnapshot::new(table_after(3, &[1, 3, 2]), &unit).potential(), 0);
    }

    #[test]
    fn stack_neighborhoods_match_definition() {
        let w = WeightAssignment::uniform(9);
        let snap = NeighborhoodSnapshot::new(table_after(9, &[5, 2, 9, 2, 7, 1, 5, 3, 8, 8, 4]), &w);
        let fast = snap.all_neighborhoods();
        for x in 1..=9 {
            assert_eq!(fast[x as usize - 1], snap.inclusive_neighborhood(e(x)).unwrap(), "x={x}");
            assert_eq!(snap.ranks()[x as usize - 1], snap.rank(e(x)).unwrap());
        }
    }

    #[test]
    fn semantics_on_examples() {
        assert!(check_neighborhood_semantics(&LastAccessTable::new(4)));
        assert!(check_neighborhood_semantics(&table_after(5, &[3, 1, 5, 2])));
    }
}
