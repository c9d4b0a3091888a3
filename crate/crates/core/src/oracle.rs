//! Exhaustive ground truth for tiny instances.
//!
//! Everything here enumerates candidate point subsets in increasing size and
//! asks the reference satisfaction check. Nothing is clever on purpose.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::is_satisfied_set;
use crate::greedyass;
use crate::model::{AccessSequence, Element, Point, PointSet, Time};

/// Largest `n * m` grid the superset search accepts.
pub const MAX_GRID_CELLS: usize = 20;

/// Largest `n` and `m` accepted by [`conjecture_probe`].
pub const PROBE_LIMIT: usize = 4;

/// The unique minimum set of columns to add on row `i` so that `history`,
/// the input point `(s, i)` and the added points are satisfied.
///
/// Fails with [`Error::NonUniqueMinimum`] if two minimum sets exist.
pub fn min_row_extension(history: &PointSet, s: Element, i: Time) -> Result<BTreeSet<Element>> {
    let n = history.n();
    s.check(n)?;
    if let Some(p) = history.iter().find(|p| p.y >= i) {
        return Err(Error::InvalidParameter(format!("history point {p} is not below row {i}")));
    }
    let m = history.m().max(i.get() as usize);
    let mut base = PointSet::from_points(n, m, history.iter().copied())?;
    base.insert(Point { x: s, y: i })?;

    let candidates: Vec<Element> = (1..=n as u32).map(Element::new).filter(|&c| c != s).collect();
    for size in 0..=candidates.len() {
        let mut found: Option<BTreeSet<Element>> = None;
        let mut count = 0usize;
        for combo in candidates.iter().copied().combinations(size) {
            let mut trial = base.clone();
            for &c in &combo {
                trial.insert(Point { x: c, y: i })?;
            }
            if is_satisfied_set(&trial) {
                count += 1;
                found.get_or_insert_with(|| combo.into_iter().collect());
            }
        }
        if let Some(set) = found {
            if count > 1 {
                return Err(Error::NonUniqueMinimum { size, count });
            }
            return Ok(set);
        }
    }
    unreachable!("the full row always satisfies")
}

/// A smallest satisfied superset.
#[derive(Clone, Debug)]
pub struct Superset {
    pub points: PointSet,
    pub added: Vec<Point>,
}

impl Superset {
    pub fn size(&self) -> usize {
        self.points.len()
    }
}

/// A minimum-cardinality satisfied superset of `x` using points of the
/// `n x m` grid, adding at most `budget` points.
///
/// Candidates are the empty grid cells in row-major order and subsets are
/// enumerated lexicographically within each size, so among several minima
/// the lexicographically least added set wins.
pub fn min_satisfied_superset(x: &PointSet, budget: usize) -> Result<Superset> {
    let (n, m) = (x.n(), x.m());
    if n * m > MAX_GRID_CELLS {
        return Err(Error::TooLarge(format!("{n}x{m} grid exceeds {MAX_GRID_CELLS} cells")));
    }
    let candidates: Vec<Point> =
        (1..=m as u32).flat_map(|y| (1..=n as u32).map(move |c| Point::new(c, y))).filter(|p| !x.contains(p)).collect();
    for size in 0..=budget.min(candidates.len()) {
        for combo in candidates.iter().copied().combinations(size) {
            let mut trial = x.clone();
            for &p in &combo {
                trial.insert(p)?;
            }
            if is_satisfied_set(&trial) {
                return Ok(Superset { points: trial, added: combo });
            }
        }
    }
    Err(Error::ExceedsBudget { budget })
}

/// Greedy against the offline optimum on one small sequence.
#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub searches: Vec<u32>,
    pub n: usize,
    pub m: usize,
    pub greedy: u64,
    pub opt: u64,
    /// `greedy - opt`.
    pub slack: u64,
    /// `greedy <= opt + m`.
    pub holds: bool,
}

/// Compares the greedy total with the minimum satisfied superset of `P(S)`.
pub fn conjecture_probe(seq: &AccessSequence) -> Result<ConjectureReport> {
    if seq.n() > PROBE_LIMIT || seq.m() > PROBE_LIMIT {
        return Err(Error::TooLarge(format!("n = {}, m = {} (limit {PROBE_LIMIT} each)", seq.n(), seq.m())));
    }
    let greedy = greedyass::run(seq).ledger.total();
    let budget = greedy as usize - seq.m();
    let opt = min_satisfied_superset(&seq.geometric_view(), budget)?.size() as u64;
    Ok(ConjectureReport {
        searches: seq.searches().iter().map(|e| e.get()).collect(),
        n: seq.n(),
        m: seq.m(),
        greedy,
        opt,
        slack: greedy - opt,
        holds: greedy <= opt + seq.m() as u64,
    })
}

/// Every sequence of length `m` over `1..=n`, in lexicographic order.
pub fn all_sequences(n: usize, m: usize) -> Box<dyn Iterator<Item = AccessSequence>> {
    if m == 0 {
        return Box::new(std::iter::once(AccessSequence::from_keys(n, &[]).expect("empty")));
    }
    Box::new(
        (0..m)
            .map(|_| 1..=n as u32)
            .multi_cartesian_product()
            .map(move |keys| AccessSequence::from_keys(n, &keys).expect("keys in range")),
    )
}

/// [`conjecture_probe`] over every sequence of length `m` over `1..=n`.
pub fn exhaustive_probe(n: usize, m: usize) -> Result<Vec<ConjectureReport>> {
    all_sequences(n, m).map(|s| conjecture_probe(&s)).collect()
}
