//! The online geometric greedy algorithm.
//!
//! Each arriving point `(s, i)` is answered with the columns whose last
//! access times form increasing staircases sweeping right and left from `s`.
//! The last-access table is the algorithm's entire state.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{AccessSequence, CostLedger, Element, Point, PointSet, Time};

/// `rho(x)`: the last row at which column `x` holds a point, or zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LastAccessTable {
    rho: Vec<Time>,
    now: Time,
}

impl LastAccessTable {
    pub fn new(n: usize) -> Self {
        LastAccessTable { rho: vec![Time::NEVER; n], now: Time::NEVER }
    }

    pub fn n(&self) -> usize {
        self.rho.len()
    }

    pub fn now(&self) -> Time {
        self.now
    }

    pub fn rho(&self, x: Element) -> Time {
        self.rho[x.index()]
    }

    /// Last access times indexed by `key - 1`.
    pub fn as_slice(&self) -> &[Time] {
        &self.rho
    }
}

/// The answer for one row: the searched key and the added columns `P_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowOutput {
    pub time: Time,
    pub searched: Element,
    /// Sorted ascending.
    pub added: Vec<Element>,
}

impl RowOutput {
    /// `|P_i| + 1`.
    pub fn accessed_count(&self) -> u64 {
        self.added.len() as u64 + 1
    }

    /// `{s_i} ∪ P_i`, sorted.
    pub fn accessed(&self) -> Vec<Element> {
        let mut v = self.added.clone();
        let pos = v.partition_point(|&e| e < self.searched);
        v.insert(pos, self.searched);
        v
    }
}

/// The staircase walked from `s`: `(right, left)`, each ordered by distance
/// from `s`, listing `(column, last access time)`.
pub type Staircases = (Vec<(Element, Time)>, Vec<(Element, Time)>);

/// The right and left staircases that [`step`] would traverse from `s`.
pub fn staircase(state: &LastAccessTable, s: Element) -> Result<Staircases> {
    let s = s.check(state.n())?;
    let base = state.rho(s);
    let mut right = Vec::new();
    let mut prev = base;
    for j in s.index() + 1..state.n() {
        if state.rho[j] > prev {
            prev = state.rho[j];
            right.push((Element::new(j as u32 + 1), prev));
        }
    }
    let mut left = Vec::new();
    prev = base;
    for j in (0..s.index()).rev() {
        if state.rho[j] > prev {
            prev = state.rho[j];
            left.push((Element::new(j as u32 + 1), prev));
        }
    }
    Ok((right, left))
}

/// Processes one search and advances the table.
pub fn step(state: &mut LastAccessTable, s: Element) -> Result<RowOutput> {
    let (right, left) = staircase(state, s)?;
    let time = state.now.next();
    let mut added: Vec<Element> = left.iter().rev().chain(right.iter()).map(|&(e, _)| e).collect();
    debug_assert!(added.windows(2).all(|w| w[0] < w[1]));
    for &e in &added {
        state.rho[e.index()] = time;
    }
    state.rho[s.index()] = time;
    state.now = time;
    added.shrink_to_fit();
    Ok(RowOutput { time, searched: s, added })
}

/// The complete output of a run.
#[derive(Clone, Debug)]
pub struct GreedyRun {
    /// `P(S)` together with every added point.
    pub points: PointSet,
    pub ledger: CostLedger,
    pub rows: Vec<RowOutput>,
    /// The table after the last search.
    pub final_state: LastAccessTable,
}

/// Runs the algorithm over the whole sequence from the all-zero table.
pub fn run(seq: &AccessSequence) -> GreedyRun {
    let mut state = LastAccessTable::new(seq.n());
    let mut points = PointSet::new(seq.n(), seq.m());
    let mut ledger = CostLedger::new();
    let mut rows = Vec::with_capacity(seq.m());
    for &s in seq.searches() {
        let row = step(&mut state, s).expect("sequence keys are in range");
        for &x in row.accessed().iter() {
            points.insert(Point { x, y: row.time }).expect("row within grid");
        }
        ledger.record(row.time, s, row.accessed_count());
        rows.push(row);
    }
    GreedyRun { points, ledger, rows, final_state: state }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn e(v: u32) -> Element {
        Element::new(v)
    }

    fn keys(v: &[Element]) -> Vec<u32> {
        v.iter().map(|x| x.get()).collect()
    }

    #[test]
    fn hand_executed_steps() {
        let mut t = LastAccessTable::new(3);
        let r1 = step(&mut t, e(1)).unwrap();
        assert!(r1.added.is_empty());
        let r2 = step(&mut t, e(3)).unwrap();
        assert_eq!(keys(&r2.added), vec![1]);
        let r3 = step(&mut t, e(2)).unwrap();
        assert_eq!(keys(&r3.added), vec![1, 3]);
        assert_eq!(t.now(), Time::new(3));
        assert!(t.as_slice().iter().all(|&r| r == Time::new(3)));
    }

    #[test]
    fn step_rejects_out_of_range() {
        let mut t = LastAccessTable::new(3);
        assert!(matches!(step(&mut t, e(4)), Err(Error::ElementOutOfRange { .. })));
        assert!(matches!(staircase(&t, e(0)), Err(Error::ElementOutOfRange { .. })));
    }

    #[test]
    fn run_example() {
        let s = AccessSequence::from_keys(3, &[1, 3, 2]).unwrap();
        let out = run(&s);
        assert_eq!(out.ledger.total(), 6);
        let expect: Vec<Point> =
            [(1, 1), (1, 2), (3, 2), (1, 3), (2, 3), (3, 3)].iter().map(|&(x, y)| Point::new(x, y)).collect();
        assert_eq!(out.points.iter().copied().collect::<Vec<_>>(), {
            let mut v = expect;
            v.sort();
            v
        });
    }

    #[test]
    fn trivial_runs() {
        let out = run(&AccessSequence::from_keys(5, &[4]).unwrap());
        assert_eq!(out.ledger.total(), 1);
        assert!(out.rows[0].added.is_empty());

        let out = run(&AccessSequence::from_keys(5, &[2; 7]).unwrap());
        assert_eq!(out.ledger.total(), 7);
        assert!(out.rows.iter().all(|r| r.added.is_empty()));
    }

    #[test]
    fn staircase_examples() {
        let fresh = LastAccessTable::new(4);
        assert_eq!(staircase(&fresh, e(2)).unwrap(), (vec![], vec![]));

        let mut t = LastAccessTable::new(3);
        step(&mut t, e(1)).unwrap();
        step(&mut t, e(3)).unwrap();
        assert_eq!(staircase(&t, e(2)).unwrap(), (vec![(e(3), Time::new(2))], vec![(e(1), Time::new(2))]));
        assert_eq!(staircase(&t, e(3)).unwrap(), (vec![], vec![]));
        // staircase is read-only
        assert_eq!(t.now(), Time::new(2));
    }
}
