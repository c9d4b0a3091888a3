//! Instrumented greedy runs on the sequential sequence `1, 2, ..., n`.

use serde::Serialize;

use crate::arboral::{greedy_future_costs, BSTree};
use crate::error::Result;
use crate::model::{AccessSequence, Element};

/// Outcome of one sequential run.
#[derive(Clone, Debug, Serialize)]
pub struct SequentialReport {
    pub n: usize,
    pub total: u64,
    /// `4n - 2`.
    pub bound: u64,
    /// Searches `i > 1` where `i` was neither the root nor the leftmost node
    /// of the right subtree under root `i - 1`.
    pub spine_violations: Vec<u32>,
    /// Greatest number of times one node was touched below the root and the
    /// root's right child, over searches `2..=n`.
    pub max_deep_accesses: u32,
    pub deep_access_violations: Vec<u32>,
}

impl SequentialReport {
    pub fn within_bound(&self) -> bool {
        self.total <= self.bound
    }

    pub fn holds(&self) -> bool {
        self.within_bound() && self.spine_violations.is_empty() && self.deep_access_violations.is_empty()
    }
}

/// Runs the greedy algorithm on `1..=n` from `t0`, asserting the spine and
/// deep-access invariants at every step.
pub fn check_sequential(t0: &BSTree) -> Result<SequentialReport> {
    let n = t0.n();
    let seq = AccessSequence::new(n, (1..=n as u32).map(Element::new).collect())?;
    let mut spine_violations = Vec::new();
    let mut deep = vec![0u32; n];
    let ledger = greedy_future_costs(t0, &seq, |time, tree, path| {
        let i = time.get();
        if i <= 1 {
            return;
        }
        let key = Element::new(i);
        let root = tree.root().expect("nonempty tree");
        let on_spine =
            root == key || (root == Element::new(i - 1) && tree.right(root).map(|r| tree.leftmost(r)) == Some(key));
        if !on_spine {
            spine_violations.push(i);
        }
        let shallow = if path.len() > 1 && path[1] > path[0] { 2 } else { 1 };
        for x in &path[shallow.min(path.len())..] {
            deep[x.index()] += 1;
        }
    })?;
    let deep_access_violations = deep.iter().enumerate().filter(|(_, &c)| c > 1).map(|(k, _)| k as u32 + 1).collect();
    Ok(SequentialReport {
        n,
        total: ledger.total(),
        bound: (4 * n as u64).saturating_sub(2),
        spine_violations,
        max_deep_accesses: deep.iter().copied().max().unwrap_or(0),
        deep_access_violations,
    })
}
