//! Bottom-up splaying as a cost baseline.

use std::collections::BTreeMap;

use super::execution::{apply_in_place, Execution, Reconfiguration};
use super::tree::{BSTree, TreeFragment};
use crate::error::{Error, Result};
use crate::model::{AccessSequence, CostLedger, Element, Time};

#[derive(Clone, Copy, Default)]
struct Slot {
    left: Option<usize>,
    right: Option<usize>,
    parent: Option<usize>,
}

/// The search path rearranged by splaying its last node to the root.
/// Rotations only move path nodes relative to each other, so splaying the
/// path in isolation yields the replacement fragment.
fn splay_path(path: &[Element]) -> TreeFragment {
    let k = path.len();
    let mut s = vec![Slot::default(); k];
    for j in 0..k.saturating_sub(1) {
        if path[j + 1] < path[j] {
            s[j].left = Some(j + 1);
        } else {
            s[j].right = Some(j + 1);
        }
        s[j + 1].parent = Some(j);
    }

    let rotate = |s: &mut Vec<Slot>, x: usize| {
        let p = s[x].parent.expect("rotated node has a parent");
        let g = s[p].parent;
        if s[p].left == Some(x) {
            let b = s[x].right;
            s[p].left = b;
            if let Some(b) = b {
                s[b].parent = Some(p);
            }
            s[x].right = Some(p);
        } else {
            let b = s[x].left;
            s[p].right = b;
            if let Some(b) = b {
                s[b].parent = Some(p);
            }
            s[x].left = Some(p);
        }
        s[p].parent = Some(x);
        s[x].parent = g;
        if let Some(g) = g {
            if s[g].left == Some(p) {
                s[g].left = Some(x);
            } else {
                s[g].right = Some(x);
            }
        }
    };

    if k > 0 {
        let x = k - 1;
        while let Some(p) = s[x].parent {
            match s[p].parent {
                None => rotate(&mut s, x),
                Some(g) => {
                    let x_left = s[p].left == Some(x);
                    let p_left = s[g].left == Some(p);
                    if x_left == p_left {
                        rotate(&mut s, p);
                        rotate(&mut s, x);
                    } else {
                        rotate(&mut s, x);
                        rotate(&mut s, x);
                    }
                }
            }
        }
    }

    let nodes: BTreeMap<Element, (Option<Element>, Option<Element>)> =
        (0..k).map(|j| (path[j], (s[j].left.map(|c| path[c]), s[j].right.map(|c| path[c])))).collect();
    TreeFragment::new(path.last().copied(), nodes)
}

/// Splays every searched key to the root.
pub fn run_splay(t0: &BSTree, seq: &AccessSequence) -> Result<(Execution, CostLedger)> {
    if t0.n() != seq.n() {
        return Err(Error::InvalidTree { n: t0.n(), reason: format!("sequence universe is {}", seq.n()) });
    }
    t0.validate()?;
    let mut tree = t0.clone();
    let mut steps = Vec::with_capacity(seq.m());
    let mut ledger = CostLedger::new();
    for (i, &s) in seq.searches().iter().enumerate() {
        let time = Time::new(i as u32 + 1);
        let path = tree.search_path(s)?;
        let step = Reconfiguration::new(path.iter().copied(), splay_path(&path));
        apply_in_place(&mut tree, &step).map_err(|e| Error::InvalidExecution { time, reason: e.to_string() })?;
        ledger.record(time, s, step.cost());
        steps.push(step);
    }
    Ok((Execution::new(t0.clone(), steps), ledger))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: u32) -> Element {
        Element::new(v)
    }

    #[test]
    fn single_search_costs_depth_plus_one() {
        let t = BSTree::balanced(15);
        for x in 1..=15 {
            let s = AccessSequence::from_keys(15, &[x]).unwrap();
            let (exec, ledger) = run_splay(&t, &s).unwrap();
            assert_eq!(ledger.total(), t.depth(e(x)).unwrap() as u64 + 1);
            let last = exec.trees().unwrap().pop().unwrap();
            assert_eq!(last.root(), Some(e(x)));
            last.validate().unwrap();
        }
    }

    #[test]
    fn repeat_costs_one() {
        let t = BSTree::chain_left(6);
        let s = AccessSequence::from_keys(6, &[2, 2]).unwrap();
        let (_, ledger) = run_splay(&t, &s).unwrap();
        assert_eq!(ledger.per_search()[1].accessed, 1);
    }

    #[test]
    fn zig_zig_on_chain() {
        // splaying 1 in the left chain 3-2-1 gives 1 (-, 2 (-, 3))
        let f = splay_path(&[e(3), e(2), e(1)]);
        assert_eq!(f.root(), Some(e(1)));
        assert_eq!(f.children(e(1)), Some((None, Some(e(2)))));
        assert_eq!(f.children(e(2)), Some((None, Some(e(3)))));
    }

    #[test]
    fn zig_zag() {
        // 1 (-, 3 (2, -)) splaying 2 gives 2 (1, 3)
        let f = splay_path(&[e(1), e(3), e(2)]);
        assert_eq!(f.root(), Some(e(2)));
        assert_eq!(f.children(e(2)), Some((Some(e(1)), Some(e(3)))));
    }
}
