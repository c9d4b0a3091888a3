//! The offline greedy restructuring of each search path.
//!
//! After search `i` the touched nodes are rebuilt top-down. In a key range,
//! the earliest future search `f` decides the local root: `f` itself when it
//! was touched, otherwise its touched predecessor with the touched successor
//! as right child. Both sides then recurse on the future restricted to their
//! key ranges. A range whose future is empty is laid out balanced.

use super::execution::{apply_trusted, Execution, Reconfiguration};
use super::tree::{BSTree, TreeFragment};
use crate::error::{Error, Result};
use crate::model::{AccessSequence, CostLedger, Element, Time};

/// Earliest future search with key strictly inside `(lo, hi)`.
pub(crate) trait FutureIndex {
    fn first_in(&self, lo: u32, hi: u32) -> Option<Element>;
}

struct FutureList<'a>(&'a [Element]);

impl FutureIndex for FutureList<'_> {
    fn first_in(&self, lo: u32, hi: u32) -> Option<Element> {
        self.0.iter().copied().find(|f| lo < f.get() && f.get() < hi)
    }
}

/// Min-segment tree over keys holding each key's next search time.
pub(crate) struct NextAccessIndex<'a> {
    seq: &'a AccessSequence,
    next_occurrence: Vec<u32>,
    width: usize,
    tree: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl<'a> NextAccessIndex<'a> {
    /// Positioned before the first search: the future is all of `S`.
    pub(crate) fn new(seq: &'a AccessSequence) -> Self {
        let n = seq.n();
        let m = seq.m();
        let mut next_occurrence = vec![NONE; m + 1];
        let mut upcoming = vec![NONE; n];
        for t in (1..=m).rev() {
            let k = seq.searches()[t - 1].index();
            next_occurrence[t] = upcoming[k];
            upcoming[k] = t as u32;
        }
        let width = n.next_power_of_two().max(1);
        let mut tree = vec![NONE; 2 * width];
        tree[width..width + n].copy_from_slice(&upcoming);
        for i in (1..width).rev() {
            tree[i] = tree[2 * i].min(tree[2 * i + 1]);
        }
        NextAccessIndex { seq, next_occurrence, width, tree }
    }

    /// Consumes search `t`; the future becomes `s_{t+1}, ...`.
    pub(crate) fn advance(&mut self, t: Time) {
        let k = self.seq.at(t).index();
        let mut i = self.width + k;
        self.tree[i] = self.next_occurrence[t.get() as usize];
        while i > 1 {
            i /= 2;
            self.tree[i] = self.tree[2 * i].min(self.tree[2 * i + 1]);
        }
    }

    fn min_time(&self, a: usize, b: usize) -> u32 {
        // zero-based inclusive key slots
        let (mut l, mut r) = (a + self.width, b + self.width + 1);
        let mut best = NONE;
        while l < r {
            if l & 1 == 1 {
                best = best.min(self.tree[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                best = best.min(self.tree[r]);
            }
            l /= 2;
            r /= 2;
        }
        best
    }
}

impl FutureIndex for NextAccessIndex<'_> {
    fn first_in(&self, lo: u32, hi: u32) -> Option<Element> {
        let a = lo as usize; // key lo+1 sits at slot lo
        let b = (hi as usize).min(self.seq.n() + 1);
        if a + 1 >= b {
            return None;
        }
        let t = self.min_time(a, b - 2);
        (t != NONE).then(|| self.seq.at(Time::new(t)))
    }
}

fn link(frag: &mut TreeFragment, parent: Option<(Element, bool)>, child: Element) {
    match parent {
        None => frag.set_root(Some(child)),
        Some((p, is_right)) => {
            let (l, r) = frag.children(p).expect("parent placed first");
            if is_right {
                frag.insert(p, l, Some(child));
            } else {
                frag.insert(p, Some(child), r);
            }
        }
    }
}

fn place_balanced(frag: &mut TreeFragment, keys: &[Element], parent: Option<(Element, bool)>) {
    if keys.is_empty() {
        return;
    }
    let mid = (keys.len() - 1) / 2;
    let root = keys[mid];
    frag.insert(root, None, None);
    link(frag, parent, root);
    place_balanced(frag, &keys[..mid], Some((root, false)));
    place_balanced(frag, &keys[mid + 1..], Some((root, true)));
}

/// Pending subproblem: slice start, slice end, exclusive key bounds, attachment point.
type Task = (usize, usize, u32, u32, Option<(Element, bool)>);

/// Builds the greedy fragment over the sorted, distinct `keys`.
pub(crate) fn build_with<I: FutureIndex>(keys: &[Element], future: &I) -> TreeFragment {
    let mut frag = TreeFragment::default();
    let mut work: Vec<Task> = vec![(0, keys.len(), 0, u32::MAX, None)];
    while let Some((a, b, lo, hi, parent)) = work.pop() {
        let v = &keys[a..b];
        if v.is_empty() {
            continue;
        }
        let Some(f) = future.first_in(lo, hi) else {
            place_balanced(&mut frag, v, parent);
            continue;
        };
        match v.binary_search(&f) {
            Ok(idx) => {
                frag.insert(f, None, None);
                link(&mut frag, parent, f);
                work.push((a, a + idx, lo, f.get(), Some((f, false))));
                work.push((a + idx + 1, b, f.get(), hi, Some((f, true))));
            }
            Err(idx) => {
                let pred = idx.checked_sub(1).map(|i| v[i]);
                let succ = v.get(idx).copied();
                match (pred, succ) {
                    (Some(p), Some(s)) => {
                        frag.insert(p, None, None);
                        link(&mut frag, parent, p);
                        frag.insert(s, None, None);
                        link(&mut frag, Some((p, true)), s);
                        work.push((a, a + idx - 1, lo, p.get(), Some((p, false))));
                        work.push((a + idx + 1, b, s.get(), hi, Some((s, true))));
                    }
                    (Some(p), None) => {
                        frag.insert(p, None, None);
                        link(&mut frag, parent, p);
                        work.push((a, a + idx - 1, lo, p.get(), Some((p, false))));
                    }
                    (None, Some(s)) => {
                        frag.insert(s, None, None);
                        link(&mut frag, parent, s);
                        work.push((a + 1, b, s.get(), hi, Some((s, true))));
                    }
                    (None, None) => unreachable!("v is nonempty"),
                }
            }
        }
    }
    frag
}

/// The greedy arrangement of the node set `v` for the future searches `f`.
pub fn greedy_future_build(v: &[Element], f: &[Element]) -> Result<TreeFragment> {
    if let Some(&bad) = v.iter().chain(f).find(|x| x.get() == 0) {
        return Err(Error::RangeInconsistent(bad));
    }
    let mut keys = v.to_vec();
    keys.sort_unstable();
    if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::RangeInconsistent(w[0]));
    }
    Ok(build_with(&keys, &FutureList(f)))
}

fn fragment_to_tree(n: usize, frag: &TreeFragment) -> BSTree {
    let mut t = BSTree::empty(n);
    for x in frag.keys() {
        let (l, r) = frag.children(x).expect("key present");
        t.set_children(x, l, r);
    }
    t.set_root(frag.root());
    t
}

/// The canonical initial tree: the greedy arrangement of all of `1..=n` for
/// the whole sequence.
pub fn greedy_initial_tree(n: usize, seq: &AccessSequence) -> BSTree {
    assert_eq!(n, seq.n(), "sequence universe must match n");
    let keys: Vec<Element> = (1..=n as u32).map(Element::new).collect();
    let frag = build_with(&keys, &NextAccessIndex::new(seq));
    let t = fragment_to_tree(n, &frag);
    debug_assert!(t.validate().is_ok());
    t
}

/// Runs the greedy algorithm, calling `observe(i, T_{i-1}, tau_i)` with each
/// search path before it is rearranged.
pub fn run_greedy_future_observed<F>(t0: &BSTree, seq: &AccessSequence, observe: F) -> Result<(Execution, CostLedger)>
where
    F: FnMut(Time, &BSTree, &[Element]),
{
    let mut steps = Vec::with_capacity(seq.m());
    let ledger = drive(t0, seq, observe, |path, frag| steps.push(Reconfiguration::new(path.iter().copied(), frag)))?;
    Ok((Execution::new(t0.clone(), steps), ledger))
}

/// Costs only; no execution is kept.
pub(crate) fn greedy_future_costs<F>(t0: &BSTree, seq: &AccessSequence, observe: F) -> Result<CostLedger>
where
    F: FnMut(Time, &BSTree, &[Element]),
{
    drive(t0, seq, observe, |_, _| {})
}

fn drive<F, K>(t0: &BSTree, seq: &AccessSequence, mut observe: F, mut keep: K) -> Result<CostLedger>
where
    F: FnMut(Time, &BSTree, &[Element]),
    K: FnMut(&[Element], TreeFragment),
{
    if t0.n() != seq.n() {
        return Err(Error::InvalidTree { n: t0.n(), reason: format!("sequence universe is {}", seq.n()) });
    }
    t0.validate()?;
    let mut tree = t0.clone();
    let mut index = NextAccessIndex::new(seq);
    let mut ledger = CostLedger::new();
    let mut keys = Vec::new();
    for (i, &s) in seq.searches().iter().enumerate() {
        let time = Time::new(i as u32 + 1);
        let path = tree.search_path(s)?;
        observe(time, &tree, &path);
        index.advance(time);
        keys.clear();
        keys.extend_from_slice(&path);
        keys.sort_unstable();
        let tau_prime = if i + 1 < seq.m() { build_with(&keys, &index) } else { tree.fragment(&path) };
        apply_trusted(&mut tree, &keys, &tau_prime);
        ledger.record(time, s, path.len() as u64);
        keep(&keys, tau_prime);
    }
    Ok(ledger)
}

/// Runs the greedy algorithm from `t0` over `seq`.
pub fn run_greedy_future(t0: &BSTree, seq: &AccessSequence) -> Result<(Execution, CostLedger)> {
    run_greedy_future_observed(t0, seq, |_, _, _| {})
}
