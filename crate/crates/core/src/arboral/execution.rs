use std::collections::BTreeSet;

use super::tree::{BSTree, TreeFragment};
use crate::error::{Error, Result};
use crate::model::{AccessSequence, CostLedger, Element, Time};

/// Replace the root-containing subtree `tau` by the tree `tau_prime` on the
/// same keys. Costs `|tau|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reconfiguration {
    tau: Vec<Element>,
    tau_prime: TreeFragment,
}

impl Reconfiguration {
    pub fn new(tau: impl IntoIterator<Item = Element>, tau_prime: TreeFragment) -> Self {
        let tau: BTreeSet<Element> = tau.into_iter().collect();
        Reconfiguration { tau: tau.into_iter().collect(), tau_prime }
    }

    /// Leave the touched nodes where they are.
    pub fn identity(tree: &BSTree, tau: &[Element]) -> Self {
        Self::new(tau.iter().copied(), tree.fragment(tau))
    }

    /// Old node set, ascending.
    pub fn tau(&self) -> &[Element] {
        &self.tau
    }

    pub fn tau_prime(&self) -> &TreeFragment {
        &self.tau_prime
    }

    pub fn cost(&self) -> u64 {
        self.tau.len() as u64
    }

    /// Checks the parts that do not depend on a tree.
    fn check_shape(&self) -> Result<()> {
        if self.tau.is_empty() {
            return Err(Error::InvalidReconfiguration("empty node set".into()));
        }
        if !self.tau_prime.keys().eq(self.tau.iter().copied()) {
            return Err(Error::InvalidReconfiguration("replacement covers a different key set".into()));
        }
        if !self.tau_prime.is_bst() {
            return Err(Error::InvalidReconfiguration("replacement violates symmetric order".into()));
        }
        Ok(())
    }
}

/// Applies `r` to `tree`, reattaching the hanging subtrees in the unique
/// order-consistent slots of the replacement.
pub fn apply_reconfiguration(tree: &BSTree, r: &Reconfiguration) -> Result<BSTree> {
    let mut t = tree.clone();
    apply_in_place(&mut t, r)?;
    Ok(t)
}

pub(crate) fn apply_in_place(tree: &mut BSTree, r: &Reconfiguration) -> Result<()> {
    r.check_shape()?;
    for x in r.tau() {
        x.check(tree.n()).map_err(|_| Error::InvalidReconfiguration(format!("key {x} out of range")))?;
    }
    let root = tree.root().ok_or_else(|| Error::InvalidReconfiguration("tree is empty".into()))?;
    if r.tau.binary_search(&root).is_err() {
        return Err(Error::InvalidReconfiguration(format!("node set omits the root {root}")));
    }
    let old = tree.fragment(r.tau());
    match old.in_order() {
        Some(order) if order.len() == r.tau.len() => {}
        _ => return Err(Error::InvalidReconfiguration("node set is not a connected subtree".into())),
    }

    let hanging: Vec<Option<Element>> = old
        .empty_slots()
        .into_iter()
        .map(|(p, is_right)| {
            let p = p.expect("fragment nonempty");
            if is_right {
                tree.right(p)
            } else {
                tree.left(p)
            }
        })
        .collect();

    let new = r.tau_prime();
    for x in new.keys() {
        let (l, rr) = new.children(x).expect("key present");
        tree.set_children(x, l, rr);
    }
    let slots = new.empty_slots();
    debug_assert_eq!(slots.len(), hanging.len());
    for ((p, is_right), sub) in slots.into_iter().zip(hanging) {
        let p = p.expect("fragment nonempty");
        if is_right {
            tree.set_children(p, tree.left(p), sub);
        } else {
            tree.set_children(p, sub, tree.right(p));
        }
    }
    tree.set_root(new.root());
    Ok(())
}

/// Applies a replacement already known to be valid: `tau` is the sorted
/// node set of a root-containing subtree and `new` a BST on exactly `tau`.
///
/// Gap `j` lies between `tau[j-1]` and `tau[j]`; in any BST on `tau` it is
/// the left slot of `tau[j]` or the right slot of `tau[j-1]`, whichever is
/// empty.
pub(crate) fn apply_trusted(tree: &mut BSTree, tau: &[Element], new: &TreeFragment) {
    let inside = |x: Option<Element>| x.is_some_and(|x| tau.binary_search(&x).is_ok());
    let mut gaps: Vec<Option<Element>> = vec![None; tau.len() + 1];
    for (j, &x) in tau.iter().enumerate() {
        let (l, r) = (tree.left(x), tree.right(x));
        if !inside(l) {
            gaps[j] = l;
        }
        if !inside(r) {
            gaps[j + 1] = r;
        }
    }
    for (j, &x) in tau.iter().enumerate() {
        let (l, r) = new.children(x).expect("replacement covers tau");
        tree.set_children(x, l.or(gaps[j]), r.or(gaps[j + 1]));
    }
    tree.set_root(new.root());
}

/// An initial tree plus one reconfiguration per search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    t0: BSTree,
    steps: Vec<Reconfiguration>,
}

impl Execution {
    pub fn new(t0: BSTree, steps: Vec<Reconfiguration>) -> Self {
        Execution { t0, steps }
    }

    pub fn initial_tree(&self) -> &BSTree {
        &self.t0
    }

    pub fn steps(&self) -> &[Reconfiguration] {
        &self.steps
    }

    /// Replays every reconfiguration, calling `visit(i, T_{i-1}, step_i)`
    /// before applying step `i`. Returns the final tree.
    pub fn replay<F>(&self, mut visit: F) -> Result<BSTree>
    where
        F: FnMut(Time, &BSTree, &Reconfiguration) -> Result<()>,
    {
        self.t0.validate()?;
        let mut tree = self.t0.clone();
        for (i, step) in self.steps.iter().enumerate() {
            let time = Time::new(i as u32 + 1);
            visit(time, &tree, step)?;
            apply_in_place(&mut tree, step).map_err(|e| Error::InvalidExecution { time, reason: e.to_string() })?;
        }
        Ok(tree)
    }

    /// Root containment, key sets and symmetric order of every step.
    pub fn check_structure(&self) -> Result<()> {
        self.replay(|_, _, _| Ok(())).map(|_| ())
    }

    /// `T_0, ..., T_m`.
    pub fn trees(&self) -> Result<Vec<BSTree>> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let last = self.replay(|_, t, _| {
            out.push(t.clone());
            Ok(())
        })?;
        out.push(last);
        Ok(out)
    }
}

/// Checks `E` against `S` and returns the cost ledger (`|tau_i|` per search).
pub fn validate_execution(execution: &Execution, seq: &AccessSequence) -> Result<CostLedger> {
    if execution.steps.len() != seq.m() {
        return Err(Error::LengthMismatch { steps: execution.steps.len(), searches: seq.m() });
    }
    if execution.t0.n() != seq.n() {
        return Err(Error::InvalidTree {
            n: execution.t0.n(),
            reason: format!("universe differs from the sequence's n = {}", seq.n()),
        });
    }
    let mut ledger = CostLedger::new();
    execution.replay(|time, _, step| {
        let s = seq.at(time);
        if step.tau().binary_search(&s).is_err() {
            return Err(Error::InvalidExecution { time, reason: format!("searched key {s} not touched") });
        }
        ledger.record(time, s, step.cost());
        Ok(())
    })?;
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn e(v: u32) -> Element {
        Element::new(v)
    }

    fn balanced3() -> TreeFragment {
        let mut nodes = BTreeMap::new();
        nodes.insert(e(1), (None, None));
        nodes.insert(e(2), (Some(e(1)), Some(e(3))));
        nodes.insert(e(3), (None, None));
        TreeFragment::new(Some(e(2)), nodes)
    }

    #[test]
    fn chain_to_balanced() {
        let chain = BSTree::chain_left(3);
        let r = Reconfiguration::new([e(3), e(2), e(1)], balanced3());
        let t = apply_reconfiguration(&chain, &r).unwrap();
        assert_eq!(t, BSTree::balanced(3));
    }

    #[test]
    fn root_only_identity() {
        let t = BSTree::balanced(5);
        let r = Reconfiguration::identity(&t, &[e(3)]);
        assert_eq!(apply_reconfiguration(&t, &r).unwrap(), t);
    }

    #[test]
    fn rejects_bad_reconfigurations() {
        let t = BSTree::chain_left(3);
        // omits the root
        let r = Reconfiguration::new([e(2), e(1)], BSTree::balanced(3).fragment(&[e(2), e(1)]));
        assert!(apply_reconfiguration(&t, &r).is_err());
        // key set mismatch
        let r = Reconfiguration::new([e(3), e(2)], balanced3());
        assert!(apply_reconfiguration(&t, &r).is_err());
        // not connected: {3, 1} in the chain 3-2-1
        let r = Reconfiguration::new([e(3), e(1)], {
            let mut nodes = BTreeMap::new();
            nodes.insert(e(1), (None, None));
            nodes.insert(e(3), (Some(e(1)), None));
            TreeFragment::new(Some(e(3)), nodes)
        });
        assert!(apply_reconfiguration(&t, &r).is_err());
        // replacement violates order: 1 with left child 2
        let mut nodes = BTreeMap::new();
        nodes.insert(e(1), (Some(e(2)), None));
        nodes.insert(e(2), (None, None));
        nodes.insert(e(3), (None, Some(e(1))));
        let r = Reconfiguration::new([e(1), e(2), e(3)], TreeFragment::new(Some(e(3)), nodes));
        assert!(apply_reconfiguration(&t, &r).is_err());
    }

    #[test]
    fn hanging_subtrees_reattach() {
        // balanced 7: 4 (2 (1,3), 6 (5,7)); rotate the path {4, 6} so 6 is root
        let t = BSTree::balanced(7);
        let mut nodes = BTreeMap::new();
        nodes.insert(e(4), (None, None));
        nodes.insert(e(6), (Some(e(4)), None));
        let r = Reconfiguration::new([e(4), e(6)], TreeFragment::new(Some(e(6)), nodes));
        let u = apply_reconfiguration(&t, &r).unwrap();
        u.validate().unwrap();
        assert_eq!(u.root(), Some(e(6)));
        assert_eq!((u.left(e(6)), u.right(e(6))), (Some(e(4)), Some(e(7))));
        assert_eq!((u.left(e(4)), u.right(e(4))), (Some(e(2)), Some(e(5))));
    }

    #[test]
    fn validate_reports_untouched_search() {
        let t = BSTree::balanced(3);
        let s = AccessSequence::from_keys(3, &[2, 1]).unwrap();
        let steps = vec![Reconfiguration::identity(&t, &[e(2)]), Reconfiguration::identity(&t, &[e(2)])];
        let err = validate_execution(&Execution::new(t.clone(), steps), &s).unwrap_err();
        assert!(matches!(err, Error::InvalidExecution { time, .. } if time == Time::new(2)));

        let empty = AccessSequence::from_keys(3, &[]).unwrap();
        assert_eq!(validate_execution(&Execution::new(t.clone(), vec![]), &empty).unwrap().total(), 0);
        assert!(matches!(validate_execution(&Execution::new(t, vec![]), &s), Err(Error::LengthMismatch { .. })));
    }
}
