use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::Element;

/// A binary search tree over `1..=n`, addressed by key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BSTree {
    root: Option<Element>,
    left: Vec<Option<Element>>,
    right: Vec<Option<Element>>,
}

impl BSTree {
    /// Builds from explicit child links and validates symmetric order.
    pub fn from_links(root: Option<Element>, left: Vec<Option<Element>>, right: Vec<Option<Element>>) -> Result<Self> {
        let t = BSTree { root, left, right };
        t.validate()?;
        Ok(t)
    }

    pub(crate) fn empty(n: usize) -> Self {
        BSTree { root: None, left: vec![None; n], right: vec![None; n] }
    }

    /// Every node the left child of its parent: root `n`, leaf `1`.
    pub fn chain_left(n: usize) -> Self {
        let mut t = Self::empty(n);
        t.root = (n > 0).then(|| Element::new(n as u32));
        for k in 2..=n {
            t.left[k - 1] = Some(Element::new(k as u32 - 1));
        }
        t
    }

    /// Every node the right child of its parent: root `1`, leaf `n`.
    pub fn chain_right(n: usize) -> Self {
        let mut t = Self::empty(n);
        t.root = (n > 0).then(|| Element::new(1));
        for k in 1..n {
            t.right[k - 1] = Some(Element::new(k as u32 + 1));
        }
        t
    }

    /// Median-rooted tree; complete when `n = 2^h - 1`.
    pub fn balanced(n: usize) -> Self {
        let mut t = Self::empty(n);
        let keys: Vec<Element> = (1..=n as u32).map(Element::new).collect();
        t.root = t.attach_balanced(&keys);
        t
    }

    /// Shape produced by inserting a uniformly random permutation.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut order: Vec<u32> = (1..=n as u32).collect();
        order.shuffle(rng);
        let mut t = Self::empty(n);
        for k in order {
            let k = Element::new(k);
            let Some(mut cur) = t.root else {
                t.root = Some(k);
                continue;
            };
            loop {
                let slot = if k < cur { &mut t.left[cur.index()] } else { &mut t.right[cur.index()] };
                match *slot {
                    Some(next) => cur = next,
                    None => {
                        *slot = Some(k);
                        break;
                    }
                }
            }
        }
        t
    }

    /// Links a balanced subtree over the sorted `keys` and returns its root.
    pub(crate) fn attach_balanced(&mut self, keys: &[Element]) -> Option<Element> {
        if keys.is_empty() {
            return None;
        }
        let mid = (keys.len() - 1) / 2;
        let root = keys[mid];
        self.left[root.index()] = self.attach_balanced(&keys[..mid]);
        self.right[root.index()] = self.attach_balanced(&keys[mid + 1..]);
        Some(root)
    }

    pub fn n(&self) -> usize {
        self.left.len()
    }

    pub fn root(&self) -> Option<Element> {
        self.root
    }

    pub fn left(&self, x: Element) -> Option<Element> {
        self.left[x.index()]
    }

    pub fn right(&self, x: Element) -> Option<Element> {
        self.right[x.index()]
    }

    pub(crate) fn set_root(&mut self, root: Option<Element>) {
        self.root = root;
    }

    pub(crate) fn set_children(&mut self, x: Element, left: Option<Element>, right: Option<Element>) {
        self.left[x.index()] = left;
        self.right[x.index()] = right;
    }

    /// Root-to-`key` path, `key` last.
    pub fn search_path(&self, key: Element) -> Result<Vec<Element>> {
        key.check(self.n())?;
        let mut path = Vec::new();
        let mut cur = self.root;
        while let Some(x) = cur {
            path.push(x);
            cur = match key.cmp(&x) {
                std::cmp::Ordering::Less => self.left(x),
                std::cmp::Ordering::Greater => self.right(x),
                std::cmp::Ordering::Equal => return Ok(path),
            };
        }
        Err(Error::InvalidTree { n: self.n(), reason: format!("key {key} not reachable") })
    }

    /// Depth of `key` (root has depth 0).
    pub fn depth(&self, key: Element) -> Result<usize> {
        Ok(self.search_path(key)?.len() - 1)
    }

    /// Keys in symmetric order.
    pub fn in_order(&self) -> Vec<Element> {
        let mut out = Vec::with_capacity(self.n());
        let mut stack = Vec::new();
        let mut cur = self.root;
        while cur.is_some() || !stack.is_empty() {
            while let Some(x) = cur {
                stack.push(x);
                cur = self.left(x);
            }
            let x = stack.pop().expect("stack nonempty");
            out.push(x);
            cur = self.right(x);
        }
        out
    }

    /// Leftmost key in the subtree rooted at `x`.
    pub fn leftmost(&self, mut x: Element) -> Element {
        while let Some(l) = self.left(x) {
            x = l;
        }
        x
    }

    /// Checks that every key appears once and in symmetric order.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.right.len() != n {
            return Err(Error::InvalidTree { n, reason: "child tables differ in length".into() });
        }
        let bad = |reason: String| Err(Error::InvalidTree { n, reason });
        let mut seen = vec![false; n];
        let mut count = 0usize;
        let mut stack: Vec<Element> = self.root.into_iter().collect();
        while let Some(x) = stack.pop() {
            if x.check(n).is_err() {
                return bad(format!("key {x} out of range"));
            }
            if std::mem::replace(&mut seen[x.index()], true) {
                return bad(format!("key {x} reached twice"));
            }
            count += 1;
            stack.extend(self.left(x));
            stack.extend(self.right(x));
        }
        if count != n {
            return bad(format!("{count} of {n} keys reachable"));
        }
        let order = self.in_order();
        if order.iter().enumerate().any(|(i, x)| x.get() as usize != i + 1) {
            return bad("symmetric order violated".into());
        }
        Ok(())
    }

    /// The induced fragment over `keys`, which must be a root-containing
    /// connected subtree.
    pub fn fragment(&self, keys: &[Element]) -> TreeFragment {
        let set: std::collections::BTreeSet<Element> = keys.iter().copied().collect();
        let inside = |c: Option<Element>| c.filter(|k| set.contains(k));
        let nodes = set.iter().map(|&k| (k, (inside(self.left(k)), inside(self.right(k))))).collect();
        TreeFragment { root: self.root.filter(|r| set.contains(r)), nodes }
    }
}

/// A binary tree on a subset of keys; children point only within the fragment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeFragment {
    root: Option<Element>,
    nodes: BTreeMap<Element, (Option<Element>, Option<Element>)>,
}

impl TreeFragment {
    pub fn new(root: Option<Element>, nodes: BTreeMap<Element, (Option<Element>, Option<Element>)>) -> Self {
        TreeFragment { root, nodes }
    }

    pub fn single(x: Element) -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(x, (None, None));
        TreeFragment { root: Some(x), nodes }
    }

    pub fn root(&self) -> Option<Element> {
        self.root
    }

    pub(crate) fn set_root(&mut self, root: Option<Element>) {
        self.root = root;
    }

    pub(crate) fn insert(&mut self, x: Element, left: Option<Element>, right: Option<Element>) {
        self.nodes.insert(x, (left, right));
    }

    pub fn children(&self, x: Element) -> Option<(Option<Element>, Option<Element>)> {
        self.nodes.get(&x).copied()
    }

    /// Keys in ascending order.
    pub fn keys(&self) -> impl Iterator<Item = Element> + '_ {
        self.nodes.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// In-order traversal from the root; `None` when the links do not form a
    /// tree covering exactly the fragment's keys.
    pub fn in_order(&self) -> Option<Vec<Element>> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = Vec::new();
        let mut cur = self.root;
        let mut steps = 0usize;
        while cur.is_some() || !stack.is_empty() {
            while let Some(x) = cur {
                steps += 1;
                if steps > self.nodes.len() {
                    return None;
                }
                stack.push(x);
                cur = self.nodes.get(&x)?.0;
            }
            let x = stack.pop()?;
            out.push(x);
            cur = self.nodes.get(&x)?.1;
        }
        (out.len() == self.nodes.len()).then_some(out)
    }

    /// Whether the links form a binary search tree on exactly these keys.
    pub fn is_bst(&self) -> bool {
        match self.in_order() {
            Some(order) => order.iter().copied().eq(self.keys()),
            None => false,
        }
    }

    /// The `|keys| + 1` empty child slots in symmetric order, as
    /// `(parent, is_right)`; a `None` parent means the fragment is empty.
    pub(crate) fn empty_slots(&self) -> Vec<(Option<Element>, bool)> {
        let mut slots = Vec::with_capacity(self.nodes.len() + 1);
        let Some(root) = self.root else {
            slots.push((None, false));
            return slots;
        };
        // iterative in-order that records each missing child in place
        let mut stack: Vec<(Element, bool)> = vec![(root, false)];
        while let Some((x, expanded)) = stack.pop() {
            let (l, r) = self.nodes[&x];
            if expanded {
                match r {
                    Some(r) => stack.push((r, false)),
                    None => slots.push((Some(x), true)),
                }
            } else {
                stack.push((x, true));
                match l {
                    Some(l) => stack.push((l, false)),
                    None => slots.push((Some(x), false)),
                }
            }
        }
        slots
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(v: u32) -> Element {
        Element::new(v)
    }

    #[test]
    fn shapes_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 0..40 {
            BSTree::chain_left(n).validate().unwrap();
            BSTree::chain_right(n).validate().unwrap();
            BSTree::balanced(n).validate().unwrap();
            BSTree::random(n, &mut rng).validate().unwrap();
        }
        let b = BSTree::balanced(7);
        assert_eq!(b.root(), Some(e(4)));
        assert_eq!((b.left(e(4)), b.right(e(4))), (Some(e(2)), Some(e(6))));
    }

    #[test]
    fn search_path_examples() {
        let chain = BSTree::chain_left(3);
        assert_eq!(chain.search_path(e(1)).unwrap(), vec![e(3), e(2), e(1)]);
        assert_eq!(chain.search_path(e(3)).unwrap(), vec![e(3)]);
        let bal = BSTree::balanced(3);
        assert_eq!(bal.search_path(e(3)).unwrap(), vec![e(2), e(3)]);
        assert!(bal.search_path(e(4)).is_err());
        assert!(bal.search_path(e(0)).is_err());
    }

    #[test]
    fn validate_catches_order_violation() {
        // root 1 with left child 2
        let t = BSTree::from_links(Some(e(1)), vec![Some(e(2)), None], vec![None, None]);
        assert!(t.is_err());
        let t = BSTree::from_links(Some(e(1)), vec![None, None], vec![None, None]);
        assert!(t.is_err());
    }

    #[test]
    fn fragment_slots() {
        let t = BSTree::balanced(3);
        let f = t.fragment(&[e(2), e(3)]);
        assert!(f.is_bst());
        // slots: left of 2, left of 3, right of 3
        assert_eq!(f.empty_slots(), vec![(Some(e(2)), false), (Some(e(3)), false), (Some(e(3)), true)]);
        assert_eq!(TreeFragment::default().empty_slots(), vec![(None, false)]);
    }
}
