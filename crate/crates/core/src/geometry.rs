//! Arboral satisfaction predicates.
//!
//! A pair of points is satisfied when the two share a row or a column, or
//! when the closed rectangle they span holds some third point of the set.
//! The quadratic scan in [`is_satisfied_set`] is the reference; the row sweep
//! in [`is_satisfied_set_indexed`] must agree with it.

use std::collections::BTreeMap;

use crate::arboral::Execution;
use crate::error::{Error, Result};
use crate::model::{Point, PointSet, Time};

fn in_rectangle(p: &Point, a: &Point, b: &Point) -> bool {
    let (x0, x1) = (a.x.min(b.x), a.x.max(b.x));
    let (y0, y1) = (a.y.min(b.y), a.y.max(b.y));
    x0 <= p.x && p.x <= x1 && y0 <= p.y && p.y <= y1
}

fn pair_satisfied(a: &Point, b: &Point, set: &PointSet) -> bool {
    a.x == b.x || a.y == b.y || set.iter().any(|p| p != a && p != b && in_rectangle(p, a, b))
}

/// Whether `a` and `b` are arborally satisfied with respect to `set`.
pub fn is_satisfied_pair(a: &Point, b: &Point, set: &PointSet) -> Result<bool> {
    if a == b {
        return Err(Error::DegeneratePair(*a));
    }
    Ok(pair_satisfied(a, b, set))
}

/// Reference check: every unordered pair, each with a linear witness scan.
pub fn is_satisfied_set(set: &PointSet) -> bool {
    let pts: Vec<&Point> = set.iter().collect();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            if !pair_satisfied(a, b, set) {
                return false;
            }
        }
    }
    true
}

/// All unsatisfied pairs, each ordered `(a, b)` with `a < b` row-major, and
/// the list sorted lexicographically.
pub fn unsatisfied_pairs(set: &PointSet) -> Vec<(Point, Point)> {
    let pts: Vec<Point> = set.iter().copied().collect();
    let mut out = Vec::new();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            if !pair_satisfied(a, b, set) {
                out.push((*a, *b));
            }
        }
    }
    out
}

/// Row-sweep satisfaction check.
///
/// For each point `a`, walk the rows above it. On the right side keep the
/// least column `>= a.x` seen strictly below the current row (counting only
/// columns `> a.x` on `a`'s own row). The nearest point right of `a.x` on the
/// current row is unsatisfied with `a` exactly when that minimum lies beyond
/// it; every farther point on the row is witnessed by the nearest one. The
/// left side mirrors this.
pub fn is_satisfied_set_indexed(set: &PointSet) -> bool {
    let mut rows: BTreeMap<Time, Vec<u32>> = BTreeMap::new();
    for p in set.iter() {
        rows.entry(p.y).or_default().push(p.x.get());
    }
    // BTreeSet iteration is row-major, so each row is already sorted.
    let rows: Vec<(Time, Vec<u32>)> = rows.into_iter().collect();

    for (r, (_, cols)) in rows.iter().enumerate() {
        for (k, &ax) in cols.iter().enumerate() {
            let mut right_min = cols.get(k + 1).copied().unwrap_or(u32::MAX);
            let mut left_max = if k > 0 { cols[k - 1] } else { 0 };
            for (_, above) in &rows[r + 1..] {
                let right_live = right_min > ax;
                let left_live = left_max < ax;
                if !right_live && !left_live {
                    break;
                }
                let pos = above.partition_point(|&c| c < ax);
                if right_live {
                    if let Some(&c) = above.get(pos) {
                        if c > ax && right_min > c {
                            return false;
                        }
                        right_min = right_min.min(c);
                    }
                }
                if left_live {
                    // greatest column <= ax
                    let le = if above.get(pos) == Some(&ax) { Some(ax) } else { pos.checked_sub(1).map(|i| above[i]) };
                    if let Some(c) = le {
                        if c < ax && left_max < c {
                            return false;
                        }
                        left_max = left_max.max(c);
                    }
                }
            }
        }
    }
    true
}

/// The geometric view `{(x, y) | x in tau_y}` of an execution.
pub fn geometric_view_of_execution(execution: &Execution) -> Result<PointSet> {
    execution.check_structure()?;
    let n = execution.initial_tree().n();
    let m = execution.steps().len();
    let mut set = PointSet::new(n, m);
    for (i, step) in execution.steps().iter().enumerate() {
        for &x in step.tau() {
            set.insert(Point { x, y: Time::new(i as u32 + 1) })?;
        }
    }
    Ok(set)
}
