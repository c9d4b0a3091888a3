//! Search-by-search replay of the geometric greedy algorithm with exact
//! potential accounting, and the per-search lemma checks.

use serde::Serialize;

use super::neighborhood::{KeyRange, NeighborhoodSnapshot};
use super::rank::floor_log2;
use crate::greedyass::{step, LastAccessTable, RowOutput};
use crate::model::{AccessSequence, Element, Time, WeightAssignment};

/// The accounting for one search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchAudit {
    pub time: Time,
    pub searched: Element,
    /// `{s_i} ∪ P_i`, ascending.
    pub accessed: Vec<Element>,
    pub cost: u64,
    pub potential_before: i64,
    pub potential_after: i64,
    pub amortized: i64,
    /// `5 + 6⌊lg W⌋ - 6 r(s_i, i-1)`.
    pub bound: i64,
    pub floor_lg_total: i64,
    /// `r(s_i, i-1)`.
    pub searched_rank_before: i64,
    /// Stubborn accessed elements above `s_i`, ascending.
    pub stubborn_right: Vec<Element>,
    /// Stubborn accessed elements below `s_i`, descending (outward).
    pub stubborn_left: Vec<Element>,
    /// `(e_rℓ, e_rr)`: least and greatest accessed elements above `s_i`.
    pub right_extremes: Option<(Element, Element)>,
    /// `(e_ℓℓ, e_ℓr)`: least and greatest accessed elements below `s_i`.
    pub left_extremes: Option<(Element, Element)>,
}

impl SearchAudit {
    pub fn within_bound(&self) -> bool {
        self.amortized <= self.bound
    }
}

/// A replayed run: tables and ranks at every time `0..=m` plus the audits.
#[derive(Clone, Debug)]
pub struct AuditTrace<'w> {
    weights: &'w WeightAssignment,
    tables: Vec<LastAccessTable>,
    ranks: Vec<Vec<i64>>,
    potentials: Vec<i64>,
    rows: Vec<RowOutput>,
    audits: Vec<SearchAudit>,
}

impl<'w> AuditTrace<'w> {
    pub fn weights(&self) -> &'w WeightAssignment {
        self.weights
    }

    pub fn audits(&self) -> &[SearchAudit] {
        &self.audits
    }

    pub fn audit(&self, i: Time) -> &SearchAudit {
        &self.audits[i.get() as usize - 1]
    }

    pub fn m(&self) -> usize {
        self.audits.len()
    }

    pub fn snapshot(&self, t: Time) -> NeighborhoodSnapshot<'w> {
        NeighborhoodSnapshot::new(self.tables[t.get() as usize].clone(), self.weights)
    }

    pub fn rank(&self, x: Element, t: Time) -> i64 {
        self.ranks[t.get() as usize][x.index()]
    }

    pub fn potential(&self, t: Time) -> i64 {
        self.potentials[t.get() as usize]
    }

    pub fn actual_total(&self) -> u64 {
        self.audits.iter().map(|a| a.cost).sum()
    }

    pub fn amortized_total(&self) -> i64 {
        self.audits.iter().map(|a| a.amortized).sum()
    }

    /// `Σ amortized = actual + Φ(m) - Φ(0)`.
    pub fn is_exact(&self) -> bool {
        let m = Time::new(self.m() as u32);
        self.amortized_total() == self.actual_total() as i64 + self.potential(m) - self.potential(Time::NEVER)
    }

    pub fn all_within_bound(&self) -> bool {
        self.audits.iter().all(SearchAudit::within_bound)
    }

    fn row(&self, i: Time) -> &RowOutput {
        &self.rows[i.get() as usize - 1]
    }
}

/// Accessed elements on one side of `s`, ordered outward from `s`.
fn side(accessed: &[Element], s: Element, right: bool) -> Vec<Element> {
    if right {
        accessed.iter().copied().filter(|&x| x > s).collect()
    } else {
        accessed.iter().rev().copied().filter(|&x| x < s).collect()
    }
}

/// Replays the geometric greedy run on `seq`, auditing every search.
pub fn audit_run<'w>(seq: &AccessSequence, weights: &'w WeightAssignment) -> AuditTrace<'w> {
    assert_eq!(seq.n(), weights.n(), "weights must cover the universe");
    let lg_total = floor_log2(weights.total()).expect("total weight is positive");
    let mut table = LastAccessTable::new(seq.n());
    let snap0 = NeighborhoodSnapshot::new(table.clone(), weights);
    let mut ranks = vec![snap0.ranks()];
    let mut potentials = vec![ranks[0].iter().sum::<i64>()];
    let mut tables = vec![table.clone()];
    let mut rows = Vec::with_capacity(seq.m());
    let mut audits = Vec::with_capacity(seq.m());

    for &s in seq.searches() {
        let row = step(&mut table, s).expect("sequence keys are in range");
        let snap = NeighborhoodSnapshot::new(table.clone(), weights);
        let after = snap.ranks();
        let before = ranks.last().expect("time 0 present");
        let phi_after: i64 = after.iter().sum();
        let phi_before = *potentials.last().expect("time 0 present");
        let accessed = row.accessed();
        let cost = row.accessed_count();

        let stubborn = |outward: &[Element]| -> Vec<Element> {
            outward.windows(2).filter(|w| after[w[0].index()] == before[w[1].index()]).map(|w| w[0]).collect()
        };
        let right = side(&accessed, s, true);
        let left = side(&accessed, s, false);
        let searched_rank_before = before[s.index()];

        audits.push(SearchAudit {
            time: row.time,
            searched: s,
            cost,
            potential_before: phi_before,
            potential_after: phi_after,
            amortized: cost as i64 + phi_after - phi_before,
            bound: 5 + 6 * lg_total - 6 * searched_rank_before,
            floor_lg_total: lg_total,
            searched_rank_before,
            stubborn_right: stubborn(&right),
            stubborn_left: stubborn(&left),
            right_extremes: right.first().map(|&lo| (lo, *right.last().expect("nonempty"))),
            left_extremes: left.first().map(|&hi| (*left.last().expect("nonempty"), hi)),
            accessed,
        });
        ranks.push(after);
        potentials.push(phi_after);
        tables.push(table.clone());
        rows.push(row);
    }
    AuditTrace { weights, tables, ranks, potentials, rows, audits }
}

/// Unaccessed elements keep their inclusive neighborhood across search `i`.
pub fn check_no_access_lemma(trace: &AuditTrace<'_>, i: Time) -> bool {
    let before = trace.snapshot(Time::new(i.get() - 1)).all_neighborhoods();
    let after = trace.snapshot(i).all_neighborhoods();
    let accessed = &trace.audit(i).accessed;
    (0..before.len())
        .filter(|&k| accessed.binary_search(&Element::new(k as u32 + 1)).is_err())
        .all(|k| before[k] == after[k])
}

/// For every accessed `x ≠ s_i` with a successor `x_r` on its side:
/// `Γ(x,i) ⊊ Γ(x_r,i-1)`, `σ(x,i) < σ(x_r,i-1)` and `r(x,i) <= r(x_r,i-1)`.
pub fn check_rank_inequalities(trace: &AuditTrace<'_>, i: Time) -> bool {
    let prev = Time::new(i.get() - 1);
    let before = trace.snapshot(prev);
    let after = trace.snapshot(i);
    let a = trace.audit(i);
    [true, false].into_iter().all(|right| {
        side(&a.accessed, a.searched, right).windows(2).all(|w| {
            let (x, xr) = (w[0], w[1]);
            let g_after: KeyRange = after.inclusive_neighborhood(x).expect("in range");
            let g_before: KeyRange = before.inclusive_neighborhood(xr).expect("in range");
            g_after.is_subset_of(&g_before)
                && g_after != g_before
                && after.size(x).expect("in range") < before.size(xr).expect("in range")
                && trace.rank(x, i) <= trace.rank(xr, prev)
        })
    })
}

/// Each side's stubborn count is at most `1 + 2⌊lg W⌋ - 2r(s_i, i-1)`.
pub fn check_stubborn_bound(audit: &SearchAudit) -> bool {
    let cap = 1 + 2 * audit.floor_lg_total - 2 * audit.searched_rank_before;
    audit.stubborn_right.len() as i64 <= cap && audit.stubborn_left.len() as i64 <= cap
}

/// One side of a search's amortized cost, split the way the telescoping
/// argument splits it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TelescopeSide {
    /// `Σ (1 + r(x,i) - r(x,i-1))` over accessed `x` on this side.
    pub sum: i64,
    /// `1 + α + r(e_far, i) - r(e_near, i-1)`.
    pub closed_form: i64,
    /// `Σ (r(x_r,i-1) - 1 - r(x,i))` over non-stubborn `x` with a successor.
    pub slack: i64,
    /// Least per-element slack; negative means a rank inequality failed.
    pub min_term: i64,
}

impl TelescopeSide {
    /// The sum meets the closed form exactly.
    pub fn is_tight(&self) -> bool {
        self.sum == self.closed_form
    }
}

/// The telescoping split of side `right` (or left) of search `i`; `None`
/// when that side accessed nothing.
pub fn telescope_side(trace: &AuditTrace<'_>, i: Time, right: bool) -> Option<TelescopeSide> {
    let prev = Time::new(i.get() - 1);
    let a = trace.audit(i);
    let out = side(&a.accessed, a.searched, right);
    let (&near, &far) = (out.first()?, out.last()?);
    let sum = out.iter().map(|&x| 1 + trace.rank(x, i) - trace.rank(x, prev)).sum();
    let stubborn = if right { &a.stubborn_right } else { &a.stubborn_left };
    let closed_form = 1 + stubborn.len() as i64 + trace.rank(far, i) - trace.rank(near, prev);
    let mut slack = 0;
    let mut min_term = 0;
    for w in out.windows(2) {
        let term = trace.rank(w[1], prev) - trace.rank(w[0], i);
        if term != 0 {
            slack += term - 1;
            min_term = min_term.min(term - 1);
        }
    }
    Some(TelescopeSide { sum, closed_form, slack, min_term })
}

/// The telescoping identity on both sides of search `i`: the per-element
/// amortized sum equals `1 + α + r(e_far,i) - r(e_near,i-1)` minus the
/// non-negative slack of the non-stubborn elements. Vacuous for an empty side.
pub fn check_telescope(trace: &AuditTrace<'_>, i: Time) -> bool {
    [true, false].into_iter().all(|right| match telescope_side(trace, i, right) {
        None => true,
        Some(t) => t.min_term >= 0 && t.sum == t.closed_form - t.slack,
    })
}

/// Scaling every weight by `2^c` shifts every rank at every time by exactly
/// `c` and leaves each search's amortized cost and bound unchanged.
pub fn check_scale_covariance(seq: &AccessSequence, weights: &WeightAssignment, c: i32) -> bool {
    let scaled = weights.scaled_pow2(c);
    let (a, b) = (audit_run(seq, weights), audit_run(seq, &scaled));
    let shifted = a.ranks.iter().zip(&b.ranks).all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| y - x == c as i64));
    shifted && a.audits.iter().zip(&b.audits).all(|(x, y)| x.amortized == y.amortized && x.bound == y.bound)
}

/// The row output of search `i`.
pub fn row_of<'a>(trace: &'a AuditTrace<'_>, i: Time) -> &'a RowOutput {
    trace.row(i)
}
