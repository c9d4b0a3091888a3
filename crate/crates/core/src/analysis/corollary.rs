//! Whole-run bounds that follow from the per-search access bound.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::rank::{floor_log2, floor_log2_int};
use crate::model::{AccessSequence, CostLedger, Element};

/// `d(i)`: distinct keys searched strictly between the previous search of
/// `s_i` and time `i`; `i - 1` when `s_i` was never searched before.
/// Direct scan of the definition.
pub fn working_set_distance(seq: &AccessSequence, i: usize) -> usize {
    assert!(i >= 1 && i <= seq.m(), "time out of range");
    let s = seq.searches();
    let key = s[i - 1];
    match s[..i - 1].iter().rposition(|&x| x == key) {
        None => i - 1,
        Some(p) => {
            let mut seen: Vec<Element> = s[p + 1..i - 1].to_vec();
            seen.sort_unstable();
            seen.dedup();
            seen.len()
        }
    }
}

/// `d(i)` for every `i`, using a Fenwick tree over "latest occurrence"
/// markers.
pub fn working_set_distances(seq: &AccessSequence) -> Vec<usize> {
    let m = seq.m();
    let mut fenwick = vec![0i64; m + 1];
    let add = |f: &mut Vec<i64>, mut i: usize, v: i64| {
        while i <= m {
            f[i] += v;
            i += i & i.wrapping_neg();
        }
    };
    let prefix = |f: &Vec<i64>, mut i: usize| {
        let mut s = 0;
        while i > 0 {
            s += f[i];
            i -= i & i.wrapping_neg();
        }
        s
    };
    let mut last: HashMap<Element, usize> = HashMap::new();
    let mut out = Vec::with_capacity(m);
    for (idx, &x) in seq.searches().iter().enumerate() {
        let i = idx + 1;
        match last.get(&x).copied() {
            None => out.push(i - 1),
            Some(p) => {
                out.push((prefix(&fenwick, i - 1) - prefix(&fenwick, p)) as usize);
                add(&mut fenwick, p, -1);
            }
        }
        add(&mut fenwick, i, 1);
        last.insert(x, i);
    }
    out
}

/// Knobs for [`corollary_bounds`].
#[derive(Clone, Debug, Default)]
pub struct CorollaryParams {
    /// The static finger; defaults to `s_1` (or 1 for an empty sequence).
    pub finger: Option<Element>,
}

/// Actual cost of a run set against each whole-run bound.
#[derive(Clone, Debug, Serialize)]
pub struct CorollaryReport {
    pub n: usize,
    pub m: usize,
    pub actual: u64,
    /// `m (5 + 6⌊lg n⌋)` from unit weights.
    pub balance_bound: i64,
    pub balance_holds: bool,
    /// Weights `w(x) = t(x)` (unsearched keys weigh 1):
    /// `Σ_i (5 + 6⌊lg W⌋ - 6⌊lg t(s_i)⌋)`.
    pub static_optimality_bound: i64,
    pub static_optimality_ratio: f64,
    pub finger: u32,
    /// Weights `w(x) = 1/(|x-f|+1)^2`:
    /// `Σ_i (5 + 6⌊lg W⌋ - 6⌊lg w(s_i)⌋) + n (r_max - r_min)`.
    pub static_finger_bound: i64,
    pub static_finger_ratio: f64,
    /// `Σ_i lg(d(i) + 1)`.
    pub working_set_sum: f64,
    /// `actual / (m + Σ lg(d(i)+1))`.
    pub working_set_ratio: f64,
}

impl CorollaryReport {
    pub fn static_optimality_holds(&self) -> bool {
        self.actual as i64 <= self.static_optimality_bound
    }

    pub fn static_finger_holds(&self) -> bool {
        self.actual as i64 <= self.static_finger_bound
    }
}

/// Finger weights `1/(|x-f|+1)^2` for `x` in `1..=n`.
pub fn finger_weights(n: usize, finger: Element) -> Vec<BigRational> {
    (1..=n as i64)
        .map(|x| {
            let d = (x - finger.get() as i64).abs() + 1;
            BigRational::new(BigInt::one(), BigInt::from(d * d))
        })
        .collect()
}

pub fn corollary_bounds(seq: &AccessSequence, ledger: &CostLedger, params: &CorollaryParams) -> CorollaryReport {
    let n = seq.n();
    let m = seq.m();
    let actual = ledger.total();
    let lg_n = if n > 0 { floor_log2_int(n as u64) } else { 0 };
    let balance_bound = m as i64 * (5 + 6 * lg_n);

    let mut freq = vec![0u64; n];
    for s in seq.searches() {
        freq[s.index()] += 1;
    }
    let unsearched = freq.iter().filter(|&&t| t == 0).count() as u64;
    let lg_w = if m as u64 + unsearched > 0 { floor_log2_int(m as u64 + unsearched) } else { 0 };
    let static_optimality_bound: i64 =
        seq.searches().iter().map(|s| 5 + 6 * lg_w - 6 * floor_log2_int(freq[s.index()])).sum();

    let finger = params.finger.or_else(|| seq.searches().first().copied()).unwrap_or(Element::new(1));
    let fw = finger_weights(n, finger);
    let static_finger_bound = if n == 0 {
        0
    } else {
        let total: BigRational = fw.iter().sum();
        let lg_total = floor_log2(&total).expect("positive");
        let lg_w: Vec<i64> = fw.iter().map(|w| floor_log2(w).expect("positive")).collect();
        let r_min = *lg_w.iter().min().expect("n > 0");
        let per_search: i64 = seq.searches().iter().map(|s| 5 + 6 * lg_total - 6 * lg_w[s.index()]).sum();
        per_search + n as i64 * (lg_total - r_min)
    };

    let working_set_sum: f64 = working_set_distances(seq).iter().map(|&d| ((d + 1) as f64).log2()).sum();
    let ratio = |bound: f64| if bound > 0.0 { actual as f64 / bound } else { 0.0 };

    CorollaryReport {
        n,
        m,
        actual,
        balance_bound,
        balance_holds: actual as i64 <= balance_bound,
        static_optimality_bound,
        static_optimality_ratio: ratio(static_optimality_bound as f64),
        finger: finger.get(),
        static_finger_bound,
        static_finger_ratio: ratio(static_finger_bound as f64),
        working_set_sum,
        working_set_ratio: ratio(m as f64 + working_set_sum),
    }
}
