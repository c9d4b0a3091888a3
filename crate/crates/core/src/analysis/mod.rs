//! The potential-function apparatus: neighborhoods, sizes, ranks and
//! potential over the geometric greedy run, per-search audits with the
//! lemma checks, whole-run bounds, and the sequential-access checker.

mod audit;
mod corollary;
mod neighborhood;
mod rank;
mod sequential;

pub use audit::{
    audit_run, check_no_access_lemma, check_rank_inequalities, check_scale_covariance, check_stubborn_bound,
    check_telescope, row_of, telescope_side, AuditTrace, SearchAudit, TelescopeSide,
};
pub use corollary::{
    corollary_bounds, finger_weights, working_set_distance, working_set_distances, CorollaryParams, CorollaryReport,
};
pub use neighborhood::{check_neighborhood_semantics, KeyRange, NeighborhoodSnapshot};
pub use rank::{floor_log2, floor_log2_int};
pub use sequential::{check_sequential, SequentialReport};

use crate::model::Time;

/// Runs every per-search check on every search of `trace`; returns the
/// first failing `(time, check name)`.
pub fn first_lemma_failure(trace: &AuditTrace<'_>) -> Option<(Time, &'static str)> {
    for i in 1..=trace.m() as u32 {
        let t = Time::new(i);
        if !trace.audit(t).within_bound() {
            return Some((t, "access-lemma"));
        }
        if !check_no_access_lemma(trace, t) {
            return Some((t, "no-access"));
        }
        if !check_rank_inequalities(trace, t) {
            return Some((t, "rank-inequalities"));
        }
        if !check_telescope(trace, t) {
            return Some((t, "telescope"));
        }
        if !check_stubborn_bound(trace.audit(t)) {
            return Some((t, "stubborn-bound"));
        }
    }
    None
}
