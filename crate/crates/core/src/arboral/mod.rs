//! Binary search trees, root-containing reconfigurations and executions,
//! the offline greedy algorithm, and a splay baseline.

mod execution;
mod greedy_future;
mod splay;
mod tree;

pub use execution::{apply_reconfiguration, validate_execution, Execution, Reconfiguration};
pub(crate) use greedy_future::greedy_future_costs;
pub use greedy_future::{greedy_future_build, greedy_initial_tree, run_greedy_future, run_greedy_future_observed};
pub use splay::run_splay;
pub use tree::{BSTree, TreeFragment};
