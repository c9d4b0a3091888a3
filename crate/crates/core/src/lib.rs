//! Greedy binary search trees in the arboral and geometric models.
//!
//! [`greedyass`] answers searches online on the grid, [`arboral`] runs the
//! offline greedy tree algorithm (and a splay baseline), [`geometry`]
//! referees arboral satisfaction, [`analysis`] instruments the potential
//! argument search by search, and [`oracle`] brute-forces small instances.

pub mod analysis;
pub mod arboral;
pub mod error;
pub mod geometry;
pub mod greedyass;
pub mod model;
pub mod oracle;
pub mod workbench;

pub use error::{Error, Result};
pub use model::{AccessSequence, CostLedger, Element, Point, PointSet, Time, WeightAssignment};
