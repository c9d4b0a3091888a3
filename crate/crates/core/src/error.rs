use thiserror::Error;

use crate::model::{Element, Point, Time};

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element {key} is outside the universe 1..={n}")]
    ElementOutOfRange { key: u32, n: usize },

    #[error("point ({}, {}) is outside the {n}x{m} grid", .point.x.get(), .point.y.get())]
    PointOutOfBounds { point: Point, n: usize, m: usize },

    #[error("degenerate pair query: both corners are ({}, {})", .0.x.get(), .0.y.get())]
    DegeneratePair(Point),

    #[error("invalid weight for element {}: {reason}", .element.get())]
    InvalidWeight { element: Element, reason: String },

    #[error("weight assignment covers {got} elements, universe has {expected}")]
    WeightCount { expected: usize, got: usize },

    #[error("tree is not a valid binary search tree over 1..={n}: {reason}")]
    InvalidTree { n: usize, reason: String },

    #[error("invalid reconfiguration: {0}")]
    InvalidReconfiguration(String),

    #[error("execution invalid at search {}: {reason}", .time.get())]
    InvalidExecution { time: Time, reason: String },

    #[error("execution has {steps} reconfigurations but the sequence has {searches} searches")]
    LengthMismatch { steps: usize, searches: usize },

    #[error("future subsequence value {} is inconsistent with the node range", .0.get())]
    RangeInconsistent(Element),

    #[error("rank is undefined for a non-positive size")]
    UndefinedRank,

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("no satisfied superset within {budget} added points")]
    ExceedsBudget { budget: usize },

    #[error("minimum row extension is not unique: {count} minimum sets of size {size}")]
    NonUniqueMinimum { size: usize, count: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ElementOutOfRange { .. } => "element_out_of_range",
            Error::PointOutOfBounds { .. } => "point_out_of_bounds",
            Error::DegeneratePair(_) => "degenerate_pair",
            Error::InvalidWeight { .. } => "invalid_weight",
            Error::WeightCount { .. } => "weight_count",
            Error::InvalidTree { .. } => "invalid_tree",
            Error::InvalidReconfiguration(_) => "invalid_reconfiguration",
            Error::InvalidExecution { .. } => "invalid_execution",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::RangeInconsistent(_) => "range_inconsistent",
            Error::UndefinedRank => "undefined_rank",
            Error::TooLarge(_) => "too_large",
            Error::ExceedsBudget { .. } => "exceeds_budget",
            Error::NonUniqueMinimum { .. } => "non_unique_minimum",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
