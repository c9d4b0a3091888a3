//! Operational surface: generators, trace and report files, and the
//! verification battery behind the `greedylab` binary.

mod generate;
mod report;
mod suites;
mod trace;

use std::fs;
use std::path::Path;

pub use generate::{
    bit_reversal_round, bit_reversal_universe, gen_bit_reversal, gen_random, gen_sequential, Distribution, Pattern,
    WINDOW_REUSE,
};
pub use report::{run_algorithm, summarize, summary_csv, Algo, AuditColumns, InitialTree, RunReport, SummaryRow};
pub use suites::{
    equivalence_mismatches, lemma_corpus, random_point_set, row_minimality_holds, run_suite, sequential_shapes,
    CorpusTrace, Suite, SuiteConfig, SuiteOutcome,
};
pub use trace::{GeneratorInfo, TraceFile};

use crate::error::{Error, Result};
use crate::model::WeightAssignment;

/// Resolves a weight spec: `uniform` or `file:PATH` in the two-column
/// `element p/q` format.
pub fn load_weights(spec: &str, n: usize) -> Result<WeightAssignment> {
    if spec == "uniform" {
        return Ok(WeightAssignment::uniform(n));
    }
    let Some(path) = spec.strip_prefix("file:") else {
        return Err(Error::InvalidParameter(format!("weights must be `uniform` or `file:PATH`, got `{spec}`")));
    };
    let text = fs::read_to_string(Path::new(path)).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    WeightAssignment::parse(n, &text)
}
