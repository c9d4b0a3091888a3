//! Running an algorithm on a trace and the flat CSV reports.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{audit_run, corollary_bounds, CorollaryParams};
use crate::arboral::{greedy_initial_tree, run_greedy_future, run_splay, validate_execution, BSTree};
use crate::error::{Error, Result};
use crate::greedyass;
use crate::model::{AccessSequence, CostLedger, Element, Time, WeightAssignment};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Greedyass,
    Greedyfuture,
    Splay,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Greedyass => "greedyass",
            Algo::Greedyfuture => "greedyfuture",
            Algo::Splay => "splay",
        })
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedyass" => Ok(Algo::Greedyass),
            "greedyfuture" => Ok(Algo::Greedyfuture),
            "splay" => Ok(Algo::Splay),
            _ => Err(Error::InvalidParameter(format!("unknown algorithm `{s}`"))),
        }
    }
}

/// Initial tree for the tree algorithms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InitialTree {
    /// The greedy arrangement of all keys for the whole sequence.
    #[default]
    Greedy,
    Balanced,
    /// Left-leaning path rooted at `n`.
    Chain,
    /// Random insertion order from the seed.
    Random(u64),
}

impl InitialTree {
    pub fn build(self, seq: &AccessSequence) -> BSTree {
        let n = seq.n();
        match self {
            InitialTree::Greedy => greedy_initial_tree(n, seq),
            InitialTree::Balanced => BSTree::balanced(n),
            InitialTree::Chain => BSTree::chain_left(n),
            InitialTree::Random(seed) => BSTree::random(n, &mut ChaCha8Rng::seed_from_u64(seed)),
        }
    }
}

impl fmt::Display for InitialTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialTree::Greedy => f.write_str("greedy"),
            InitialTree::Balanced => f.write_str("balanced"),
            InitialTree::Chain => f.write_str("chain"),
            InitialTree::Random(seed) => write!(f, "random:{seed}"),
        }
    }
}

impl FromStr for InitialTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(InitialTree::Greedy),
            "balanced" => Ok(InitialTree::Balanced),
            "chain" => Ok(InitialTree::Chain),
            _ => match s.strip_prefix("random:").map(str::parse::<u64>) {
                Some(Ok(seed)) => Ok(InitialTree::Random(seed)),
                _ => Err(Error::InvalidParameter(format!("unknown initial tree `{s}`"))),
            },
        }
    }
}

/// Potential-argument columns of one search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuditColumns {
    pub phi_before: i64,
    pub phi_after: i64,
    pub amortized: i64,
    pub bound: i64,
    pub stubborn_left: usize,
    pub stubborn_right: usize,
}

/// One CSV line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct CsvRow {
    algo: Algo,
    n: usize,
    i: u32,
    s_i: u32,
    cost: u64,
    phi_before: Option<i64>,
    phi_after: Option<i64>,
    amortized: Option<i64>,
    bound: Option<i64>,
    stubborn_left: Option<usize>,
    stubborn_right: Option<usize>,
}

/// Per-search costs of one run, optionally with audit columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    algo: Algo,
    seq: AccessSequence,
    ledger: CostLedger,
    audits: Option<Vec<AuditColumns>>,
}

impl RunReport {
    pub fn algo(&self) -> Algo {
        self.algo
    }

    pub fn sequence(&self) -> &AccessSequence {
        &self.seq
    }

    pub fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    pub fn audits(&self) -> Option<&[AuditColumns]> {
        self.audits.as_deref()
    }

    pub fn total(&self) -> u64 {
        self.ledger.total()
    }

    /// Searches whose amortized cost exceeds the bound.
    pub fn bound_violations(&self) -> usize {
        self.audits.as_ref().map_or(0, |a| a.iter().filter(|c| c.amortized > c.bound).count())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.seq.m() == 0 {
            w.write_record(HEADER).expect("in-memory write");
        }
        for (k, c) in self.ledger.per_search().iter().enumerate() {
            let a = self.audits.as_ref().map(|a| a[k]);
            w.serialize(CsvRow {
                algo: self.algo,
                n: self.seq.n(),
                i: c.time.get(),
                s_i: c.searched.get(),
                cost: c.accessed,
                phi_before: a.map(|a| a.phi_before),
                phi_after: a.map(|a| a.phi_after),
                amortized: a.map(|a| a.amortized),
                bound: a.map(|a| a.bound),
                stubborn_left: a.map(|a| a.stubborn_left),
                stubborn_right: a.map(|a| a.stubborn_right),
            })
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Parses a report; rows must be searches `1..=m` of one algorithm on
    /// one universe, all audited or none.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if !header.iter().eq(HEADER) {
            return Err(Error::Parse(format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(","))));
        }
        let rows: Vec<CsvRow> =
            r.deserialize().collect::<std::result::Result<_, _>>().map_err(|e| Error::Parse(e.to_string()))?;
        let Some(first) = rows.first() else {
            return Err(Error::Parse("report has no rows".into()));
        };
        let (algo, n) = (first.algo, first.n);
        let audited = first.phi_before.is_some();
        let mut ledger = CostLedger::new();
        let mut keys = Vec::with_capacity(rows.len());
        let mut audits = Vec::new();
        for (k, row) in rows.iter().enumerate() {
            if row.algo != algo || row.n != n || row.i as usize != k + 1 {
                return Err(Error::Parse(format!("row {} breaks the run (algo, n or i)", k + 1)));
            }
            let cols = [row.phi_before, row.phi_after, row.amortized, row.bound];
            let present = cols.iter().filter(|c| c.is_some()).count()
                + row.stubborn_left.is_some() as usize
                + row.stubborn_right.is_some() as usize;
            match (audited, present) {
                (true, 6) => audits.push(AuditColumns {
                    phi_before: cols[0].unwrap(),
                    phi_after: cols[1].unwrap(),
                    amortized: cols[2].unwrap(),
                    bound: cols[3].unwrap(),
                    stubborn_left: row.stubborn_left.unwrap(),
                    stubborn_right: row.stubborn_right.unwrap(),
                }),
                (false, 0) => {}
                _ => return Err(Error::Parse(format!("row {}: audit columns must be all set or all empty", k + 1))),
            }
            let s = Element::new(row.s_i).check(n)?;
            if row.cost == 0 {
                return Err(Error::Parse(format!("row {}: zero cost", k + 1)));
            }
            keys.push(row.s_i);
            ledger.record(Time::new(row.i), s, row.cost);
        }
        Ok(RunReport { algo, seq: AccessSequence::from_keys(n, &keys)?, ledger, audits: audited.then_some(audits) })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

const HEADER: [&str; 11] = [
    "algo",
    "n",
    "i",
    "s_i",
    "cost",
    "phi_before",
    "phi_after",
    "amortized",
    "bound",
    "stubborn_left",
    "stubborn_right",
];

/// Runs `algo` on `seq`. Tree algorithms start from `t0` and their
/// executions are validated. `audit_weights` requests the potential audit,
/// which only the geometric algorithm supports.
pub fn run_algorithm(
    seq: &AccessSequence,
    algo: Algo,
    t0: InitialTree,
    audit_weights: Option<&WeightAssignment>,
) -> Result<RunReport> {
    if audit_weights.is_some() && algo != Algo::Greedyass {
        return Err(Error::InvalidParameter(format!("audits need greedyass, not {algo}")));
    }
    let (ledger, audits) = match algo {
        Algo::Greedyass => {
            let ledger = greedyass::run(seq).ledger;
            let audits = audit_weights.map(|w| {
                audit_run(seq, w)
                    .audits()
                    .iter()
                    .map(|a| AuditColumns {
                        phi_before: a.potential_before,
                        phi_after: a.potential_after,
                        amortized: a.amortized,
                        bound: a.bound,
                        stubborn_left: a.stubborn_left.len(),
                        stubborn_right: a.stubborn_right.len(),
                    })
                    .collect()
            });
            (ledger, audits)
        }
        Algo::Greedyfuture | Algo::Splay => {
            let tree = t0.build(seq);
            let (execution, ledger) =
                if algo == Algo::Greedyfuture { run_greedy_future(&tree, seq)? } else { run_splay(&tree, seq)? };
            let checked = validate_execution(&execution, seq)?;
            debug_assert_eq!(checked, ledger);
            (ledger, None)
        }
    };
    Ok(RunReport { algo, seq: seq.clone(), ledger, audits })
}

/// One line of the merged summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub source: String,
    pub algo: Algo,
    pub n: usize,
    pub m: usize,
    pub total: u64,
    pub balance_bound: i64,
    pub balance_ratio: f64,
    pub static_optimality_bound: i64,
    pub static_optimality_ratio: f64,
    pub finger: u32,
    pub static_finger_bound: i64,
    pub static_finger_ratio: f64,
    pub working_set_sum: f64,
    pub working_set_ratio: f64,
    pub audited: bool,
    pub bound_violations: usize,
}

pub fn summarize(source: &str, report: &RunReport) -> SummaryRow {
    let c = corollary_bounds(report.sequence(), report.ledger(), &CorollaryParams::default());
    let ratio = |b: i64| if b > 0 { c.actual as f64 / b as f64 } else { 0.0 };
    SummaryRow {
        source: source.to_string(),
        algo: report.algo(),
        n: c.n,
        m: c.m,
        total: c.actual,
        balance_bound: c.balance_bound,
        balance_ratio: ratio(c.balance_bound),
        static_optimality_bound: c.static_optimality_bound,
        static_optimality_ratio: c.static_optimality_ratio,
        finger: c.finger,
        static_finger_bound: c.static_finger_bound,
        static_finger_ratio: c.static_finger_ratio,
        working_set_sum: c.working_set_sum,
        working_set_ratio: c.working_set_ratio,
        audited: report.audits().is_some(),
        bound_violations: report.bound_violations(),
    }
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
