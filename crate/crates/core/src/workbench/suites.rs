//! The `verify` battery.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    audit_run, check_neighborhood_semantics, check_scale_covariance, check_sequential, first_lemma_failure,
    floor_log2_int, telescope_side,
};
use crate::arboral::{greedy_initial_tree, run_greedy_future, run_splay, validate_execution, BSTree};
use crate::error::{Error, Result};
use crate::geometry::{geometric_view_of_execution, is_satisfied_set, is_satisfied_set_indexed};
use crate::greedyass::{self, step, LastAccessTable};
use crate::model::{AccessSequence, Point, PointSet, Time, WeightAssignment};
use crate::oracle::{all_sequences, min_row_extension};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    AccessLemma,
    Lemmas,
    Satisfaction,
    RowMinimality,
    Equivalence,
    Sequential,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::AccessLemma,
        Suite::Lemmas,
        Suite::Satisfaction,
        Suite::RowMinimality,
        Suite::Equivalence,
        Suite::Sequential,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::AccessLemma => "access-lemma",
            Suite::Lemmas => "lemmas",
            Suite::Satisfaction => "satisfaction",
            Suite::RowMinimality => "row-minimality",
            Suite::Equivalence => "equivalence",
            Suite::Sequential => "sequential",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.to_string() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite `{s}`")))
    }
}

/// Size overrides; each suite reads them its own way (see [`run_suite`]).
#[derive(Clone, Copy, Debug, Default)]
pub struct SuiteConfig {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub seeds: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub checks: u64,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteOutcome {
    fn new(suite: Suite) -> Self {
        SuiteOutcome { suite, checks: 0, failures: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// A seeded random trace with random integer weights in `1..=16`.
#[derive(Clone, Debug)]
pub struct CorpusTrace {
    pub seed: u64,
    pub seq: AccessSequence,
    pub weights: WeightAssignment,
}

/// Seeds `0..seeds`; each draws `n` in `1..=max_n`, `m` in `1..=max_m`,
/// uniform keys and random weights.
pub fn lemma_corpus(seeds: u64, max_n: usize, max_m: usize) -> Vec<CorpusTrace> {
    (0..seeds)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=max_n.max(1));
            let m = rng.gen_range(1..=max_m.max(1));
            let keys: Vec<u32> = (0..m).map(|_| rng.gen_range(1..=n as u32)).collect();
            let ws: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=16)).collect();
            CorpusTrace {
                seed,
                seq: AccessSequence::from_keys(n, &keys).expect("keys in range"),
                weights: WeightAssignment::from_integers(&ws).expect("positive"),
            }
        })
        .collect()
}

fn random_sequence(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> AccessSequence {
    let n = rng.gen_range(1..=max_n.max(1));
    let m = rng.gen_range(0..=max_m);
    let keys: Vec<u32> = (0..m).map(|_| rng.gen_range(1..=n as u32)).collect();
    AccessSequence::from_keys(n, &keys).expect("keys in range")
}

/// Runs one suite, or every suite for [`Suite::All`].
///
/// Defaults and flag meanings:
/// - `access-lemma`, `lemmas`: `seeds` traces (100) with `n <= N` (64),
///   `m <= M` (256), under unit and random weights.
/// - `satisfaction`: `seeds` traces (200) with `n <= N` (16), `m <= M` (32),
///   plus as many random point sets for the two checkers.
/// - `row-minimality`: every sequence over `n, m <= N` (4), plus `seeds`
///   (500) random ones at `n = m = N + 1`.
/// - `equivalence`: every instance with `n, m <= 4`, plus `seeds` (200)
///   random ones with `n <= N` (16), `m <= M` (64).
/// - `sequential`: every `n` in `1..=N` (1024) from chain, mirrored chain,
///   balanced and `seeds` (50) random shapes.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Vec<SuiteOutcome> {
    match suite {
        Suite::All => Suite::EACH.iter().flat_map(|&s| run_suite(s, cfg)).collect(),
        Suite::AccessLemma => vec![access_lemma(cfg)],
        Suite::Lemmas => vec![lemmas(cfg)],
        Suite::Satisfaction => vec![satisfaction(cfg)],
        Suite::RowMinimality => vec![row_minimality(cfg)],
        Suite::Equivalence => vec![equivalence(cfg)],
        Suite::Sequential => vec![sequential(cfg)],
    }
}

fn corpus(cfg: &SuiteConfig) -> Vec<CorpusTrace> {
    lemma_corpus(cfg.seeds.unwrap_or(100), cfg.n.unwrap_or(64), cfg.m.unwrap_or(256))
}

fn access_lemma(cfg: &SuiteConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new(Suite::AccessLemma);
    let mut tightest = i64::MAX;
    let mut worst_balance = 0f64;
    for t in corpus(cfg) {
        let unit = WeightAssignment::uniform(t.seq.n());
        for (label, w) in [("unit", &unit), ("random", &t.weights)] {
            let trace = audit_run(&t.seq, w);
            for a in trace.audits() {
                tightest = tightest.min(a.bound - a.amortized);
                out.check(a.within_bound(), || {
                    format!(
                        "seed {} ({label}) search {}: amortized {} > bound {}",
                        t.seed, a.time, a.amortized, a.bound
                    )
                });
            }
            out.check(trace.is_exact(), || format!("seed {} ({label}): amortized sum is not exact", t.seed));
        }
        let total = greedyass::run(&t.seq).ledger.total();
        let bound = t.seq.m() as u64 * (5 + 6 * floor_log2_int(t.seq.n() as u64) as u64);
        worst_balance = worst_balance.max(total as f64 / bound as f64);
        out.check(total <= bound, || format!("seed {}: total {total} > balance bound {bound}", t.seed));
    }
    out.notes.push(format!("least bound - amortized: {tightest}"));
    out.notes.push(format!("max total / balance bound: {worst_balance:.4}"));
    out
}

fn lemmas(cfg: &SuiteConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new(Suite::Lemmas);
    let (mut sides, mut tight) = (0u64, 0u64);
    for t in corpus(cfg) {
        let unit = WeightAssignment::uniform(t.seq.n());
        for (label, w) in [("unit", &unit), ("random", &t.weights)] {
            let trace = audit_run(&t.seq, w);
            let failure = first_lemma_failure(&trace);
            out.check(failure.is_none(), || {
                let (time, name) = failure.expect("failed");
                format!("seed {} ({label}) search {time}: {name}", t.seed)
            });
            for i in 1..=trace.m() as u32 {
                for right in [true, false] {
                    if let Some(side) = telescope_side(&trace, Time::new(i), right) {
                        sides += 1;
                        tight += side.is_tight() as u64;
                    }
                }
            }
        }
        if t.seed < 10 {
            for c in -2..=2 {
                out.check(check_scale_covariance(&t.seq, &t.weights, c), || {
                    format!("seed {}: scaling by 2^{c} is not rank covariant", t.seed)
                });
            }
        }
    }
    out.notes.push(format!("telescope sides meeting the closed form exactly: {tight} of {sides}"));

    // neighborhood semantics on small prefixes
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e65_6967);
    for k in 0..cfg.seeds.unwrap_or(100) {
        let seq = random_sequence(&mut rng, 8, 8);
        let mut table = LastAccessTable::new(seq.n());
        out.check(check_neighborhood_semantics(&table), || format!("semantics trace {k}: time 0"));
        for &s in seq.searches() {
            step(&mut table, s).expect("in range");
            out.check(check_neighborhood_semantics(&table), || format!("semantics trace {k}: time {}", table.now()));
        }
    }
    out
}

fn satisfaction(cfg: &SuiteConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new(Suite::Satisfaction);
    let seeds = cfg.seeds.unwrap_or(200);
    let (max_n, max_m) = (cfg.n.unwrap_or(16), cfg.m.unwrap_or(32));
    let mut rng = ChaCha8Rng::seed_from_u64(0x7361_7469);
    for k in 0..seeds {
        let seq = random_sequence(&mut rng, max_n, max_m);
        let run = greedyass::run(&seq);
        let mut cumulative = PointSet::new(seq.n(), seq.m());
        for row in &run.rows {
            for x in row.accessed() {
                cumulative.insert(Point { x, y: row.time }).expect("in grid");
            }
            out.check(is_satisfied_set_indexed(&cumulative), || {
                format!("trace {k}: greedy rows 1..={} unsatisfied", row.time)
            });
        }
        out.check(is_satisfied_set(&run.points), || format!("trace {k}: greedy output fails the reference check"));

        let shapes = [greedy_initial_tree(seq.n(), &seq), BSTree::random(seq.n(), &mut rng)];
        for (label, t0) in ["greedy-t0", "random-t0"].iter().zip(&shapes) {
            for algo in ["greedyfuture", "splay"] {
                let run = if algo == "greedyfuture" { run_greedy_future(t0, &seq) } else { run_splay(t0, &seq) };
                let ok = run.and_then(|(e, ledger)| {
                    let checked = validate_execution(&e, &seq)?;
                    Ok(checked == ledger && is_satisfied_set(&geometric_view_of_execution(&e)?))
                });
                out.check(matches!(ok, Ok(true)), || format!("trace {k}: {algo} from {label}: {ok:?}"));
            }
        }

        let set = random_point_set(&mut rng);
        out.check(is_satisfied_set(&set) == is_satisfied_set_indexed(&set), || {
            format!("point set {k}: checkers disagree")
        });
    }
    out
}

/// A random subset of a small grid; half the time it is closed under a few
/// greedy rows so that satisfied sets are common too.
pub fn random_point_set(rng: &mut ChaCha8Rng) -> PointSet {
    let n = rng.gen_range(1..=8);
    let m = rng.gen_range(1..=8);
    if rng.gen_bool(0.5) {
        let keys: Vec<u32> = (0..m).map(|_| rng.gen_range(1..=n as u32)).collect();
        let mut set = greedyass::run(&AccessSequence::from_keys(n, &keys).expect("in range")).points;
        if rng.gen_bool(0.5) {
            let p = Point::new(rng.gen_range(1..=n as u32), rng.gen_range(1..=m as u32));
            set.insert(p).expect("in grid");
        }
        return set;
    }
    let density = rng.gen_range(0.05..0.6);
    let points = (1..=m as u32)
        .flat_map(|y| (1..=n as u32).map(move |x| Point::new(x, y)))
        .filter(|_| rng.gen_bool(density))
        .collect::<Vec<_>>();
    PointSet::from_points(n, m, points).expect("in grid")
}

/// Greedy's row output against the brute-force minimum for every prefix.
pub fn row_minimality_holds(seq: &AccessSequence) -> std::result::Result<(), String> {
    let mut table = LastAccessTable::new(seq.n());
    let mut history = PointSet::new(seq.n(), seq.m());
    for &s in seq.searches() {
        let row = step(&mut table, s).map_err(|e| e.to_string())?;
        let best = min_row_extension(&history, s, row.time).map_err(|e| format!("search {}: {e}", row.time))?;
        if !best.iter().copied().eq(row.added.iter().copied()) {
            return Err(format!("search {}: greedy added {:?}, minimum is {:?}", row.time, row.added, best));
        }
        for x in row.accessed() {
            history.insert(Point { x, y: row.time }).expect("in grid");
        }
    }
    Ok(())
}

fn row_minimality(cfg: &SuiteConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new(Suite::RowMinimality);
    let limit = cfg.n.unwrap_or(4);
    // full-length sequences cover every shorter prefix
    for n in 1..=limit {
        for seq in all_sequences(n, limit) {
            let r = row_minimality_holds(&seq);
            out.check(r.is_ok(), || format!("{:?}: {}", seq.searches(), r.clone().unwrap_err()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x726f_7773);
    let size = limit + 1;
    for _ in 0..cfg.seeds.unwrap_or(500) {
        let keys: Vec<u32> = (0..size).map(|_| rng.gen_range(1..=size as u32)).collect();
        let seq = AccessSequence::from_keys(size, &keys).expect("in range");
        let r = row_minimality_holds(&seq);
        out.check(r.is_ok(), || format!("{keys:?}: {}", r.clone().unwrap_err()));
    }
    out
}

/// Searches (1-based) where the tree algorithm from the greedy initial tree
/// touches a different set than the geometric algorithm.
pub fn equivalence_mismatches(seq: &AccessSequence) -> Result<Vec<usize>> {
    let t0 = greedy_initial_tree(seq.n(), seq);
    let (execution, _) = run_greedy_future(&t0, seq)?;
    let rows = greedyass::run(seq).rows;
    Ok(execution
        .steps()
        .iter()
        .zip(&rows)
        .enumerate()
        .filter(|(_, (step, row))| step.tau() != row.accessed().as_slice())
        .map(|(i, _)| i + 1)
        .collect())
}

fn equivalence(cfg: &SuiteConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new(Suite::Equivalence);
    let mut first_only = 0u64;
    let mut record = |out: &mut SuiteOutcome, seq: &AccessSequence| match equivalence_mismatches(seq) {
        Ok(v) if v.is_empty() => out.check(true, String::new),
        Ok(v) if v == [1] => {
            first_only += 1;
            out.check(true, String::new)
        }
        Ok(v) => out.check(false, || format!("{:?}: accessed sets differ at searches {v:?}", seq.searches())),
        Err(e) => out.check(false, || format!("{:?}: {e}", seq.searches())),
    };
    for n in 1..=4 {
        for m in 0..=4 {
            for seq in all_sequences(n, m) {
                record(&mut out, &seq);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6571_7569);
    for _ in 0..cfg.seeds.unwrap_or(200) {
        let seq = random_sequence(&mut rng, cfg.n.unwrap_or(16), cfg.m.unwrap_or(64));
        record(&mut out, &seq);
    }
    out.notes.push(format!("mismatches confined to the first search: {first_only}"));
    out
}

/// The random shapes used for sequential checks at size `n`.
pub fn sequential_shapes(n: usize, seeds: u64) -> Vec<(String, BSTree)> {
    let mut shapes = vec![
        ("chain-left".to_string(), BSTree::chain_left(n)),
        ("chain-right".to_string(), BSTree::chain_right(n)),
        ("balanced".to_string(), BSTree::balanced(n)),
    ];
    for s in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(s ^ ((n as u64) << 32));
        shapes.push((format!("random:{s}"), BSTree::random(n, &mut rng)));
    }
    shapes
}

fn sequential(cfg: &SuiteConfig) -> SuiteOutcome {
    let mut out = SuiteOutcome::new(Suite::Sequential);
    let mut worst = 0f64;
    for n in 1..=cfg.n.unwrap_or(1024) {
        for (label, t0) in sequential_shapes(n, cfg.seeds.unwrap_or(50)) {
            let r = check_sequential(&t0);
            let ok = matches!(&r, Ok(r) if r.holds());
            if let Ok(r) = &r {
                worst = worst.max(r.total as f64 / r.bound as f64);
            }
            out.check(ok, || format!("n = {n} from {label}: {r:?}"));
        }
    }
    out.notes.push(format!("max total / (4n - 2): {worst:.4}"));
    out
}
