//! Acceptance battery. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use greedylab::analysis::{
    audit_run, check_no_access_lemma, check_rank_inequalities, check_sequential, check_stubborn_bound, check_telescope,
    corollary_bounds, floor_log2_int, telescope_side, AuditTrace, CorollaryParams,
};
use greedylab::arboral::{greedy_initial_tree, run_greedy_future, run_splay, validate_execution, BSTree};
use greedylab::geometry::{geometric_view_of_execution, is_satisfied_set, is_satisfied_set_indexed};
use greedylab::greedyass::{self, step, LastAccessTable};
use greedylab::oracle::{all_sequences, exhaustive_probe, min_row_extension};
use greedylab::workbench::{
    gen_bit_reversal, gen_random, lemma_corpus, random_point_set, sequential_shapes, Distribution,
};
use greedylab::{AccessSequence, Point, PointSet, Time, WeightAssignment};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// Criterion 2/3/4 corpus: 100 seeds, n <= 64, m <= 256.
fn corpus() -> Vec<(u64, AccessSequence, WeightAssignment)> {
    lemma_corpus(100, 64, 256).into_iter().map(|t| (t.seed, t.seq, t.weights)).collect()
}

/// Potential recomputed element by element from the wall scan, independent
/// of the stack pass used by the audit.
fn potential_by_walls(trace: &AuditTrace<'_>, t: Time, n: usize) -> i64 {
    let snap = trace.snapshot(t);
    (1..=n as u32).map(|x| snap.rank(greedylab::Element::new(x)).expect("in range")).sum()
}

fn sequential_theorem() -> Verdict {
    let mut runs = 0u64;
    let mut worst = (0f64, 0usize, String::new());
    let mut bad = Vec::new();
    for n in 1..=1024usize {
        for (label, t0) in sequential_shapes(n, 50) {
            runs += 1;
            match check_sequential(&t0) {
                Ok(r) => {
                    let ratio = r.total as f64 / r.bound as f64;
                    if ratio > worst.0 {
                        worst = (ratio, n, label.clone());
                    }
                    if !r.holds() {
                        bad.push(format!(
                            "n={n} {label}: total {} bound {} spine {:?} deep {:?}",
                            r.total,
                            r.bound,
                            r.spine_violations.len(),
                            r.deep_access_violations.len()
                        ));
                    }
                }
                Err(e) => bad.push(format!("n={n} {label}: {e}")),
            }
            // the fast cost path against a fully validated execution
            if n <= 48 {
                let seq = AccessSequence::from_keys(n, &(1..=n as u32).collect::<Vec<_>>()).unwrap();
                let (exec, ledger) = run_greedy_future(&t0, &seq).unwrap();
                let checked = validate_execution(&exec, &seq);
                let fast = check_sequential(&t0).map(|r| r.total);
                if checked.as_ref().map(|l| l.total()).ok() != fast.ok() || checked.ok() != Some(ledger) {
                    bad.push(format!("n={n} {label}: validated cost disagrees"));
                }
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "{runs} runs over n = 1..1024 x 53 initial trees; max total/(4n-2) = {:.4} (n={}, {}); {} violations{}",
            worst.0,
            worst.1,
            worst.2,
            bad.len(),
            bad.first().map(|b| format!("; first: {b}")).unwrap_or_default()
        ),
    )
}

fn access_lemma(corpus: &[(u64, AccessSequence, WeightAssignment)]) -> Verdict {
    let (mut audits, mut over, mut inexact, mut tightest) = (0u64, 0u64, 0u64, i64::MAX);
    for (_, seq, w) in corpus {
        let unit = WeightAssignment::uniform(seq.n());
        for weights in [&unit, w] {
            let trace = audit_run(seq, weights);
            for a in trace.audits() {
                audits += 1;
                tightest = tightest.min(a.bound - a.amortized);
                // bound from first principles
                let lg_w = greedylab::analysis::floor_log2(weights.total()).unwrap();
                let r_s = trace.rank(a.searched, Time::new(a.time.get() - 1));
                if a.amortized > 5 + 6 * lg_w - 6 * r_s {
                    over += 1;
                }
            }
            let m = Time::new(seq.m() as u32);
            let actual = greedyass::run(seq).ledger.total() as i64;
            let amortized: i64 = trace.audits().iter().map(|a| a.amortized).sum();
            let phi_m = potential_by_walls(&trace, m, seq.n());
            let phi_0 = potential_by_walls(&trace, Time::NEVER, seq.n());
            if amortized != actual + phi_m - phi_0 {
                inexact += 1;
            }
        }
    }
    verdict(
        over == 0 && inexact == 0,
        format!("{audits} audits (unit + random weights): {over} above bound, {inexact} inexact runs; least slack {tightest}"),
    )
}

fn lemma_suite(corpus: &[(u64, AccessSequence, WeightAssignment)]) -> Verdict {
    let (mut searches, mut no_access, mut ranks, mut stubborn, mut bounded) = (0u64, 0u64, 0u64, 0u64, 0u64);
    let (mut sides, mut unequal) = (0u64, 0u64);
    let mut first_unequal = None;
    for (seed, seq, w) in corpus {
        let unit = WeightAssignment::uniform(seq.n());
        for (label, weights) in [("unit", &unit), ("random", w)] {
            let trace = audit_run(seq, weights);
            for i in 1..=seq.m() as u32 {
                let t = Time::new(i);
                searches += 1;
                no_access += !check_no_access_lemma(&trace, t) as u64;
                ranks += !check_rank_inequalities(&trace, t) as u64;
                stubborn += !check_stubborn_bound(trace.audit(t)) as u64;
                bounded += !check_telescope(&trace, t) as u64;
                for right in [true, false] {
                    if let Some(side) = telescope_side(&trace, t, right) {
                        sides += 1;
                        if side.sum != side.closed_form {
                            unequal += 1;
                            first_unequal.get_or_insert(format!(
                                "seed {seed} ({label}) search {i} {} side: sum {} vs closed form {}",
                                if right { "right" } else { "left" },
                                side.sum,
                                side.closed_form
                            ));
                        }
                    }
                }
            }
        }
    }
    let pass = no_access == 0 && ranks == 0 && stubborn == 0 && unequal == 0;
    verdict(
        pass,
        format!(
            "{searches} searches: no-access {no_access}, rank-inequalities {ranks}, stubborn-bound {stubborn} failures; \
             telescope equality fails on {unequal} of {sides} sides{} (as an upper bound with exact slack it fails on {bounded})",
            first_unequal.map(|f| format!(", first {f}")).unwrap_or_default()
        ),
    )
}

fn balance_bound(corpus: &[(u64, AccessSequence, WeightAssignment)]) -> Verdict {
    let (mut bad, mut worst) = (Vec::new(), 0f64);
    for (seed, seq, _) in corpus {
        let unit = WeightAssignment::uniform(seq.n());
        let trace = audit_run(seq, &unit);
        let total = greedyass::run(seq).ledger.total();
        let bound = seq.m() as u64 * (5 + 6 * floor_log2_int(seq.n() as u64) as u64);
        let report = corollary_bounds(seq, &greedyass::run(seq).ledger, &CorollaryParams::default());
        let phi_0 = trace.potential(Time::NEVER);
        let phi_m = trace.potential(Time::new(seq.m() as u32));
        worst = worst.max(total as f64 / bound as f64);
        if total > bound || phi_0 != 0 || phi_m < 0 || report.balance_bound as u64 != bound || !report.balance_holds {
            bad.push(format!("seed {seed}: total {total}, bound {bound}, phi(0) {phi_0}, phi(m) {phi_m}"));
        }
    }
    verdict(bad.is_empty(), format!("{} traces; max total/bound {worst:.4}; {} violations", corpus.len(), bad.len()))
}

fn row_matches(seq: &AccessSequence) -> Result<(), String> {
    let mut table = LastAccessTable::new(seq.n());
    let mut history = PointSet::new(seq.n(), seq.m());
    for &s in seq.searches() {
        let row = step(&mut table, s).map_err(|e| e.to_string())?;
        let best = min_row_extension(&history, s, row.time).map_err(|e| e.to_string())?;
        if !best.iter().copied().eq(row.added.iter().copied()) {
            return Err(format!("search {}: greedy {:?} vs minimum {:?}", row.time, row.added, best));
        }
        for x in row.accessed() {
            history.insert(Point { x, y: row.time }).unwrap();
        }
    }
    Ok(())
}

fn row_minimality() -> Verdict {
    let (mut count, mut bad) = (0u64, Vec::new());
    for n in 1..=4 {
        for m in 1..=4 {
            for seq in all_sequences(n, m) {
                count += 1;
                if let Err(e) = row_matches(&seq) {
                    bad.push(format!("{:?}: {e}", seq.searches()));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let keys: Vec<u32> = (0..5).map(|_| rng.gen_range(1..=5)).collect();
        let seq = AccessSequence::from_keys(5, &keys).unwrap();
        count += 1;
        if let Err(e) = row_matches(&seq) {
            bad.push(format!("{keys:?}: {e}"));
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "{count} sequences (exhaustive n,m <= 4; 500 at n=m=5), every prefix unique and equal; {} mismatches",
            bad.len()
        ),
    )
}

fn satisfaction() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut sets, mut bad) = (0u64, Vec::new());
    for k in 0..200 {
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(1..=16);
        let keys: Vec<u32> = (0..m).map(|_| rng.gen_range(1..=n as u32)).collect();
        let seq = AccessSequence::from_keys(n, &keys).unwrap();
        let run = greedyass::run(&seq);
        let mut cumulative = PointSet::new(n, m);
        for row in &run.rows {
            for x in row.accessed() {
                cumulative.insert(Point { x, y: row.time }).unwrap();
            }
            sets += 1;
            if !is_satisfied_set(&cumulative) {
                bad.push(format!("trace {k}: greedy rows 1..={}", row.time));
            }
        }
        for t0 in [greedy_initial_tree(n, &seq), BSTree::random(n, &mut rng), BSTree::chain_left(n)] {
            for (name, res) in [("greedyfuture", run_greedy_future(&t0, &seq)), ("splay", run_splay(&t0, &seq))] {
                sets += 1;
                let ok = res.is_ok_and(|(e, ledger)| {
                    validate_execution(&e, &seq).is_ok_and(|l| l == ledger)
                        && geometric_view_of_execution(&e).is_ok_and(|p| is_satisfied_set(&p))
                });
                if !ok {
                    bad.push(format!("trace {k}: {name} execution"));
                }
            }
        }
    }
    let mut disagree = 0;
    let mut fuzz = ChaCha8Rng::seed_from_u64(66);
    let mut satisfied = 0;
    for _ in 0..1000 {
        let set = random_point_set(&mut fuzz);
        let reference = is_satisfied_set(&set);
        satisfied += reference as u32;
        disagree += (reference != is_satisfied_set_indexed(&set)) as u32;
    }
    verdict(
        bad.is_empty() && disagree == 0,
        format!(
            "{sets} outputs checked, {} unsatisfied; checkers disagree on {disagree} of 1000 fuzzed sets ({satisfied} satisfied)",
            bad.len()
        ),
    )
}

fn mismatches(seq: &AccessSequence) -> Vec<usize> {
    let (exec, _) = run_greedy_future(&greedy_initial_tree(seq.n(), seq), seq).unwrap();
    let rows = greedyass::run(seq).rows;
    (0..seq.m()).filter(|&i| exec.steps()[i].tau() != rows[i].accessed().as_slice()).map(|i| i + 1).collect()
}

fn equivalence() -> Verdict {
    let (mut count, mut first_only, mut bad) = (0u64, 0u64, Vec::new());
    let mut judge = |seq: &AccessSequence| {
        count += 1;
        let v = mismatches(seq);
        if v == [1] {
            first_only += 1;
        } else if !v.is_empty() {
            bad.push(format!("{:?} at {v:?}", seq.searches()));
        }
    };
    for n in 1..=4 {
        for m in 1..=4 {
            all_sequences(n, m).for_each(|s| judge(&s));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let n = rng.gen_range(1..=16);
        let m = rng.gen_range(1..=64);
        let keys: Vec<u32> = (0..m).map(|_| rng.gen_range(1..=n as u32)).collect();
        judge(&AccessSequence::from_keys(n, &keys).unwrap());
    }
    verdict(
        bad.is_empty(),
        format!("{count} instances; {first_only} mismatches confined to search 1; {} elsewhere", bad.len()),
    )
}

fn opt_plus_m() -> Verdict {
    let mut rows = Vec::new();
    for (n, m) in [(3, 3), (3, 4), (4, 3), (4, 4)] {
        match exhaustive_probe(n, m) {
            Ok(r) => rows.extend(r),
            Err(e) => return verdict(false, format!("n={n} m={m}: {e}")),
        }
    }
    let violations = rows.iter().filter(|r| !r.holds).count();
    let max_slack = rows.iter().map(|r| r.slack).max().unwrap_or(0);
    let zero = rows.iter().filter(|r| r.slack == 0).count();
    verdict(
        violations == 0,
        format!(
            "{} instances (n=3..4, m=3..4): {violations} violations; max slack {max_slack}; greedy optimal on {zero}",
            rows.len()
        ),
    )
}

fn bit_reversal() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 2..=6u32 {
        let (seq, t0) = gen_bit_reversal(k, 8).unwrap();
        let n = seq.n();
        let (_, ledger) = run_greedy_future(&t0, &seq).unwrap();
        let round = 1usize << k;
        let steady = &ledger.per_search()[round..];
        let avg = steady.iter().map(|c| c.accessed).sum::<u64>() as f64 / steady.len() as f64;
        let (lo, hi) = ((n.div_ceil(2) as f64).log2(), ((n + 1) as f64).log2() + 1.0);
        let ok = lo <= avg && avg <= hi;
        pass &= ok;
        parts.push(format!("k={k} n={n}: {avg:.3} in [{lo:.1}, {hi:.1}]{}", if ok { "" } else { " OUT" }));
    }
    verdict(pass, parts.join("; "))
}

fn working_set() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for width in [2usize, 8, 32] {
        let ratio = |m: usize| {
            let seq = gen_random(256, m, Distribution::WorkingSetWindow(width), 0).unwrap();
            let ledger = greedyass::run(&seq).ledger;
            corollary_bounds(&seq, &ledger, &CorollaryParams::default()).working_set_ratio
        };
        let (small, large) = (ratio(1_000), ratio(10_000));
        let growth = large / small;
        let ok = growth <= 1.10;
        pass &= ok;
        parts.push(format!(
            "width {width}: {small:.4} (m=1e3) -> {large:.4} (m=1e4), growth {growth:.4}{}",
            if ok { "" } else { " > 1.10" }
        ));
    }
    verdict(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let corpus = corpus();
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("sequential access", Box::new(sequential_theorem)),
        ("access lemma", Box::new(|| access_lemma(&corpus))),
        ("lemma suite", Box::new(|| lemma_suite(&corpus))),
        ("balance bound", Box::new(|| balance_bound(&corpus))),
        ("row minimality and uniqueness", Box::new(row_minimality)),
        ("satisfaction", Box::new(satisfaction)),
        ("cross-model equivalence", Box::new(equivalence)),
        ("OPT + m probe", Box::new(opt_plus_m)),
        ("bit-reversal profile", Box::new(bit_reversal)),
        ("working-set ratio", Box::new(working_set)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        failed += !v.pass as u32;
        println!(
            "criterion {:>2} {:<30} {}  [{:.1}s] {}",
            k + 1,
            name,
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() as u32 - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
