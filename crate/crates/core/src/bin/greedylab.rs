use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use greedylab::oracle::{conjecture_probe, exhaustive_probe, ConjectureReport, PROBE_LIMIT};
use greedylab::workbench::{
    bit_reversal_round, gen_random, gen_sequential, load_weights, run_algorithm, run_suite, summarize, summary_csv,
    Algo, Distribution, GeneratorInfo, InitialTree, Pattern, RunReport, Suite, SuiteConfig, TraceFile,
};
use greedylab::{AccessSequence, Error};

/// Greedy BST lab: generate traces, run algorithms, verify the potential
/// argument, and compare against brute-force optima.
#[derive(Parser)]
#[command(name = "greedylab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a search trace.
    Gen(GenArgs),
    /// Run an algorithm on a trace and write per-search costs as CSV.
    Run(RunArgs),
    /// Run a verification suite; exit 1 if any check fails.
    Verify(VerifyArgs),
    /// Compare greedy against the brute-force optimum on tiny instances.
    Oracle(OracleArgs),
    /// Merge run reports into one row of bounds and ratios per input.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    pattern: Pattern,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    width: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    algo: Algo,
    #[arg(long)]
    trace: PathBuf,
    /// greedy, balanced, chain or random:SEED.
    #[arg(long, default_value = "greedy")]
    t0: InitialTree,
    /// uniform or file:PATH; used by --audit.
    #[arg(long)]
    weights: Option<String>,
    /// Add potential-audit columns (greedyass only).
    #[arg(long)]
    audit: bool,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: Suite,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seeds: Option<u64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, required_unless_present = "exhaustive_all", conflicts_with = "exhaustive_all")]
    trace: Option<PathBuf>,
    /// Probe every sequence of length M over 1..=N.
    #[arg(long, requires_all = ["n", "m"])]
    exhaustive_all: bool,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// CSV table of every probe; stdout when absent.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

enum Failure {
    Input(Error),
    Check(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.kind().to_string();
            let detail = e.render().to_string();
            emit_error(json!({ "error": "usage", "message": message, "detail": detail.trim() }));
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Verify(a) => verify(a),
        Command::Oracle(a) => oracle(a),
        Command::Report(a) => report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            emit_error(json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(2)
        }
        Err(Failure::Check(v)) => {
            emit_error(v);
            ExitCode::from(1)
        }
    }
}

fn emit_error(v: Value) {
    eprintln!("{v}");
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(Error::from),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Input(Error::InvalidParameter(msg.into()))
}

fn gen(a: GenArgs) -> Outcome {
    let mut params = BTreeMap::new();
    let mut seed = None;
    let seq = match a.pattern {
        Pattern::Sequential => {
            if a.m.is_some_and(|m| m != a.n) {
                return Err(usage("sequential traces have m = n"));
            }
            gen_sequential(a.n)?
        }
        Pattern::Bitreversal => {
            let k = (a.n + 1).trailing_zeros();
            if a.n < 3 || (a.n + 1) != 1 << k {
                return Err(usage(format!("bitreversal needs n = 2^(k+1) - 1 with k >= 1, got {}", a.n)));
            }
            let round = bit_reversal_round(k - 1)?;
            let m = a.m.unwrap_or(round.len());
            params.insert("k".into(), json!(k - 1));
            params.insert("t0".into(), json!("balanced"));
            AccessSequence::new(a.n, round.iter().copied().cycle().take(m).collect())?
        }
        Pattern::Uniform | Pattern::Zipf | Pattern::Wswindow => {
            let m = a.m.ok_or_else(|| usage(format!("{} traces need --m", a.pattern)))?;
            let dist = match a.pattern {
                Pattern::Uniform => Distribution::Uniform,
                Pattern::Zipf => {
                    let theta = a.theta.ok_or_else(|| usage("zipf traces need --theta"))?;
                    params.insert("theta".into(), json!(theta));
                    Distribution::Zipf(theta)
                }
                _ => {
                    let width = a.width.ok_or_else(|| usage("wswindow traces need --width"))?;
                    params.insert("width".into(), json!(width));
                    Distribution::WorkingSetWindow(width)
                }
            };
            seed = Some(a.seed);
            gen_random(a.n, m, dist, a.seed)?
        }
        Pattern::Manual => return Err(usage("`manual` is not a generator")),
    };
    let trace = TraceFile::new(&seq, GeneratorInfo { pattern: a.pattern, params }, seed);
    write_out(a.output.as_deref(), &trace.to_json())?;
    Ok(())
}

fn run(a: RunArgs) -> Outcome {
    if a.audit && a.algo != Algo::Greedyass {
        return Err(usage(format!("--audit needs --algo greedyass, not {}", a.algo)));
    }
    if a.weights.is_some() && !a.audit {
        return Err(usage("--weights only applies with --audit"));
    }
    if a.algo == Algo::Greedyass && a.t0 != InitialTree::Greedy {
        return Err(usage("--t0 only applies to tree algorithms"));
    }
    let seq = TraceFile::load(&a.trace)?.sequence()?;
    let weights = if a.audit { Some(load_weights(a.weights.as_deref().unwrap_or("uniform"), seq.n())?) } else { None };
    let report = run_algorithm(&seq, a.algo, a.t0, weights.as_ref())?;
    match &a.output {
        Some(p) => report.save(p)?,
        None => write_out(None, &report.to_csv())?,
    }
    let summary = json!({
        "algo": report.algo().to_string(),
        "n": seq.n(),
        "m": seq.m(),
        "total": report.total(),
        "audited": report.audits().is_some(),
        "bound_violations": report.bound_violations(),
    });
    if a.output.is_some() {
        println!("{summary}");
    }
    if report.bound_violations() > 0 {
        return Err(Failure::Check(json!({ "error": "check_failed", "check": "access-lemma", "summary": summary })));
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Outcome {
    let cfg = SuiteConfig { n: a.n, m: a.m, seeds: a.seeds };
    let outcomes = run_suite(a.suite, &cfg);
    let mut failed = Vec::new();
    for o in &outcomes {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        let notes = if o.notes.is_empty() { String::new() } else { format!("; {}", o.notes.join("; ")) };
        println!("{}: {status} ({} checks, {} failed{notes})", o.suite, o.checks, o.failures.len());
        if !o.passed() {
            failed.push(json!({ "suite": o.suite, "failures": o.failures.iter().take(5).collect::<Vec<_>>() }));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(json!({ "error": "check_failed", "suites": failed })))
    }
}

fn probe_csv(rows: &[ConjectureReport]) -> String {
    let mut out = String::from("searches,n,m,greedy,opt,slack,holds\n");
    for r in rows {
        let keys: Vec<String> = r.searches.iter().map(u32::to_string).collect();
        out.push_str(&format!("{},{},{},{},{},{},{}\n", keys.join(" "), r.n, r.m, r.greedy, r.opt, r.slack, r.holds));
    }
    out
}

fn oracle(a: OracleArgs) -> Outcome {
    let rows = if a.exhaustive_all {
        let (n, m) = (a.n.expect("required"), a.m.expect("required"));
        if n == 0 || n > PROBE_LIMIT || m > PROBE_LIMIT {
            return Err(Failure::Input(Error::TooLarge(format!(
                "n = {n}, m = {m} (n in 1..={PROBE_LIMIT}, m <= {PROBE_LIMIT})"
            ))));
        }
        exhaustive_probe(n, m)?
    } else {
        let path = a.trace.as_ref().expect("required");
        vec![conjecture_probe(&TraceFile::load(path)?.sequence()?)?]
    };
    let csv = probe_csv(&rows);
    let summary = json!({
        "instances": rows.len(),
        "max_slack": rows.iter().map(|r| r.slack).max().unwrap_or(0),
        "violations": rows.iter().filter(|r| !r.holds).count(),
    });
    match &a.output {
        Some(p) => {
            write_out(Some(p), &csv)?;
            println!("{summary}");
        }
        None => write_out(None, &csv)?,
    }
    if rows.iter().any(|r| !r.holds) {
        return Err(Failure::Check(json!({ "error": "check_failed", "check": "opt-plus-m", "summary": summary })));
    }
    Ok(())
}

fn report(a: ReportArgs) -> Outcome {
    let mut rows = Vec::with_capacity(a.inputs.len());
    for p in &a.inputs {
        rows.push(summarize(&p.display().to_string(), &RunReport::load(p)?));
    }
    write_out(a.output.as_deref(), &summary_csv(&rows))?;
    Ok(())
}
