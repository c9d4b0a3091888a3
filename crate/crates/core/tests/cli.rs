use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn greedylab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greedylab")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_line(o: &Output) -> Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(text.lines().last().expect("an error line")).expect("machine-readable error")
}

#[test]
fn sequential_on_a_chain_costs_six() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(greedylab(&["gen", "--pattern", "sequential", "--n", "3", "-o", "s.json"], d).status.success());
    let o = greedylab(&["run", "--algo", "greedyfuture", "--trace", "s.json", "--t0", "chain", "-o", "r.csv"], d);
    assert!(o.status.success());
    let summary: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(summary["total"], 6);
    let csv = std::fs::read_to_string(d.join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn audited_run_meets_every_bound() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("t.json"), r#"{"n":3,"m":3,"searches":[1,3,2],"generator":{"pattern":"manual"}}"#).unwrap();
    let o = greedylab(&["run", "--algo", "greedyass", "--trace", "t.json", "--audit"], d);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "algo,n,i,s_i,cost,phi_before,phi_after,amortized,bound,stubborn_left,stubborn_right");
    let totals: u64 = rows[1..].iter().map(|r| r.split(',').nth(4).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(totals, 6);
    for r in &rows[1..] {
        let c: Vec<i64> = r.split(',').skip(5).map(|v| v.parse().unwrap()).collect();
        assert!(c[2] <= c[3]);
    }
}

#[test]
fn weights_file_feeds_the_audit() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("t.json"), r#"{"n":3,"m":3,"searches":[1,3,2],"generator":{"pattern":"manual"}}"#).unwrap();
    std::fs::write(d.join("w.txt"), "1 4/1\n2 1/2\n3 1/1\n").unwrap();
    let o = greedylab(
        &["run", "--algo", "greedyass", "--trace", "t.json", "--audit", "--weights", "file:w.txt", "-o", "a.csv"],
        d,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = greedylab(&["run", "--algo", "greedyass", "--trace", "t.json", "--weights", "file:w.txt"], d);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("t.json"), r#"{"n":3,"m":1,"searches":[2],"generator":{"pattern":"manual"}}"#).unwrap();
    for args in [
        vec!["run", "--algo", "splay", "--trace", "t.json", "--audit"],
        vec!["run", "--algo", "greedyass", "--trace", "missing.json"],
        vec!["run", "--algo", "greedyfuture", "--trace", "t.json", "--t0", "bushy"],
        vec!["gen", "--pattern", "zipf", "--n", "4", "--m", "4"],
        vec!["gen", "--pattern", "bitreversal", "--n", "6"],
        vec!["oracle", "--exhaustive-all", "--n", "5", "--m", "5"],
        vec!["frobnicate"],
    ] {
        let o = greedylab(&args, d);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(error_line(&o)["error"].is_string(), "{args:?}");
    }
}

#[test]
fn generated_traces_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = greedylab(&["gen", "--pattern", "wswindow", "--n", "64", "--m", "100", "--width", "4", "--seed", "3"], d);
    let b = greedylab(&["gen", "--pattern", "wswindow", "--n", "64", "--m", "100", "--width", "4", "--seed", "3"], d);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let o = greedylab(&["gen", "--pattern", "bitreversal", "--n", "7", "--m", "4"], d);
    let t: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(t["searches"], serde_json::json!([1, 5, 3, 7]));
}

#[test]
fn verify_sequential_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = greedylab(&["verify", "--suite", "sequential", "--n", "128", "--seeds", "5"], dir.path());
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("sequential: PASS"), "{out}");
    let ratio: f64 = out.trim().trim_end_matches(')').rsplit(' ').next().unwrap().parse().unwrap();
    assert!(ratio <= 1.0);
}

#[test]
fn oracle_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("t.json"), r#"{"n":3,"m":3,"searches":[1,3,2],"generator":{"pattern":"manual"}}"#).unwrap();
    let o = greedylab(&["oracle", "--trace", "t.json"], d);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().nth(1), Some("1 3 2,3,3,6,5,1,true"));

    let o = greedylab(&["oracle", "--exhaustive-all", "--n", "3", "--m", "3", "-o", "probe.csv"], d);
    assert!(o.status.success());
    let summary: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(summary["instances"], 27);
    assert_eq!(summary["violations"], 0);

    assert!(greedylab(&["run", "--algo", "greedyass", "--trace", "t.json", "--audit", "-o", "a.csv"], d)
        .status
        .success());
    assert!(greedylab(&["run", "--algo", "splay", "--trace", "t.json", "--t0", "random:4", "-o", "b.csv"], d)
        .status
        .success());
    let o = greedylab(&["report", "--inputs", "a.csv", "b.csv", "-o", "summary.csv"], d);
    assert!(o.status.success());
    let summary = std::fs::read_to_string(d.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("a.csv,greedyass,3,3,6,33,"));

    std::fs::write(d.join("bad.csv"), "nope\n").unwrap();
    assert_eq!(greedylab(&["report", "--inputs", "bad.csv"], d).status.code(), Some(2));
}
