use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn dynmis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynmis"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

/// Event lines of a stream file.
fn events(p: &Path) -> usize {
    fs::read_to_string(p).unwrap().lines().skip(1).count()
}

#[test]
fn gen_bipartite_adversary_event_count() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "adv.txt");
    let o = dynmis(&["gen", "bipartite-adv", "s=3", "rounds=2", "-o", &out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(events(Path::new(&out)), 9 + 4 * 2);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "17 events");
}

#[test]
fn gen_zero_steps_is_header_only() {
    let o = dynmis(&["gen", "random", "n=2", "steps=0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout), "n 2\n");
}

#[test]
fn gen_usage_errors() {
    for args in [
        &["gen", "arboricity", "n=5", "lambda=0", "steps=3"][..],
        &["gen", "random", "n=5"],
        &["gen", "random", "n=5", "steps=3", "p=1.5"],
        &["gen", "bipartite-adv", "s=1", "rounds=1"],
        &["gen", "lattice", "n=5"],
        &["frobnicate"],
    ] {
        let o = dynmis(args);
        assert_eq!(code(&o), 1, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = path(&dir, "good.txt");
    assert_eq!(code(&dynmis(&["gen", "random", "n=10", "steps=200", "seed=4", "-o", &good])), 0);
    assert_eq!(code(&dynmis(&["verify", &good])), 0);

    let dup = path(&dir, "dup.txt");
    fs::write(&dup, "n 4\n+ 0 1\n+ 2 3\n+ 1 0\n").unwrap();
    let o = dynmis(&["verify", &dup]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));

    let empty = path(&dir, "empty.txt");
    fs::write(&empty, "").unwrap();
    assert_eq!(code(&dynmis(&["verify", &empty])), 1);
    assert_eq!(code(&dynmis(&["verify", &path(&dir, "missing.txt")])), 1);
}

#[test]
fn run_rejects_absent_deletion_with_line() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.txt");
    fs::write(&bad, "n 3\n+ 0 1\n- 1 2\n").unwrap();
    let o = dynmis(&["run", "--alg", "naive", "--stream", &bad]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn run_requires_parameters() {
    let spec = "random:n=8,steps=20";
    assert_eq!(code(&dynmis(&["run", "--alg", "rand", "--gen", spec])), 1);
    assert_eq!(code(&dynmis(&["run", "--alg", "arb", "--gen", spec])), 1);
    assert_eq!(code(&dynmis(&["run", "--alg", "greedy", "--gen", spec])), 1);
    assert_eq!(code(&dynmis(&["run", "--alg", "det", "--gen", spec, "--c-high", "-2"])), 1);
    assert_eq!(code(&dynmis(&["run", "--alg", "det"])), 1);
}

#[test]
fn run_det_verified_writes_consistent_outputs() {
    let dir = TempDir::new().unwrap();
    let (metrics, summary) = (path(&dir, "m.csv"), path(&dir, "s.json"));
    let o = dynmis(&[
        "run", "--alg", "det", "--gen", "random:n=32,steps=1000,seed=7", "--verify",
        "--metrics", &metrics, "--summary", &summary,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["updates"], 1000);
    assert_eq!(s["verified"], true);

    let csv = fs::read_to_string(&metrics).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# config: {\"algorithm\":\"det\""));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name| header.iter().position(|h| *h == name).unwrap();
    let (kind, work) = (col("row_kind"), col("work"));
    let mut updates = 0;
    let mut total = 0u64;
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        total += cells[work].parse::<u64>().unwrap();
        updates += (cells[kind] == "update") as u64;
    }
    assert_eq!(updates, 1000);
    assert_eq!(s["total_work"], total);
}

#[test]
fn naive_adversary_rounds_cost_at_least_s() {
    let dir = TempDir::new().unwrap();
    let (stream, metrics) = (path(&dir, "adv.txt"), path(&dir, "m.csv"));
    assert_eq!(code(&dynmis(&["gen", "bipartite-adv", "s=8", "rounds=20", "-o", &stream])), 0);
    let o = dynmis(&["run", "--alg", "naive", "--stream", &stream, "--metrics", &metrics]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(&metrics).unwrap();
    let work: Vec<u64> = csv
        .lines()
        .skip(2)
        .filter(|l| l.starts_with("update"))
        .map(|l| l.split(',').nth(8).unwrap().parse().unwrap())
        .collect();
    // 64 build insertions, then rounds of four updates.
    let rounds = work[64..].chunks(4);
    assert_eq!(rounds.len(), 20);
    for r in rounds {
        assert!(r.iter().sum::<u64>() >= 8, "{r:?}");
    }
}

#[test]
fn run_is_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let m = path(&dir, &format!("m{i}.csv"));
        let o = dynmis(&[
            "run", "--alg", "rand", "--seed", "11", "--gen", "random:n=24,steps=600,seed=3",
            "--metrics", &m,
        ]);
        assert_eq!(code(&o), 0);
        outputs.push((fs::read(&m).unwrap(), o.stdout));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn compare_all_four_on_arboricity_stream() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "cmp.csv");
    let o = dynmis(&[
        "compare", "--gen", "arboricity:n=64,lambda=2,steps=2000,seed=5", "--seed", "1",
        "--lambda", "2", "--verify", "--csv", &csv,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = String::from_utf8(o.stdout).unwrap();
    let names: Vec<&str> = table.lines().skip(1).map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names, ["arb", "det", "naive", "rand"]);
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(&r[1], "ok");
        assert_eq!(&r[2], "2000");
        assert_eq!(&r[9], "true");
    }
}

#[test]
fn compare_named_subset_on_adversary() {
    let o = dynmis(&[
        "compare", "--algs", "naive,rand", "--gen", "bipartite-adv:s=32,rounds=240", "--seed", "2",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = String::from_utf8(o.stdout).unwrap();
    let amortized: Vec<f64> = table
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(amortized.len(), 2);
    assert!(amortized.iter().all(|a| *a > 0.0), "{table}");
}

#[test]
fn compare_empty_stream_reports_zeros_and_flags_failures() {
    let o = dynmis(&["compare", "--gen", "random:n=4,steps=0", "--seed", "1", "--lambda", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table.lines().count(), 5);
    for line in table.lines().skip(1) {
        let cells: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(&cells[1..6], ["0", "1", "0", "0.000", "0"], "{line}");
    }

    let o = dynmis(&["compare", "--gen", "random:n=4,steps=0", "--seed", "1"]);
    assert_eq!(code(&o), 1);
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.lines().any(|l| l.starts_with("arb") && l.contains("failed")), "{table}");
}
