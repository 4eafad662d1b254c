//! `dynmis`: generate update streams, replay them through the MIS
//! strategies and compare their work.
//!
//! Exit codes: 0 ok, 1 input or usage error, 2 verification failure,
//! 3 internal invariant error.

mod scenario;

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Args, Parser, Subcommand};
use dynmis::{AlgorithmParams, Registry, ReplayError, ReplayFailure, RunRecord, UpdateStream};
use serde::Serialize;

use scenario::{read_stream, GenSpec};

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Self::input(format!("{}: {e}", path.display()))
    }

    fn replay(alg: &str, e: &ReplayError) -> Self {
        let code = match e {
            ReplayError::Verification { .. } => 2,
            ReplayError::Algorithm { .. } | ReplayError::Invariant { .. } => 3,
        };
        Self { code, message: format!("{alg}: {e}") }
    }
}

#[derive(Parser)]
#[command(name = "dynmis", version, about = "Dynamic maximal independent set harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated stream.
    ///
    /// Kinds: `random n= steps= [p=0.5] [seed=0]`, `bipartite-adv s= rounds=`,
    /// `arboricity n= lambda= steps= [p=0.7] [hubs=0] [hub-bias=0] [seed=0]`.
    Gen {
        kind: String,
        /// `key=value` parameters.
        params: Vec<String>,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Replay a stream through one algorithm.
    Run {
        #[arg(long)]
        alg: String,
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        params: ParamArgs,
        /// Check the MIS and the algorithm invariants after every event.
        #[arg(long)]
        verify: bool,
        /// Metrics CSV path.
        #[arg(long)]
        metrics: Option<PathBuf>,
        /// JSON summary path; printed to stdout when absent.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Replay one stream through several algorithms and tabulate their work.
    Compare {
        /// Comma-separated algorithm names; all registered ones by default.
        #[arg(long, value_delimiter = ',')]
        algs: Vec<String>,
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        verify: bool,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check that a stream file parses and replays on an empty graph.
    Verify { stream: PathBuf },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Stream file.
    #[arg(long)]
    stream: Option<PathBuf>,
    /// Generator spec such as `random:n=32,steps=1000,seed=1`.
    #[arg(long)]
    gen: Option<String>,
}

impl Source {
    fn load(&self) -> Result<UpdateStream, Failure> {
        match (&self.stream, &self.gen) {
            (Some(path), _) => read_stream(path),
            (None, Some(spec)) => GenSpec::parse(spec)?.generate(),
            (None, None) => Err(Failure::usage("one of --stream or --gen is required")),
        }
    }
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lambda: Option<usize>,
    #[arg(long = "c-high")]
    c_high: Option<f64>,
    #[arg(long = "c-replace")]
    c_replace: Option<f64>,
    #[arg(long = "c-feasible")]
    c_feasible: Option<f64>,
    #[arg(long = "c-T")]
    c_t: Option<f64>,
}

impl ParamArgs {
    fn params(&self) -> AlgorithmParams {
        AlgorithmParams {
            seed: self.seed,
            c_high: self.c_high,
            lambda: self.lambda,
            c_replace: self.c_replace,
            c_feasible: self.c_feasible,
            c_t: self.c_t,
        }
    }
}

/// Replays `stream`; the record is returned even on failure.
fn replay(
    registry: &Registry,
    alg: &str,
    stream: &UpdateStream,
    params: &AlgorithmParams,
    verify: bool,
) -> Result<RunRecord, (Failure, Option<RunRecord>)> {
    let algorithm = registry
        .create(alg, stream.n, params)
        .map_err(|e| (Failure::usage(e.to_string()), None))?;
    dynmis::run(algorithm, stream, verify)
        .map_err(|ReplayFailure { error, record }| (Failure::replay(alg, &error), Some(record)))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| Failure::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Failure::io(path, e))
}

fn cmd_gen(kind: &str, params: &[String], out: Option<&Path>) -> Result<(), Failure> {
    let stream = GenSpec::from_words(kind, params)?.generate()?;
    let text = dynmis::serialize_stream(&stream);
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::io(path, e))?;
            println!("{} events", stream.len());
        }
        None => {
            io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::input(e.to_string()))?;
            eprintln!("{} events", stream.len());
        }
    }
    Ok(())
}

fn cmd_run(
    alg: &str,
    stream: &UpdateStream,
    params: &AlgorithmParams,
    verify: bool,
    metrics: Option<&Path>,
    summary: Option<&Path>,
) -> Result<(), Failure> {
    let registry = Registry::builtin();
    let (record, failure) = match replay(&registry, alg, stream, params, verify) {
        Ok(r) => (r, None),
        Err((f, Some(r))) => (r, Some(f)),
        Err((f, None)) => return Err(f),
    };
    if let Some(path) = metrics {
        write_file(path, |w| record.write_csv(w))?;
    }
    match summary {
        Some(path) => write_file(path, |w| record.write_summary(w))?,
        None => record
            .write_summary(io::stdout().lock())
            .map_err(|e| Failure::input(e.to_string()))?,
    }
    failure.map_or(Ok(()), Err)
}

#[derive(Debug, Serialize)]
struct CompareRow {
    algorithm: String,
    status: String,
    updates: u64,
    epochs: u64,
    total_work: u64,
    amortized_work: f64,
    max_update_work: u64,
    max_rebuild_work: u64,
    final_mis_size: usize,
    verified: bool,
}

impl CompareRow {
    fn new(alg: &str, record: Option<&RunRecord>, failure: Option<&Failure>) -> Self {
        let status = failure.map_or_else(|| "ok".to_string(), |f| format!("failed: {}", f.message));
        let mut row = Self {
            algorithm: alg.to_string(),
            status,
            updates: 0,
            epochs: 0,
            total_work: 0,
            amortized_work: 0.0,
            max_update_work: 0,
            max_rebuild_work: 0,
            final_mis_size: 0,
            verified: false,
        };
        if let Some(r) = record {
            let s = &r.summary;
            row.updates = s.updates;
            row.epochs = s.epochs;
            row.total_work = s.total_work;
            row.amortized_work = s.amortized_work;
            row.max_update_work = s.max_update_work;
            row.max_rebuild_work = s.max_rebuild_work;
            row.final_mis_size = s.final_mis_size;
            row.verified = s.verified && failure.is_none();
        }
        row
    }
}

fn render_table(rows: &[CompareRow]) -> String {
    let header = ["algorithm", "updates", "epochs", "total", "amortized", "max_update", "max_rebuild", "|M|", "verified", "status"];
    let cells: Vec<[String; 10]> = rows
        .iter()
        .map(|r| {
            [
                r.algorithm.clone(),
                r.updates.to_string(),
                r.epochs.to_string(),
                r.total_work.to_string(),
                format!("{:.3}", r.amortized_work),
                r.max_update_work.to_string(),
                r.max_rebuild_work.to_string(),
                r.final_mis_size.to_string(),
                r.verified.to_string(),
                r.status.clone(),
            ]
        })
        .collect();
    let mut width = header.map(str::len);
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let mut line = |row: &[String]| {
        let parts: Vec<String> = row
            .iter()
            .zip(width)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 || i == 9 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&header.map(String::from));
    for row in &cells {
        line(row);
    }
    out
}

fn cmd_compare(
    algs: &[String],
    stream: &UpdateStream,
    params: &AlgorithmParams,
    verify: bool,
    csv_path: Option<&Path>,
) -> Result<(), Failure> {
    let registry = Registry::builtin();
    let names: Vec<String> = if algs.is_empty() {
        registry.names().into_iter().map(String::from).collect()
    } else {
        algs.to_vec()
    };
    // One thread per scenario; results are collected in scenario order.
    let results: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = names
            .iter()
            .map(|alg| {
                let registry = &registry;
                s.spawn(move || replay(registry, alg, stream, params, verify))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    });
    let mut rows = Vec::new();
    let mut worst: Option<Failure> = None;
    for (alg, result) in names.iter().zip(results) {
        let (record, failure) = match result {
            Ok(r) => (Some(r), None),
            Err((f, r)) => (r, Some(f)),
        };
        rows.push(CompareRow::new(alg, record.as_ref(), failure.as_ref()));
        if let Some(f) = failure {
            if worst.as_ref().map_or(true, |w| f.code > w.code) {
                worst = Some(f);
            }
        }
    }
    print!("{}", render_table(&rows));
    if let Some(path) = csv_path {
        write_file(path, |w| {
            let mut csv = csv::Writer::from_writer(w);
            for r in &rows {
                csv.serialize(r)?;
            }
            csv.flush()
        })?;
    }
    worst.map_or(Ok(()), Err)
}

fn cmd_verify(path: &Path) -> Result<(), Failure> {
    let stream = read_stream(path)?;
    println!("ok: n {}, {} events", stream.n, stream.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Gen { kind, params, out } => cmd_gen(&kind, &params, out.as_deref()),
        Command::Run { alg, source, params, verify, metrics, summary } => source
            .load()
            .and_then(|s| cmd_run(&alg, &s, &params.params(), verify, metrics.as_deref(), summary.as_deref())),
        Command::Compare { algs, source, params, verify, csv } => source
            .load()
            .and_then(|s| cmd_compare(&algs, &s, &params.params(), verify, csv.as_deref())),
        Command::Verify { stream } => cmd_verify(&stream),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dynmis::{MisError, Verdict};

    #[test]
    fn replay_errors_map_to_exit_codes() {
        let v = ReplayError::Verification { event: 4, verdict: Verdict::MaximalityViolation(2) };
        assert_eq!(Failure::replay("det", &v).code, 2);
        let i = ReplayError::Invariant { event: 4, message: "x".into() };
        assert_eq!(Failure::replay("det", &i).code, 3);
        let a = ReplayError::Algorithm { event: 1, source: MisError::Invariant("two removals".into()) };
        assert_eq!(Failure::replay("rand", &a).code, 3);
    }
}
