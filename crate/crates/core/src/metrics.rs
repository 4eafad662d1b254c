//! Per-update metrics rows and run summaries.
//!
//! CSV layout: one comment line `# config: {...}` echoing the algorithm and
//! its configuration, then a header and one row per rebuild (`epoch`) or
//! update (`update`). Update rows exclude rebuild work; rebuild rows carry
//! it. Summary totals equal the column sums over all rows.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

use crate::algo::EpochReport;
use crate::meter::WorkMeter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Epoch,
    Update,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricsRow {
    pub row_kind: RowKind,
    /// 1-based update index; 0 for the initial construction.
    pub event: u64,
    /// `+` or `-` on update rows, empty on epoch rows.
    pub op: &'static str,
    pub u: Option<usize>,
    pub v: Option<usize>,
    pub adjacency_visits: u64,
    pub counter_mutations: u64,
    pub mis_flips: u64,
    pub work: u64,
    pub added: usize,
    pub removed: usize,
    pub mis_size: usize,
    pub phi: i64,
    pub epoch_len: Option<u64>,
    pub m0: Option<usize>,
    /// Fallback names joined by `|`.
    pub fallback: String,
}

impl MetricsRow {
    pub fn epoch(event: u64, report: &EpochReport, mis_size: usize, phi: i64) -> Self {
        let w = report.work;
        Self {
            row_kind: RowKind::Epoch,
            event,
            op: "",
            u: None,
            v: None,
            adjacency_visits: w.adjacency_visits,
            counter_mutations: w.counter_mutations,
            mis_flips: w.mis_flips,
            work: w.work(),
            added: 0,
            removed: 0,
            mis_size,
            phi,
            epoch_len: report.length,
            m0: Some(report.m0),
            fallback: report
                .fallbacks
                .iter()
                .map(|f| f.as_str())
                .collect::<Vec<_>>()
                .join("|"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub algorithm: String,
    pub config: BTreeMap<String, String>,
    pub n: usize,
    pub updates: u64,
    pub epochs: u64,
    pub total_work: u64,
    pub rebuild_work: u64,
    pub update_work: u64,
    /// `total_work / updates`, 0 without updates.
    pub amortized_work: f64,
    pub max_update_work: u64,
    pub max_rebuild_work: u64,
    /// Occurrences of each fallback name over all epoch rows.
    pub fallbacks: BTreeMap<String, u64>,
    pub final_mis_size: usize,
    pub verified: bool,
}

/// Everything a replay produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub summary: RunSummary,
    pub rows: Vec<MetricsRow>,
}

impl RunRecord {
    /// Summary derived from `rows`.
    pub fn summarize(
        algorithm: &str,
        config: BTreeMap<String, String>,
        n: usize,
        rows: &[MetricsRow],
        final_mis_size: usize,
        verified: bool,
    ) -> RunSummary {
        let mut s = RunSummary {
            algorithm: algorithm.to_string(),
            config,
            n,
            updates: 0,
            epochs: 0,
            total_work: 0,
            rebuild_work: 0,
            update_work: 0,
            amortized_work: 0.0,
            max_update_work: 0,
            max_rebuild_work: 0,
            fallbacks: BTreeMap::new(),
            final_mis_size,
            verified,
        };
        for r in rows {
            match r.row_kind {
                RowKind::Epoch => {
                    s.epochs += 1;
                    s.rebuild_work += r.work;
                    s.max_rebuild_work = s.max_rebuild_work.max(r.work);
                    for name in r.fallback.split('|').filter(|f| !f.is_empty()) {
                        *s.fallbacks.entry(name.to_string()).or_default() += 1;
                    }
                }
                RowKind::Update => {
                    s.updates += 1;
                    s.update_work += r.work;
                    s.max_update_work = s.max_update_work.max(r.work);
                }
            }
        }
        s.total_work = s.rebuild_work + s.update_work;
        if s.updates > 0 {
            s.amortized_work = s.total_work as f64 / s.updates as f64;
        }
        s
    }

    /// Checks that the summary totals match the rows.
    pub fn check_consistency(&self) -> Result<(), String> {
        let again = Self::summarize(
            &self.summary.algorithm,
            self.summary.config.clone(),
            self.summary.n,
            &self.rows,
            self.summary.final_mis_size,
            self.summary.verified,
        );
        let s = &self.summary;
        let fields = [
            ("updates", s.updates, again.updates),
            ("epochs", s.epochs, again.epochs),
            ("total_work", s.total_work, again.total_work),
            ("rebuild_work", s.rebuild_work, again.rebuild_work),
            ("update_work", s.update_work, again.update_work),
            ("max_update_work", s.max_update_work, again.max_update_work),
            ("max_rebuild_work", s.max_rebuild_work, again.max_rebuild_work),
        ];
        for (name, stored, derived) in fields {
            if stored != derived {
                return Err(format!("{name}: summary {stored}, rows {derived}"));
            }
        }
        if s.fallbacks != again.fallbacks {
            return Err(format!("fallbacks: summary {:?}, rows {:?}", s.fallbacks, again.fallbacks));
        }
        let meter_total: u64 = self
            .rows
            .iter()
            .map(|r| r.adjacency_visits + r.counter_mutations)
            .sum();
        if meter_total != s.total_work {
            return Err(format!("work columns sum to {meter_total}, summary {}", s.total_work));
        }
        Ok(())
    }

    /// Sum of the three meter columns over all rows.
    pub fn meter_total(&self) -> WorkMeter {
        self.rows.iter().fold(WorkMeter::new(), |acc, r| {
            acc + WorkMeter {
                adjacency_visits: r.adjacency_visits,
                counter_mutations: r.counter_mutations,
                mis_flips: r.mis_flips,
            }
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        #[derive(Serialize)]
        struct Echo<'a> {
            algorithm: &'a str,
            n: usize,
            config: &'a BTreeMap<String, String>,
        }
        let echo = Echo {
            algorithm: &self.summary.algorithm,
            n: self.summary.n,
            config: &self.summary.config,
        };
        writeln!(w, "# config: {}", serde_json::to_string(&echo)?)?;
        let mut csv = csv::Writer::from_writer(w);
        for row in &self.rows {
            csv.serialize(row)?;
        }
        if self.rows.is_empty() {
            csv.write_record(CSV_COLUMNS)?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }

    pub fn write_summary<W: Write>(&self, mut w: W) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut w, &self.summary)?;
        writeln!(w)
    }
}

pub const CSV_COLUMNS: [&str; 16] = [
    "row_kind",
    "event",
    "op",
    "u",
    "v",
    "adjacency_visits",
    "counter_mutations",
    "mis_flips",
    "work",
    "added",
    "removed",
    "mis_size",
    "phi",
    "epoch_len",
    "m0",
    "fallback",
];
