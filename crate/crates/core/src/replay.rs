//! Drives an algorithm over a stream, recording metrics and optionally
//! checking every intermediate state.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algo::MisAlgorithm;
use crate::meter::WorkMeter;
use crate::metrics::{MetricsRow, RowKind, RunRecord};
use crate::mis::{verify_mis, MisError, Verdict};
use crate::stream::{UpdateEvent, UpdateStream};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("event {event}: {source}")]
    Algorithm {
        event: u64,
        #[source]
        source: MisError,
    },
    #[error("event {event}: {verdict}")]
    Verification { event: u64, verdict: Verdict },
    #[error("event {event}: {message}")]
    Invariant { event: u64, message: String },
}

impl ReplayError {
    pub fn event(&self) -> u64 {
        match self {
            ReplayError::Algorithm { event, .. }
            | ReplayError::Verification { event, .. }
            | ReplayError::Invariant { event, .. } => *event,
        }
    }
}

/// A failed replay with everything recorded up to the failure.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{error}")]
pub struct ReplayFailure {
    pub error: ReplayError,
    pub record: RunRecord,
}

/// Incremental replay: construct, then feed events one at a time.
pub struct Replay {
    alg: Box<dyn MisAlgorithm>,
    verify: bool,
    meter: WorkMeter,
    rows: Vec<MetricsRow>,
    events: u64,
}

impl Replay {
    /// Builds the initial MIS on the algorithm's current graph.
    pub fn start(mut alg: Box<dyn MisAlgorithm>, verify: bool) -> Result<Self, ReplayFailure> {
        let mut meter = WorkMeter::new();
        let init = alg.initialize(&mut meter);
        let mut r = Self { alg, verify, meter, rows: Vec::new(), events: 0 };
        match init {
            Ok(report) => {
                let s = r.alg.state();
                r.rows.push(MetricsRow::epoch(0, &report, s.len(), s.phi()));
            }
            Err(source) => return Err(r.fail(ReplayError::Algorithm { event: 0, source })),
        }
        r.check(0).map_err(|e| r.fail(e))?;
        Ok(r)
    }

    pub fn algorithm(&self) -> &dyn MisAlgorithm {
        self.alg.as_ref()
    }

    pub fn rows(&self) -> &[MetricsRow] {
        &self.rows
    }

    pub fn meter(&self) -> WorkMeter {
        self.meter
    }

    fn check(&self, event: u64) -> Result<(), ReplayError> {
        if !self.verify {
            return Ok(());
        }
        let verdict = verify_mis(self.alg.graph(), self.alg.state());
        if !verdict.is_valid() {
            return Err(ReplayError::Verification { event, verdict });
        }
        self.alg
            .check_invariants()
            .map_err(|message| ReplayError::Invariant { event, message })
    }

    fn fail(&self, error: ReplayError) -> ReplayFailure {
        ReplayFailure { error, record: self.record() }
    }

    /// Serves one event. Returns the update row.
    pub fn step(&mut self, e: UpdateEvent) -> Result<&MetricsRow, ReplayFailure> {
        self.events += 1;
        let index = self.events;
        let before = self.meter;
        let report = match self.alg.apply(e, &mut self.meter) {
            Ok(r) => r,
            Err(source) => {
                return Err(self.fail(ReplayError::Algorithm { event: index, source }));
            }
        };
        let s = self.alg.state();
        let (size, phi) = (s.len(), s.phi());
        for ep in &report.epochs {
            self.rows.push(MetricsRow::epoch(index, ep, size, phi));
        }
        let w = self.meter.since(&before) - report.rebuild_work();
        self.rows.push(MetricsRow {
            row_kind: RowKind::Update,
            event: index,
            op: e.kind.as_str(),
            u: Some(e.u),
            v: Some(e.v),
            adjacency_visits: w.adjacency_visits,
            counter_mutations: w.counter_mutations,
            mis_flips: w.mis_flips,
            work: w.work(),
            added: report.outcome.added.len(),
            removed: report.outcome.removed.len(),
            mis_size: size,
            phi,
            epoch_len: None,
            m0: None,
            fallback: String::new(),
        });
        self.check(index).map_err(|e| self.fail(e))?;
        Ok(self.rows.last().expect("row just pushed"))
    }

    pub fn record(&self) -> RunRecord {
        let config: BTreeMap<String, String> = self
            .alg
            .config()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let summary = RunRecord::summarize(
            self.alg.name(),
            config,
            self.alg.graph().n(),
            &self.rows,
            self.alg.state().len(),
            self.verify,
        );
        RunRecord { summary, rows: self.rows.clone() }
    }

    pub fn finish(self) -> RunRecord {
        self.record()
    }
}

/// Replays all of `stream` through `alg`.
pub fn run(
    alg: Box<dyn MisAlgorithm>,
    stream: &UpdateStream,
    verify: bool,
) -> Result<RunRecord, ReplayFailure> {
    let mut r = Replay::start(alg, verify)?;
    for &e in &stream.events {
        r.step(e)?;
    }
    Ok(r.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{AlgorithmParams, Registry};

    #[test]
    fn empty_stream_single_construction() {
        let reg = Registry::builtin();
        let params = AlgorithmParams { seed: Some(1), lambda: Some(1), ..Default::default() };
        for name in reg.names() {
            let alg = reg.create(name, 5, &params).unwrap();
            let rec = run(alg, &UpdateStream::new(5), true).unwrap();
            assert_eq!(rec.summary.updates, 0);
            assert_eq!(rec.summary.epochs, 1);
            assert_eq!(rec.summary.amortized_work, 0.0);
            assert_eq!(rec.summary.final_mis_size, 5);
            rec.check_consistency().unwrap();
        }
    }

    #[test]
    fn bad_event_reports_index() {
        let reg = Registry::builtin();
        let alg = reg.create("naive", 3, &AlgorithmParams::default()).unwrap();
        let stream = UpdateStream {
            n: 3,
            events: vec![UpdateEvent::insert(0, 1), UpdateEvent::delete(1, 2)],
        };
        let err = run(alg, &stream, false).unwrap_err();
        assert_eq!(err.error.event(), 2);
        assert_eq!(err.record.summary.updates, 1);
    }
}
