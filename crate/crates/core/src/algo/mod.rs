//! Interchangeable dynamic-MIS maintenance strategies.
//!
//! Every strategy owns its graph and MIS state, rebuilds itself at epoch
//! boundaries, and charges all work to the caller's [`WorkMeter`]. Rebuild
//! work is reported separately through [`EpochReport`] so that callers can
//! split amortized cost into reconstruction and in-epoch parts.

pub mod arb;
pub mod det;
pub mod naive;
pub mod rand;

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::graph::DynamicGraph;
use crate::meter::WorkMeter;
use crate::mis::{MisError, MisState, UpdateOutcome};
use crate::stream::UpdateEvent;

/// Why a rebuild took a degraded path or happened early.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fallback {
    /// Good-MIS construction ran out of candidates.
    StuckConstruction,
    /// A frozen high-degree vertex lost its last MIS neighbor mid-epoch.
    SlackExhausted,
    /// Leveling left some high-degree vertices without a level.
    LevelingStalled,
    /// No eligible candidate for some representative.
    InjectionStuck,
    /// A representative replacement scan came up empty.
    ReplacementNotFound,
}

impl Fallback {
    pub fn as_str(self) -> &'static str {
        match self {
            Fallback::StuckConstruction => "stuck-construction",
            Fallback::SlackExhausted => "slack-exhausted",
            Fallback::LevelingStalled => "leveling-stalled",
            Fallback::InjectionStuck => "injection-stuck",
            Fallback::ReplacementNotFound => "replacement-not-found",
        }
    }
}

impl fmt::Display for Fallback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpochReport {
    /// 0-based rebuild counter.
    pub index: u64,
    /// Edge count used for the epoch parameters (clamped to at least 1).
    pub m0: usize,
    /// Number of updates the epoch will serve; `None` when unbounded.
    pub length: Option<u64>,
    pub work: WorkMeter,
    /// Degraded paths taken by, or triggering, this rebuild.
    pub fallbacks: Vec<Fallback>,
}

/// Result of serving one update.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepReport {
    pub outcome: UpdateOutcome,
    /// Rebuilds performed while serving this update (before or after it).
    pub epochs: Vec<EpochReport>,
}

impl StepReport {
    pub fn rebuild_work(&self) -> WorkMeter {
        self.epochs.iter().fold(WorkMeter::new(), |acc, e| acc + e.work)
    }
}

/// A fully dynamic MIS algorithm.
pub trait MisAlgorithm: Send {
    /// Registry name.
    fn name(&self) -> &'static str;

    fn graph(&self) -> &DynamicGraph;

    fn state(&self) -> &MisState;

    /// Forces a reconstruction on the current graph.
    fn initialize(&mut self, meter: &mut WorkMeter) -> Result<EpochReport, MisError>;

    /// Serves one edge update, rebuilding first when the epoch is spent.
    fn apply(&mut self, event: UpdateEvent, meter: &mut WorkMeter) -> Result<StepReport, MisError>;

    /// Strategy-specific invariants beyond MIS validity. Full scans; meant
    /// for tests and `--verify` replays.
    fn check_invariants(&self) -> Result<(), String> {
        Ok(())
    }

    /// Effective configuration as `key = value` pairs.
    fn config(&self) -> Vec<(&'static str, String)>;
}

/// Non-negative fraction `num / den` with `den > 0`, compared exactly.
#[derive(Debug, Clone, Copy)]
pub struct Ratio {
    pub num: usize,
    pub den: usize,
}

impl Ratio {
    pub fn new(num: usize, den: usize) -> Self {
        debug_assert!(den > 0);
        Self { num, den }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = self.num as u128 * other.den as u128;
        let r = other.num as u128 * self.den as u128;
        l.cmp(&r)
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `max(1, log₂ m)`.
pub(crate) fn clamped_log2(m: usize) -> f64 {
    (m.max(1) as f64).log2().max(1.0)
}

/// `⌈√m⌉` without floating-point error.
pub fn ceil_sqrt(m: u64) -> u64 {
    if m == 0 {
        return 0;
    }
    let mut r = (m as f64).sqrt() as u64;
    while r * r > m {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= m {
        r += 1;
    }
    if r * r == m {
        r
    } else {
        r + 1
    }
}

/// `⌈∛m⌉` without floating-point error.
pub fn ceil_cbrt(m: u64) -> u64 {
    if m == 0 {
        return 0;
    }
    let mut r = (m as f64).cbrt() as u64;
    while r > 0 && r * r * r > m {
        r -= 1;
    }
    while (r + 1) * (r + 1) * (r + 1) <= m {
        r += 1;
    }
    if r * r * r == m {
        r
    } else {
        r + 1
    }
}
