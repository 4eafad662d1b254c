//! Deterministic epoch algorithm.
//!
//! Each epoch starts from the current edge count `m0`, serves
//! `K = ⌈m0^{1/3}⌉` updates, and begins with a *good* MIS: every vertex whose
//! degree is at least `c_high · m0^{2/3} · √(log m0)` (the frozen high set)
//! has `K + 1` neighbors in the MIS. Since an update removes at most one MIS
//! neighbor of any vertex, high vertices stay dominated for the whole epoch
//! and only low-degree vertices ever leave the MIS.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{DynamicGraph, VertexId};
use crate::meter::WorkMeter;
use crate::mis::{
    add_to_mis, apply_counter_update, greedy_mis, smaller_degree_endpoint, MisError, MisState,
    NoHook, UpdateOutcome,
};
use crate::stream::UpdateEvent;

use super::{ceil_cbrt, clamped_log2, EpochReport, Fallback, MisAlgorithm, Ratio, StepReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetConfig {
    /// Scale of the high-degree threshold.
    pub c_high: f64,
}

impl DetConfig {
    pub const DEFAULT_C_HIGH: f64 = 10.0;
}

impl Default for DetConfig {
    fn default() -> Self {
        Self { c_high: Self::DEFAULT_C_HIGH }
    }
}

/// Epoch length `⌈m^{1/3}⌉` for `m ≥ 1`.
pub fn epoch_len(m: usize) -> u64 {
    ceil_cbrt(m.max(1) as u64)
}

/// `c_high · m^{2/3} · √(max(1, log₂ m))`.
pub fn high_threshold(m: usize, cfg: &DetConfig) -> f64 {
    let m = m.max(1) as f64;
    cfg.c_high * m.powf(2.0 / 3.0) * clamped_log2(m as usize).sqrt()
}

#[derive(Debug, Clone)]
pub struct DetEpoch {
    pub m0: usize,
    /// Epoch length `K`.
    pub length: u64,
    pub remaining: u64,
    pub threshold: f64,
    /// High vertices in ascending order, frozen for the epoch.
    pub v_high: Vec<VertexId>,
    pub is_high: Vec<bool>,
    /// Required MIS neighbors per high vertex after construction (`K + 1`).
    pub mis_target: usize,
}

impl DetEpoch {
    /// Parameters for an epoch starting on `g` now.
    pub fn start(g: &DynamicGraph, cfg: &DetConfig) -> Self {
        let m0 = g.edge_count().max(1);
        let length = epoch_len(m0);
        let threshold = high_threshold(m0, cfg);
        let mut is_high = vec![false; g.n()];
        let v_high: Vec<_> = (0..g.n())
            .filter(|&v| g.degree(v) as f64 >= threshold)
            .collect();
        for &v in &v_high {
            is_high[v] = true;
        }
        Self {
            m0,
            length,
            remaining: length,
            threshold,
            v_high,
            is_high,
            mis_target: length as usize + 1,
        }
    }

    /// Degraded one-update epoch with no high set.
    fn fallback(g: &DynamicGraph, m0: usize, threshold: f64) -> Self {
        Self {
            m0,
            length: 1,
            remaining: 1,
            threshold,
            v_high: Vec::new(),
            is_high: vec![false; g.n()],
            mis_target: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GoodMisError {
    #[error("good-MIS construction stuck with {uncovered} high vertices uncovered")]
    Stuck { uncovered: usize },
    #[error(transparent)]
    Mis(#[from] MisError),
}

/// 2-approximate argmin of `deg(u) / k(u)` over the pool.
///
/// Entries are bucketed by `⌊log₂ k⌋`; inside a bucket an ordered set keyed
/// by degree yields the bucket's minimum-degree entry. The best of the
/// bucket minima is within a factor 2 of the true minimum because `k`
/// varies by less than 2× inside a bucket.
#[derive(Debug, Default)]
struct RatioSelector {
    classes: Vec<BTreeSet<(usize, VertexId)>>,
}

impl RatioSelector {
    fn class_of(k: usize) -> usize {
        debug_assert!(k > 0);
        (usize::BITS - 1 - k.leading_zeros()) as usize
    }

    fn insert(&mut self, u: VertexId, deg: usize, k: usize) {
        if k == 0 {
            return;
        }
        let c = Self::class_of(k);
        if self.classes.len() <= c {
            self.classes.resize_with(c + 1, BTreeSet::new);
        }
        self.classes[c].insert((deg, u));
    }

    fn remove(&mut self, u: VertexId, deg: usize, k: usize) {
        if k > 0 {
            self.classes[Self::class_of(k)].remove(&(deg, u));
        }
    }

    fn best(&self, k: &[usize]) -> Option<VertexId> {
        let mut best: Option<(Ratio, VertexId)> = None;
        for class in &self.classes {
            if let Some(&(deg, u)) = class.first() {
                let r = Ratio::new(deg, k[u]);
                let better = match &best {
                    None => true,
                    Some((br, bu)) => (r, u) < (*br, *bu),
                };
                if better {
                    best = Some((r, u));
                }
            }
        }
        best.map(|(_, u)| u)
    }
}

/// Incremental good-MIS construction.
///
/// Exposed step-by-step so the selection contract can be checked from
/// outside against an exhaustive scan.
pub struct GoodMisBuilder {
    state: MisState,
    tracking: Vec<bool>,
    uncovered: usize,
    in_pool: Vec<bool>,
    k: Vec<usize>,
    n_count: Vec<usize>,
    cost: Vec<f64>,
    mis_target: usize,
    selector: RatioSelector,
}

impl GoodMisBuilder {
    pub fn new(g: &DynamicGraph, epoch: &DetEpoch, meter: &mut WorkMeter) -> Self {
        let n = g.n();
        let mut b = Self {
            state: MisState::new(n),
            tracking: epoch.is_high.clone(),
            uncovered: epoch.v_high.len(),
            in_pool: epoch.is_high.iter().map(|&h| !h).collect(),
            k: vec![0; n],
            n_count: vec![0; n],
            cost: vec![0.0; n],
            mis_target: epoch.mis_target,
            selector: RatioSelector::default(),
        };
        for &v in &epoch.v_high {
            meter.visit(g.degree(v));
            for w in g.neighbors(v) {
                if b.in_pool[w] {
                    b.k[w] += 1;
                }
            }
        }
        for u in 0..n {
            if b.in_pool[u] {
                b.selector.insert(u, g.degree(u), b.k[u]);
            }
        }
        b
    }

    pub fn uncovered(&self) -> usize {
        self.uncovered
    }

    pub fn in_pool(&self, u: VertexId) -> bool {
        self.in_pool[u]
    }

    /// Whether `v` is a high vertex still short of its target.
    pub fn is_tracking(&self, v: VertexId) -> bool {
        self.tracking[v]
    }

    /// Current `|N(u)| / |N(u) ∩ V_h|` for a pooled vertex.
    pub fn ratio(&self, g: &DynamicGraph, u: VertexId) -> Ratio {
        Ratio::new(g.degree(u), self.k[u])
    }

    /// Accumulated selection cost of a high vertex.
    pub fn cost(&self, v: VertexId) -> f64 {
        self.cost[v]
    }

    pub fn state(&self) -> &MisState {
        &self.state
    }

    fn drop_from_pool(&mut self, g: &DynamicGraph, u: VertexId) {
        if self.in_pool[u] {
            self.in_pool[u] = false;
            self.selector.remove(u, g.degree(u), self.k[u]);
        }
    }

    fn retire(&mut self, g: &DynamicGraph, v: VertexId, meter: &mut WorkMeter) {
        self.tracking[v] = false;
        self.uncovered -= 1;
        meter.visit(g.degree(v));
        for w in g.neighbors(v) {
            if self.in_pool[w] && self.k[w] > 0 {
                let deg = g.degree(w);
                self.selector.remove(w, deg, self.k[w]);
                self.k[w] -= 1;
                self.selector.insert(w, deg, self.k[w]);
            }
        }
    }

    /// Runs one selection. Returns `Ok(None)` once every high vertex is
    /// covered.
    pub fn step(
        &mut self,
        g: &DynamicGraph,
        meter: &mut WorkMeter,
    ) -> Result<Option<VertexId>, GoodMisError> {
        if self.uncovered == 0 {
            return Ok(None);
        }
        let u = self
            .selector
            .best(&self.k)
            .ok_or(GoodMisError::Stuck { uncovered: self.uncovered })?;
        let ratio = self.ratio(g, u).value();
        add_to_mis(g, &mut self.state, u, meter)?;
        self.drop_from_pool(g, u);
        let neighbors: Vec<_> = g.neighbors(u).collect();
        meter.visit(neighbors.len());
        for v in neighbors {
            if self.tracking[v] {
                self.cost[v] += ratio;
                self.n_count[v] += 1;
                if self.n_count[v] == self.mis_target {
                    self.retire(g, v, meter);
                }
            }
            self.drop_from_pool(g, v);
        }
        Ok(Some(u))
    }

    /// Completes the MIS with a greedy pass over the residual pool in
    /// ascending id order.
    pub fn finish(mut self, g: &DynamicGraph, meter: &mut WorkMeter) -> Result<MisState, GoodMisError> {
        for u in 0..g.n() {
            if self.in_pool[u] && !self.state.contains(u) && self.state.counter(u) == 0 {
                add_to_mis(g, &mut self.state, u, meter)?;
            }
        }
        Ok(self.state)
    }
}

/// Builds a valid MIS in which every high vertex has at least
/// `epoch.mis_target` MIS neighbors.
pub fn build_good_mis(
    g: &DynamicGraph,
    epoch: &DetEpoch,
    meter: &mut WorkMeter,
) -> Result<MisState, GoodMisError> {
    let mut b = GoodMisBuilder::new(g, epoch, meter);
    while b.step(g, meter)?.is_some() {}
    b.finish(g, meter)
}

/// One in-epoch update: counter maintenance with smaller-degree removal.
pub fn det_update(
    g: &mut DynamicGraph,
    s: &mut MisState,
    epoch: &mut DetEpoch,
    e: UpdateEvent,
    meter: &mut WorkMeter,
) -> Result<UpdateOutcome, MisError> {
    if epoch.remaining == 0 {
        return Err(MisError::Invariant("det epoch exhausted".into()));
    }
    let out = apply_counter_update(g, s, e, meter, &mut NoHook, |g, _, u, v| {
        smaller_degree_endpoint(g, u, v)
    })?;
    epoch.remaining -= 1;
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DetStats {
    pub epochs: u64,
    pub fallbacks: u64,
    /// Rebuilds whose output missed the good-MIS target for some vertex.
    pub good_mis_shortfalls: u64,
    /// Non-empty high sets seen at successful rebuilds.
    pub nonempty_high_epochs: u64,
    /// Removed vertices whose degree reached `threshold + 2K`.
    pub removed_degree_violations: u64,
    pub removals: u64,
}

pub struct DetMis {
    cfg: DetConfig,
    graph: DynamicGraph,
    state: MisState,
    epoch: DetEpoch,
    epoch_index: u64,
    pending: Vec<Fallback>,
    stats: DetStats,
}

impl DetMis {
    pub fn new(n: usize, cfg: DetConfig) -> Self {
        let graph = DynamicGraph::new(n);
        let mut epoch = DetEpoch::start(&graph, &cfg);
        epoch.remaining = 0;
        Self {
            cfg,
            state: MisState::new(n),
            graph,
            epoch,
            epoch_index: 0,
            pending: Vec::new(),
            stats: DetStats::default(),
        }
    }

    pub fn epoch(&self) -> &DetEpoch {
        &self.epoch
    }

    pub fn stats(&self) -> &DetStats {
        &self.stats
    }

    /// Whether the next update will be preceded by a rebuild.
    pub fn needs_rebuild(&self) -> bool {
        self.epoch.remaining == 0 || !self.pending.is_empty()
    }

    fn rebuild(&mut self, meter: &mut WorkMeter) -> Result<EpochReport, MisError> {
        let start = *meter;
        let mut fallbacks = std::mem::take(&mut self.pending);
        let epoch = DetEpoch::start(&self.graph, &self.cfg);
        match build_good_mis(&self.graph, &epoch, meter) {
            Ok(state) => {
                let short = epoch
                    .v_high
                    .iter()
                    .any(|&v| state.counter(v) < epoch.mis_target);
                if short {
                    self.stats.good_mis_shortfalls += 1;
                }
                if !epoch.v_high.is_empty() {
                    self.stats.nonempty_high_epochs += 1;
                }
                self.state = state;
                self.epoch = epoch;
            }
            Err(GoodMisError::Stuck { .. }) => {
                fallbacks.push(Fallback::StuckConstruction);
                let order: Vec<_> = (0..self.graph.n()).collect();
                self.state = greedy_mis(&self.graph, &order, meter);
                self.epoch = DetEpoch::fallback(&self.graph, epoch.m0, epoch.threshold);
            }
            Err(GoodMisError::Mis(e)) => return Err(e),
        }
        self.stats.fallbacks += fallbacks.len() as u64;
        let report = EpochReport {
            index: self.epoch_index,
            m0: self.epoch.m0,
            length: Some(self.epoch.length),
            work: meter.since(&start),
            fallbacks,
        };
        self.epoch_index += 1;
        self.stats.epochs += 1;
        Ok(report)
    }
}

impl MisAlgorithm for DetMis {
    fn name(&self) -> &'static str {
        "det"
    }

    fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    fn state(&self) -> &MisState {
        &self.state
    }

    fn initialize(&mut self, meter: &mut WorkMeter) -> Result<EpochReport, MisError> {
        self.rebuild(meter)
    }

    fn apply(&mut self, event: UpdateEvent, meter: &mut WorkMeter) -> Result<StepReport, MisError> {
        let mut report = StepReport::default();
        if self.needs_rebuild() {
            report.epochs.push(self.rebuild(meter)?);
        }
        let out = det_update(&mut self.graph, &mut self.state, &mut self.epoch, event, meter)?;
        let bound = self.epoch.threshold + 2.0 * self.epoch.length as f64;
        for &x in &out.removed {
            self.stats.removals += 1;
            if self.graph.degree(x) as f64 >= bound {
                self.stats.removed_degree_violations += 1;
            }
        }
        if out.added.iter().any(|&v| self.epoch.is_high[v]) {
            self.pending.push(Fallback::SlackExhausted);
        }
        report.outcome = out;
        Ok(report)
    }

    fn check_invariants(&self) -> Result<(), String> {
        if let Some(&v) = self.epoch.v_high.iter().find(|&&v| self.state.counter(v) == 0) {
            return Err(format!("high vertex {v} has no MIS neighbor"));
        }
        if self.stats.removed_degree_violations > 0 {
            return Err(format!(
                "{} removals above threshold + 2K",
                self.stats.removed_degree_violations
            ));
        }
        if self.stats.good_mis_shortfalls > 0 {
            return Err("good-MIS target missed".into());
        }
        Ok(())
    }

    fn config(&self) -> Vec<(&'static str, String)> {
        vec![("c_high", self.cfg.c_high.to_string())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mis::verify_mis;

    fn bipartite(left: usize, right: usize) -> DynamicGraph {
        let mut g = DynamicGraph::new(left + right);
        for l in 0..left {
            for r in left..left + right {
                g.insert_edge(l, r).unwrap();
            }
        }
        g
    }

    #[test]
    fn epoch_len_examples() {
        assert_eq!(epoch_len(1), 1);
        assert_eq!(epoch_len(0), 1);
        assert_eq!(epoch_len(1000), 10);
        assert_eq!(epoch_len(9), 3);
        assert_eq!(epoch_len(1001), 11);
    }

    #[test]
    fn threshold_examples() {
        let paper = DetConfig::default();
        assert_eq!(high_threshold(1, &paper), 10.0);
        // 10 · 1000^{2/3} · √(log₂ 1000), evaluated term by term.
        let expect = 10.0 * 100.0 * (1000f64.ln() / 2f64.ln()).sqrt();
        assert!((high_threshold(1000, &paper) - expect).abs() < 1e-9);
        assert!((high_threshold(1000, &paper) - 3157.4).abs() < 1.0);
        let scaled = DetConfig { c_high: 0.5 };
        assert!((high_threshold(64, &scaled) - 0.5 * 16.0 * 6f64.sqrt()).abs() < 1e-9);
        assert!((high_threshold(64, &scaled) - 19.60).abs() < 0.01);
    }

    #[test]
    fn empty_high_set_is_ascending_greedy() {
        let mut g = DynamicGraph::new(6);
        for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 3)] {
            g.insert_edge(u, v).unwrap();
        }
        let epoch = DetEpoch::start(&g, &DetConfig::default());
        assert!(epoch.v_high.is_empty());
        let mut m = WorkMeter::new();
        let s = build_good_mis(&g, &epoch, &mut m).unwrap();
        let order: Vec<_> = (0..6).collect();
        assert_eq!(s, greedy_mis(&g, &order, &mut m));
    }

    #[test]
    fn good_mis_on_k4_40() {
        let g = bipartite(4, 40);
        let mut epoch = DetEpoch::start(&g, &DetConfig { c_high: 0.5 });
        // m = 160: threshold ≈ 0.5 · 29.47 · 2.7 ≈ 39.8 < 40 for the left side only.
        assert_eq!(epoch.v_high, vec![0, 1, 2, 3]);
        epoch.mis_target = 3;
        let mut m = WorkMeter::new();
        let s = build_good_mis(&g, &epoch, &mut m).unwrap();
        assert!(verify_mis(&g, &s).is_valid());
        for v in 0..4 {
            let covered = g.neighbors(v).filter(|&w| s.contains(w)).count();
            assert!(covered >= 3, "vertex {v} has {covered}");
        }
    }

    #[test]
    fn stuck_construction_on_small_star() {
        let mut g = DynamicGraph::new(4);
        for leaf in 1..4 {
            g.insert_edge(0, leaf).unwrap();
        }
        let mut epoch = DetEpoch::start(&g, &DetConfig { c_high: 0.01 });
        assert!(epoch.is_high[0]);
        epoch.mis_target = 10;
        let mut m = WorkMeter::new();
        assert!(matches!(
            build_good_mis(&g, &epoch, &mut m),
            Err(GoodMisError::Stuck { .. })
        ));
    }

    #[test]
    fn selector_is_two_approximate() {
        // Shadow exact scan at every selection on a mixed instance.
        let mut g = bipartite(5, 60);
        for r in 5..30 {
            g.insert_edge(r, r + 30).unwrap();
        }
        let mut epoch = DetEpoch::start(&g, &DetConfig { c_high: 0.3 });
        assert!(!epoch.v_high.is_empty());
        epoch.mis_target = 6;
        let mut m = WorkMeter::new();
        let mut b = GoodMisBuilder::new(&g, &epoch, &mut m);
        loop {
            let exact = (0..g.n())
                .filter(|&u| b.in_pool(u))
                .filter_map(|u| {
                    let k = g.neighbors(u).filter(|&v| b.is_tracking(v)).count();
                    (k > 0).then_some(g.degree(u) as f64 / k as f64)
                })
                .fold(f64::INFINITY, f64::min);
            match b.step(&g, &mut m).unwrap() {
                None => break,
                Some(u) => {
                    let picked = b.ratio(&g, u).value();
                    assert!(picked <= 2.0 * exact + 1e-12, "{picked} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn det_update_examples() {
        let cfg = DetConfig::default();
        let mut m = WorkMeter::new();

        let mut g = DynamicGraph::new(3);
        g.insert_edge(0, 1).unwrap();
        let mut s = crate::mis::recompute_state(&g, [0, 2]);
        let mut ep = DetEpoch::start(&g, &cfg);
        let out = det_update(&mut g, &mut s, &mut ep, UpdateEvent::delete(0, 1), &mut m).unwrap();
        assert_eq!(out.added, vec![1]);

        let mut g = DynamicGraph::new(3);
        let mut s = crate::mis::recompute_state(&g, [1, 2]);
        let mut ep = DetEpoch::start(&g, &cfg);
        ep.remaining = 5;
        let out = det_update(&mut g, &mut s, &mut ep, UpdateEvent::insert(0, 1), &mut m).unwrap();
        assert_eq!(out, UpdateOutcome::default());
        assert_eq!(s.members(), vec![1, 2]);
        assert_eq!(ep.remaining, 4);

        // Degrees 2 and 7 after insertion: the degree-2 endpoint leaves.
        let mut g = DynamicGraph::new(12);
        for w in 2..8 {
            g.insert_edge(1, w).unwrap();
        }
        g.insert_edge(0, 8).unwrap();
        let mut s = crate::mis::recompute_state(&g, [0, 1, 9, 10, 11]);
        let mut ep = DetEpoch::start(&g, &cfg);
        ep.remaining = 1;
        let out = det_update(&mut g, &mut s, &mut ep, UpdateEvent::insert(0, 1), &mut m).unwrap();
        assert_eq!((g.degree(0), g.degree(1)), (2, 7));
        assert_eq!(out.removed, vec![0]);
        assert!(verify_mis(&g, &s).is_valid());
        assert!(matches!(
            det_update(&mut g, &mut s, &mut ep, UpdateEvent::insert(2, 3), &mut m),
            Err(MisError::Invariant(_))
        ));
    }
}
