//! Randomized epoch algorithm.
//!
//! Every `⌈√m0⌉` updates the MIS is rebuilt by the sequential greedy process
//! over a fresh uniformly random vertex order. High-degree vertices rarely
//! end up in such an MIS, so when an inserted edge joins two members the
//! endpoint outside the frozen high set is the one removed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{DynamicGraph, VertexId};
use crate::meter::WorkMeter;
use crate::mis::{
    apply_counter_update, greedy_mis, smaller_degree_endpoint, MisError, MisState, NoHook,
    UpdateOutcome,
};
use crate::stream::UpdateEvent;

use super::{ceil_sqrt, clamped_log2, EpochReport, MisAlgorithm, StepReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandConfig {
    pub c_high: f64,
    pub seed: u64,
}

impl RandConfig {
    pub const DEFAULT_C_HIGH: f64 = 200.0;

    pub fn with_seed(seed: u64) -> Self {
        Self { c_high: Self::DEFAULT_C_HIGH, seed }
    }
}

/// `c_high · √m · (max(1, log₂ m))^{1.5}`.
pub fn high_threshold(m: usize, c_high: f64) -> f64 {
    let m = m.max(1);
    c_high * (m as f64).sqrt() * clamped_log2(m).powf(1.5)
}

/// A vertex order together with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    /// Vertices in processing order.
    pub order: Vec<VertexId>,
    /// `position[v]` is the index of `v` in `order`.
    pub position: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { order: (0..n).collect(), position: (0..n).collect() }
    }

    pub fn from_order(order: Vec<VertexId>) -> Self {
        let mut position = vec![usize::MAX; order.len()];
        for (i, &v) in order.iter().enumerate() {
            assert!(position[v] == usize::MAX, "vertex {v} repeated");
            position[v] = i;
        }
        Self { order, position }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// ChaCha8 seeded with `seed`, stream `epoch_index`.
fn epoch_rng(seed: u64, epoch_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(epoch_index);
    rng
}

/// Uniform shuffle of `0..n`, a pure function of its arguments.
pub fn random_permutation(seed: u64, epoch_index: u64, n: usize) -> Permutation {
    let mut order: Vec<_> = (0..n).collect();
    order.shuffle(&mut epoch_rng(seed, epoch_index));
    Permutation::from_order(order)
}

/// Greedy MIS in `sigma` order.
pub fn build_random_mis(g: &DynamicGraph, sigma: &Permutation, meter: &mut WorkMeter) -> MisState {
    greedy_mis(g, &sigma.order, meter)
}

#[derive(Debug, Clone)]
pub struct RandEpoch {
    pub m0: usize,
    pub length: u64,
    pub rounds_left: u64,
    pub sigma: Permutation,
    pub threshold: f64,
    pub v_high: Vec<VertexId>,
    pub is_high: Vec<bool>,
}

impl RandEpoch {
    /// Epoch parameters on `g`, with the high set taken from current degrees.
    pub fn start(g: &DynamicGraph, sigma: Permutation, c_high: f64) -> Self {
        let m0 = g.edge_count().max(1);
        let length = ceil_sqrt(m0 as u64);
        let threshold = high_threshold(m0, c_high);
        let mut is_high = vec![false; g.n()];
        let v_high: Vec<_> = (0..g.n())
            .filter(|&v| g.degree(v) as f64 >= threshold)
            .collect();
        for &v in &v_high {
            is_high[v] = true;
        }
        Self { m0, length, rounds_left: length, sigma, threshold, v_high, is_high }
    }
}

/// Removal rule: the endpoint outside the high set if exactly one is,
/// otherwise the smaller degree, ties to the smaller id.
pub fn rand_removal(g: &DynamicGraph, is_high: &[bool], u: VertexId, v: VertexId) -> VertexId {
    match (is_high[u], is_high[v]) {
        (true, false) => v,
        (false, true) => u,
        _ => smaller_degree_endpoint(g, u, v),
    }
}

pub fn rand_update(
    g: &mut DynamicGraph,
    s: &mut MisState,
    epoch: &mut RandEpoch,
    e: UpdateEvent,
    meter: &mut WorkMeter,
) -> Result<UpdateOutcome, MisError> {
    if epoch.rounds_left == 0 {
        return Err(MisError::Invariant("rand epoch exhausted".into()));
    }
    let is_high = &epoch.is_high;
    let out = apply_counter_update(g, s, e, meter, &mut NoHook, |g, _, u, v| {
        rand_removal(g, is_high, u, v)
    })?;
    epoch.rounds_left -= 1;
    Ok(out)
}

/// Fraction of `trials` fresh random orders whose greedy MIS contains `w`.
pub fn estimate_high_degree_mis_probability(
    g: &DynamicGraph,
    w: VertexId,
    trials: u64,
    seed: u64,
) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut meter = WorkMeter::new();
    let mut order: Vec<_> = (0..g.n()).collect();
    let mut hits = 0u64;
    for _ in 0..trials {
        order.shuffle(&mut rng);
        if greedy_mis(g, &order, &mut meter).contains(w) {
            hits += 1;
        }
    }
    hits as f64 / trials as f64
}

pub struct RandMis {
    cfg: RandConfig,
    graph: DynamicGraph,
    state: MisState,
    epoch: RandEpoch,
    epoch_index: u64,
}

impl RandMis {
    pub fn new(n: usize, cfg: RandConfig) -> Self {
        let graph = DynamicGraph::new(n);
        let mut epoch = RandEpoch::start(&graph, Permutation::identity(n), cfg.c_high);
        epoch.rounds_left = 0;
        Self { cfg, state: MisState::new(n), graph, epoch, epoch_index: 0 }
    }

    pub fn epoch(&self) -> &RandEpoch {
        &self.epoch
    }

    fn rebuild(&mut self, meter: &mut WorkMeter) -> EpochReport {
        let start = *meter;
        let sigma = random_permutation(self.cfg.seed, self.epoch_index, self.graph.n());
        self.state = build_random_mis(&self.graph, &sigma, meter);
        self.epoch = RandEpoch::start(&self.graph, sigma, self.cfg.c_high);
        let report = EpochReport {
            index: self.epoch_index,
            m0: self.epoch.m0,
            length: Some(self.epoch.length),
            work: meter.since(&start),
            fallbacks: Vec::new(),
        };
        self.epoch_index += 1;
        report
    }
}

impl MisAlgorithm for RandMis {
    fn name(&self) -> &'static str {
        "rand"
    }

    fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    fn state(&self) -> &MisState {
        &self.state
    }

    fn initialize(&mut self, meter: &mut WorkMeter) -> Result<EpochReport, MisError> {
        Ok(self.rebuild(meter))
    }

    fn apply(&mut self, event: UpdateEvent, meter: &mut WorkMeter) -> Result<StepReport, MisError> {
        let mut report = StepReport::default();
        if self.epoch.rounds_left == 0 {
            report.epochs.push(self.rebuild(meter));
        }
        report.outcome = rand_update(&mut self.graph, &mut self.state, &mut self.epoch, event, meter)?;
        if report.outcome.removed.len() > 1 {
            return Err(MisError::Invariant("more than one removal in one update".into()));
        }
        Ok(report)
    }

    fn config(&self) -> Vec<(&'static str, String)> {
        vec![
            ("c_high", self.cfg.c_high.to_string()),
            ("seed", self.cfg.seed.to_string()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mis::{recompute_state, verify_mis};

    #[test]
    fn permutation_basics() {
        assert_eq!(random_permutation(9, 0, 1).order, vec![0]);
        assert!(random_permutation(9, 0, 0).is_empty());
        let a = random_permutation(5, 3, 50);
        assert_eq!(a, random_permutation(5, 3, 50));
        assert_ne!(a, random_permutation(5, 4, 50));
        for (i, &v) in a.order.iter().enumerate() {
            assert_eq!(a.position[v], i);
        }
    }

    #[test]
    fn build_examples() {
        let mut m = WorkMeter::new();
        let mut tri = DynamicGraph::new(3);
        for (u, v) in [(0, 1), (1, 2), (0, 2)] {
            tri.insert_edge(u, v).unwrap();
        }
        assert_eq!(build_random_mis(&tri, &Permutation::identity(3), &mut m).members(), vec![0]);
        let empty = DynamicGraph::new(5);
        let s = build_random_mis(&empty, &random_permutation(1, 0, 5), &mut m);
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn threshold_values() {
        assert_eq!(high_threshold(1, 200.0), 200.0);
        let t = high_threshold(1024, 200.0);
        assert!((t - 200.0 * 32.0 * 10f64.powf(1.5)).abs() < 1e-6);
    }

    fn epoch_with_high(g: &DynamicGraph, high: &[VertexId]) -> RandEpoch {
        let mut ep = RandEpoch::start(g, Permutation::identity(g.n()), 1e9);
        for &v in high {
            ep.is_high[v] = true;
            ep.v_high.push(v);
        }
        ep.rounds_left = 10;
        ep
    }

    #[test]
    fn removal_prefers_non_high() {
        let mut m = WorkMeter::new();
        let mut g = DynamicGraph::new(6);
        for w in 2..6 {
            g.insert_edge(1, w).unwrap();
        }
        let mut s = recompute_state(&g, [0, 1]);
        let mut ep = epoch_with_high(&g, &[0]);
        let out = rand_update(&mut g, &mut s, &mut ep, UpdateEvent::insert(0, 1), &mut m).unwrap();
        // Vertex 0 has the smaller degree but is high.
        assert_eq!(out.removed, vec![1]);
        assert!(verify_mis(&g, &s).is_valid());
        assert_eq!(ep.rounds_left, 9);
    }

    #[test]
    fn both_high_removes_smaller_degree() {
        let mut m = WorkMeter::new();
        let n = 2 + 300 + 250;
        let mut g = DynamicGraph::new(n);
        for i in 0..299 {
            g.insert_edge(0, 2 + i).unwrap();
        }
        for i in 0..249 {
            g.insert_edge(1, 302 + i).unwrap();
        }
        let mut s = recompute_state(&g, [0, 1, 301, 551]);
        let mut ep = epoch_with_high(&g, &[0, 1]);
        let out = rand_update(&mut g, &mut s, &mut ep, UpdateEvent::insert(0, 1), &mut m).unwrap();
        assert_eq!((g.degree(0), g.degree(1)), (300, 250));
        assert_eq!(out.removed, vec![1]);
    }

    #[test]
    fn single_member_endpoint_no_removal() {
        let mut m = WorkMeter::new();
        let mut g = DynamicGraph::new(3);
        g.insert_edge(1, 2).unwrap();
        let mut s = recompute_state(&g, [0, 2]);
        let mut ep = epoch_with_high(&g, &[]);
        let out = rand_update(&mut g, &mut s, &mut ep, UpdateEvent::insert(0, 1), &mut m).unwrap();
        assert_eq!(out, UpdateOutcome::default());
    }

    #[test]
    fn star_center_probability() {
        let d = 9;
        let mut g = DynamicGraph::new(d + 1);
        for leaf in 1..=d {
            g.insert_edge(0, leaf).unwrap();
        }
        let trials = 20_000;
        let p = estimate_high_degree_mis_probability(&g, 0, trials, 11);
        let exact = 1.0 / (d as f64 + 1.0);
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((p - exact).abs() < 5.0 * se, "{p}");
        assert_eq!(estimate_high_degree_mis_probability(&DynamicGraph::new(3), 1, 100, 0), 1.0);
    }
}
