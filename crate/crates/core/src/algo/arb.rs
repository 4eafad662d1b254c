//! Bounded-arboricity epoch algorithm.
//!
//! With `T = ⌈c_T·√(m0·log m0·λ)⌉`, each epoch serves `T` updates. At
//! reconstruction every high vertex (degree at least `c_high·T`) is given a
//! private MIS representative `f(v)` among its low-degree neighbors, chosen
//! through the leveling of [`stage1_levels`] so that representatives are
//! cheap. Representatives are never removed by the cheap path; when two of
//! them collide, one is dropped and its owner receives a replacement whose
//! MIS neighborhood has small total degree.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::graph::{DynamicGraph, VertexId};
use crate::meter::WorkMeter;
use crate::mis::{
    add_to_mis, cascade_add_with, greedy_mis, remove_from_mis, MembershipHook, MisError,
    MisState, UpdateOutcome,
};
use crate::stream::{UpdateEvent, UpdateKind};

use super::{clamped_log2, EpochReport, Fallback, MisAlgorithm, Ratio, StepReport};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArbConfig {
    /// Assumed arboricity bound.
    pub lambda: usize,
    pub c_t: f64,
    pub c_high: f64,
    pub c_replace: f64,
    pub c_feasible: f64,
}

impl ArbConfig {
    pub const DEFAULT_C_T: f64 = 1.0;
    pub const DEFAULT_C_HIGH: f64 = 20.0;
    pub const DEFAULT_C_REPLACE: f64 = 22.0;
    pub const DEFAULT_C_FEASIBLE: f64 = 5.0;

    pub fn new(lambda: usize) -> Self {
        Self {
            lambda,
            c_t: Self::DEFAULT_C_T,
            c_high: Self::DEFAULT_C_HIGH,
            c_replace: Self::DEFAULT_C_REPLACE,
            c_feasible: Self::DEFAULT_C_FEASIBLE,
        }
    }

    /// Whether every scale is at its default.
    pub fn is_default_scale(&self) -> bool {
        self.c_t == Self::DEFAULT_C_T
            && self.c_high == Self::DEFAULT_C_HIGH
            && self.c_replace == Self::DEFAULT_C_REPLACE
            && self.c_feasible == Self::DEFAULT_C_FEASIBLE
    }

    /// Upper bound on the replace-cost of an acceptable replacement.
    pub fn replace_bound(&self, t: usize) -> f64 {
        self.c_replace * self.lambda as f64 * t as f64
    }
}

/// `⌈c_T · √(m · max(1, log₂ m) · λ)⌉`, at least 1.
pub fn compute_t(m: usize, lambda: usize, c_t: f64) -> usize {
    let m = m.max(1);
    let x = c_t * (m as f64 * clamped_log2(m) * lambda.max(1) as f64).sqrt();
    (x.ceil() as usize).max(1)
}

/// One Stage 1 iteration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stage1Iteration {
    /// `K_i`, ascending.
    pub remaining: Vec<VertexId>,
    /// `unitcost_i(u)` for every `u ∈ A*` with a neighbor in `K_i`, ascending by `u`.
    pub unitcost: Vec<(VertexId, Ratio)>,
    /// Lower median `p(v)` for every `v ∈ K_i` with a neighbor in `A*`.
    pub median: Vec<(VertexId, Ratio)>,
    /// `L_i`, ascending.
    pub leveled: Vec<VertexId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stage1Trace {
    pub iterations: Vec<Stage1Iteration>,
}

#[derive(Debug, Clone, Default)]
pub struct Stage1 {
    /// 1-based level of each vertex, `None` outside the high set.
    pub level: Vec<Option<usize>>,
    /// Candidate lists ordered by `(unitcost, id)`.
    pub candidates: Vec<Vec<VertexId>>,
    pub trace: Stage1Trace,
}

/// Vertices of `high` left without a level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelingStalled {
    pub iteration: usize,
    pub remaining: Vec<VertexId>,
}

/// Stage 1 leveling over `max(1, ⌈log₂ m⌉)` iterations.
///
/// `high` must be ascending; `in_a` marks `A* = N(high) ∖ high`.
pub fn stage1_levels(
    g: &DynamicGraph,
    high: &[VertexId],
    in_a: &[bool],
    m: usize,
    t: usize,
    meter: &mut WorkMeter,
) -> Result<Stage1, LevelingStalled> {
    let n = g.n();
    let mut out = Stage1 {
        level: vec![None; n],
        candidates: vec![Vec::new(); n],
        trace: Stage1Trace::default(),
    };
    if high.is_empty() {
        return Ok(out);
    }
    let m = m.max(1);
    let iterations = (m as f64).log2().ceil().max(1.0) as usize;
    let mut k_count = vec![0usize; n];
    let mut remaining: Vec<VertexId> = high.to_vec();
    for i in 1..=iterations {
        if remaining.is_empty() {
            break;
        }
        let mut it = Stage1Iteration { remaining: remaining.clone(), ..Default::default() };
        let mut touched = BTreeSet::new();
        for &v in &remaining {
            meter.visit(g.degree(v));
            for u in g.neighbors(v) {
                if in_a[u] {
                    k_count[u] += 1;
                    touched.insert(u);
                }
            }
        }
        let unitcost = |u: VertexId| Ratio::new(g.degree(u), k_count[u]);
        it.unitcost = touched.iter().map(|&u| (u, unitcost(u))).collect();

        let k_size = remaining.len();
        let mut next = Vec::new();
        for &v in &remaining {
            meter.visit(g.degree(v));
            let mut costs: Vec<(Ratio, VertexId)> = g
                .neighbors(v)
                .filter(|&u| in_a[u])
                .map(|u| (unitcost(u), u))
                .collect();
            if costs.is_empty() {
                next.push(v);
                continue;
            }
            costs.sort_unstable();
            let p = costs[(costs.len() - 1) / 2].0;
            it.median.push((v, p));
            // p ≤ m / (|K_i|·T), cross-multiplied.
            let leveled = (p.num as u128) * (k_size as u128) * (t as u128)
                <= (m as u128) * (p.den as u128);
            if leveled {
                out.level[v] = Some(i);
                out.candidates[v] = costs
                    .iter()
                    .take_while(|(c, _)| *c <= p)
                    .map(|&(_, u)| u)
                    .collect();
                it.leveled.push(v);
            } else {
                next.push(v);
            }
        }
        for &u in &touched {
            k_count[u] = 0;
        }
        let stalled = it.leveled.is_empty();
        out.trace.iterations.push(it);
        remaining = next;
        if stalled {
            return Err(LevelingStalled { iteration: i, remaining });
        }
    }
    if !remaining.is_empty() {
        return Err(LevelingStalled { iteration: iterations, remaining });
    }
    Ok(out)
}

/// Representative assignment with its bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Injection {
    /// `f[v]` for high `v`.
    pub f: Vec<Option<VertexId>>,
    /// `preimage[u] = Some(v)` iff `f(v) = u`.
    pub preimage: Vec<Option<VertexId>>,
    /// `fcount[u] = |N(u) ∩ image(f)|` for every vertex.
    pub fcount: Vec<usize>,
    /// `Σ deg(f(v))` at assignment time.
    pub degree_sum: usize,
}

impl Injection {
    fn empty(n: usize) -> Self {
        Self { f: vec![None; n], preimage: vec![None; n], fcount: vec![0; n], degree_sum: 0 }
    }

    fn assign(&mut self, g: &DynamicGraph, x: VertexId, y: VertexId, meter: &mut WorkMeter) {
        self.f[x] = Some(y);
        self.preimage[y] = Some(x);
        meter.visit(g.degree(y));
        meter.mutate(g.degree(y));
        for w in g.neighbors(y) {
            self.fcount[w] += 1;
        }
    }

    fn unassign(&mut self, g: &DynamicGraph, x: VertexId, meter: &mut WorkMeter) -> Option<VertexId> {
        let y = self.f[x].take()?;
        self.preimage[y] = None;
        meter.visit(g.degree(y));
        meter.mutate(g.degree(y));
        for w in g.neighbors(y) {
            self.fcount[w] -= 1;
        }
        Some(y)
    }

    pub fn in_image(&self, u: VertexId) -> bool {
        self.preimage[u].is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectionStuck {
    pub vertex: VertexId,
}

/// Greedy assignment in ascending `(level, id)` order: each high vertex
/// takes its first candidate that is still adjacent, outside the image, and
/// has no neighbor in the image.
pub fn choose_injection(
    g: &DynamicGraph,
    high: &[VertexId],
    stage: &Stage1,
    meter: &mut WorkMeter,
) -> Result<Injection, InjectionStuck> {
    let mut inj = Injection::empty(g.n());
    let mut order: Vec<_> = high.iter().map(|&v| (stage.level[v], v)).collect();
    order.sort_unstable();
    for (_, v) in order {
        let mut chosen = None;
        for &u in &stage.candidates[v] {
            meter.visit(1);
            if g.has_edge(v, u) && inj.fcount[u] == 0 && !inj.in_image(u) {
                chosen = Some(u);
                break;
            }
        }
        let u = chosen.ok_or(InjectionStuck { vertex: v })?;
        inj.degree_sum += g.degree(u);
        inj.assign(g, v, u, meter);
    }
    Ok(inj)
}

/// Frozen per-epoch structures plus the running information.
#[derive(Debug, Clone)]
pub struct ArbEpoch {
    pub m0: usize,
    pub t: usize,
    pub length: u64,
    pub rounds_left: u64,
    pub v_high: Vec<VertexId>,
    pub is_high: Vec<bool>,
    pub in_a: Vec<bool>,
    pub level: Vec<Option<usize>>,
    pub candidates: Vec<Vec<VertexId>>,
    pub inj: Injection,
    /// `Σ_{u ∈ N(v) ∩ M} deg(u)` for `v ∈ A*`; zero elsewhere.
    pub replace_cost: Vec<usize>,
    pub trace: Stage1Trace,
}

impl ArbEpoch {
    fn degraded(g: &DynamicGraph, m0: usize, t: usize) -> Self {
        let n = g.n();
        Self {
            m0,
            t,
            length: 1,
            rounds_left: 1,
            v_high: Vec::new(),
            is_high: vec![false; n],
            in_a: vec![false; n],
            level: vec![None; n],
            candidates: vec![Vec::new(); n],
            inj: Injection::empty(n),
            replace_cost: vec![0; n],
            trace: Stage1Trace::default(),
        }
    }

    pub fn f(&self, v: VertexId) -> Option<VertexId> {
        self.inj.f[v]
    }

    pub fn fcount(&self, u: VertexId) -> usize {
        self.inj.fcount[u]
    }

    pub fn in_image(&self, u: VertexId) -> bool {
        self.inj.in_image(u)
    }
}

/// Keeps `replace_cost` in step with membership changes.
struct CostHook<'a> {
    in_a: &'a [bool],
    replace_cost: &'a mut [usize],
}

impl MembershipHook for CostHook<'_> {
    fn joined(&mut self, g: &DynamicGraph, _: &MisState, v: VertexId, meter: &mut WorkMeter) {
        let d = g.degree(v);
        for w in g.neighbors(v) {
            if self.in_a[w] {
                self.replace_cost[w] += d;
                meter.mutate(1);
            }
        }
    }

    fn left(&mut self, g: &DynamicGraph, _: &MisState, v: VertexId, meter: &mut WorkMeter) {
        let d = g.degree(v);
        for w in g.neighbors(v) {
            if self.in_a[w] {
                self.replace_cost[w] -= d;
                meter.mutate(1);
            }
        }
    }
}

/// Result of a reconstruction.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub state: MisState,
    pub epoch: ArbEpoch,
    pub fallbacks: Vec<Fallback>,
}

/// Full reconstruction: leveling, injection, image-first greedy completion.
/// Falls back to plain greedy with an empty high set when leveling stalls or
/// the injection gets stuck.
pub fn arb_reconstruct(g: &DynamicGraph, cfg: &ArbConfig, meter: &mut WorkMeter) -> Reconstruction {
    let n = g.n();
    let m0 = g.edge_count().max(1);
    let t = compute_t(m0, cfg.lambda, cfg.c_t);
    let threshold = cfg.c_high * t as f64;
    let v_high: Vec<_> = (0..n).filter(|&v| g.degree(v) as f64 >= threshold).collect();
    let mut is_high = vec![false; n];
    for &v in &v_high {
        is_high[v] = true;
    }
    let mut in_a = vec![false; n];
    for &v in &v_high {
        meter.visit(g.degree(v));
        for u in g.neighbors(v) {
            if !is_high[u] {
                in_a[u] = true;
            }
        }
    }

    let degraded = |fallback: Fallback, meter: &mut WorkMeter| {
        let order: Vec<_> = (0..n).collect();
        Reconstruction {
            state: greedy_mis(g, &order, meter),
            epoch: ArbEpoch::degraded(g, m0, t),
            fallbacks: vec![fallback],
        }
    };
    let stage = match stage1_levels(g, &v_high, &in_a, m0, t, meter) {
        Ok(stage) => stage,
        Err(_) => return degraded(Fallback::LevelingStalled, meter),
    };
    let inj = match choose_injection(g, &v_high, &stage, meter) {
        Ok(inj) => inj,
        Err(_) => return degraded(Fallback::InjectionStuck, meter),
    };

    let mut state = MisState::new(n);
    for &v in &v_high {
        let y = inj.f[v].expect("every high vertex is assigned");
        add_to_mis(g, &mut state, y, meter).expect("image is independent");
    }
    for v in 0..n {
        if !state.contains(v) && state.counter(v) == 0 {
            add_to_mis(g, &mut state, v, meter).expect("greedy preconditions hold");
        }
    }
    let mut replace_cost = vec![0; n];
    for v in 0..n {
        if state.contains(v) {
            let d = g.degree(v);
            meter.visit(d);
            for w in g.neighbors(v) {
                if in_a[w] {
                    replace_cost[w] += d;
                    meter.mutate(1);
                }
            }
        }
    }
    let epoch = ArbEpoch {
        m0,
        t,
        length: t as u64,
        rounds_left: t as u64,
        v_high,
        is_high,
        in_a,
        level: stage.level,
        candidates: stage.candidates,
        inj,
        replace_cost,
        trace: stage.trace,
    };
    Reconstruction { state, epoch, fallbacks: Vec::new() }
}

/// Outcome of one replacement scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplacementScan {
    pub chosen: Option<VertexId>,
    /// Feasible entries (adjacent, outside the image, fcount 0) in the whole list.
    pub feasible: usize,
    pub scanned: usize,
}

/// Scans `candidates[x]` in order for the first feasible entry with
/// replace-cost at most `bound`.
pub fn find_replacement(
    g: &DynamicGraph,
    ep: &ArbEpoch,
    x: VertexId,
    bound: f64,
    meter: &mut WorkMeter,
) -> ReplacementScan {
    let mut scan = ReplacementScan { chosen: None, feasible: 0, scanned: 0 };
    for &y in &ep.candidates[x] {
        let feasible = g.has_edge(x, y) && ep.inj.fcount[y] == 0 && !ep.inj.in_image(y);
        if scan.chosen.is_none() {
            scan.scanned += 1;
            meter.visit(1);
            if feasible && ep.replace_cost[y] as f64 <= bound {
                scan.chosen = Some(y);
            }
        }
        if feasible {
            scan.feasible += 1;
        }
    }
    scan
}

/// What one update did beyond membership changes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArbStep {
    pub outcome: UpdateOutcome,
    /// Replacement scans performed, with their feasible counts.
    pub scans: Vec<ReplacementScan>,
    /// A representative was lost and no replacement qualified; the state is
    /// mid-repair and must be rebuilt.
    pub needs_rebuild: bool,
    /// `Σ deg` over vertices that left `M`.
    pub removed_degree_sum: usize,
    /// Largest degree among vertices that left `M`.
    pub removed_degree_max: usize,
}

/// Lost representative of `x`: find a replacement and force it into `M`.
fn reassign(
    g: &DynamicGraph,
    s: &mut MisState,
    ep: &mut ArbEpoch,
    cfg: &ArbConfig,
    x: VertexId,
    step: &mut ArbStep,
    frontier: &mut Vec<VertexId>,
    meter: &mut WorkMeter,
) -> Result<(), MisError> {
    let scan = find_replacement(g, ep, x, cfg.replace_bound(ep.t), meter);
    step.scans.push(scan);
    let Some(y) = scan.chosen else {
        step.needs_rebuild = true;
        return Ok(());
    };
    if !s.contains(y) {
        meter.visit(g.degree(y));
        let blockers: Vec<_> = g.neighbors(y).filter(|&w| s.contains(w)).collect();
        let mut hook = CostHook { in_a: &ep.in_a, replace_cost: &mut ep.replace_cost };
        for w in blockers {
            if ep.inj.in_image(w) {
                return Err(MisError::Invariant(format!(
                    "replacement {y} for {x} blocked by representative {w}"
                )));
            }
            remove_from_mis(g, s, w, meter)?;
            hook.left(g, s, w, meter);
            step.outcome.removed.push(w);
            frontier.extend(g.neighbors(w));
        }
        add_to_mis(g, s, y, meter)?;
        hook.joined(g, s, y, meter);
        step.outcome.added.push(y);
    }
    ep.inj.assign(g, x, y, meter);
    Ok(())
}

/// Applies `e` and restores the MIS, Invariant 2, and all running counts.
pub fn arb_update(
    g: &mut DynamicGraph,
    s: &mut MisState,
    ep: &mut ArbEpoch,
    cfg: &ArbConfig,
    e: UpdateEvent,
    meter: &mut WorkMeter,
) -> Result<ArbStep, MisError> {
    if ep.rounds_left == 0 {
        return Err(MisError::Invariant("arb epoch exhausted".into()));
    }
    let (u, v) = (e.u, e.v);
    e.apply(g)?;
    let g = &*g;
    ep.rounds_left -= 1;
    let insert = e.kind == UpdateKind::Insert;

    // Counters, fcount, and replace-cost for the edge itself and for the
    // degree change of member endpoints.
    for (a, b) in [(u, v), (v, u)] {
        if s.contains(a) {
            if insert {
                s.counter_inc(b);
            } else {
                s.counter_dec(b)?;
            }
            meter.mutate(1);
            let d = g.degree(a);
            meter.visit(d);
            for w in g.neighbors(a) {
                if ep.in_a[w] && w != b {
                    if insert {
                        ep.replace_cost[w] += 1;
                    } else {
                        ep.replace_cost[w] -= 1;
                    }
                    meter.mutate(1);
                }
            }
            if ep.in_a[b] {
                if insert {
                    ep.replace_cost[b] += d;
                } else {
                    ep.replace_cost[b] -= d + 1;
                }
                meter.mutate(1);
            }
        }
        if ep.inj.in_image(a) {
            if insert {
                ep.inj.fcount[b] += 1;
            } else {
                ep.inj.fcount[b] -= 1;
            }
            meter.mutate(1);
        }
    }

    let mut step = ArbStep::default();
    let mut frontier: Vec<VertexId> = Vec::new();
    if insert {
        if s.contains(u) && s.contains(v) {
            let (iu, iv) = (ep.inj.in_image(u), ep.inj.in_image(v));
            let smaller = |a: VertexId, b: VertexId| {
                if (g.degree(a), a) <= (g.degree(b), b) {
                    a
                } else {
                    b
                }
            };
            let z = match (iu, iv) {
                (false, true) => u,
                (true, false) => v,
                _ => smaller(u, v),
            };
            let owner = if iu && iv { ep.inj.preimage[z] } else { None };
            if let Some(x) = owner {
                ep.inj.unassign(g, x, meter);
            }
            remove_from_mis(g, s, z, meter)?;
            CostHook { in_a: &ep.in_a, replace_cost: &mut ep.replace_cost }.left(g, s, z, meter);
            step.outcome.removed.push(z);
            frontier.extend(g.neighbors(z));
            if let Some(x) = owner {
                reassign(g, s, ep, cfg, x, &mut step, &mut frontier, meter)?;
            }
        }
    } else {
        let lost = [(u, v), (v, u)]
            .into_iter()
            .find(|&(x, y)| ep.inj.f[x] == Some(y));
        if let Some((x, _)) = lost {
            ep.inj.unassign(g, x, meter);
            reassign(g, s, ep, cfg, x, &mut step, &mut frontier, meter)?;
        }
        for w in [u, v] {
            if !s.contains(w) && s.counter(w) == 0 {
                frontier.push(w);
            }
        }
    }
    if step.needs_rebuild {
        return Ok(step);
    }
    if !frontier.is_empty() {
        let mut hook = CostHook { in_a: &ep.in_a, replace_cost: &mut ep.replace_cost };
        let added = cascade_add_with(g, s, frontier, meter, &mut hook)?;
        step.outcome.added.extend(added);
    }
    for &x in &step.outcome.removed {
        step.removed_degree_sum += g.degree(x);
        step.removed_degree_max = step.removed_degree_max.max(g.degree(x));
    }
    Ok(step)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ArbStats {
    pub epochs: u64,
    pub leveling_stalled: u64,
    pub injection_stuck: u64,
    pub replacement_not_found: u64,
    /// Replacement scans after a representative collision.
    pub collision_replacements: u64,
    /// Replacement scans after a representative edge was deleted.
    pub deletion_reassignments: u64,
    /// Feasible-entry counts observed at each scan.
    pub feasible_counts: Vec<usize>,
    /// Smallest `feasible / T` ratio seen, if any scan happened.
    pub min_feasible_over_t: Option<f64>,
    /// `(Σ deg f(v), T)` for every successful reconstruction with a non-empty high set.
    pub injection_degree_sums: Vec<(usize, usize)>,
    pub max_removed_degree_sum: usize,
    /// Updates whose removed-degree sum exceeded `c_replace·λ·T` plus the
    /// largest single removed degree.
    pub removed_degree_violations: u64,
    pub max_high_set: usize,
}

pub struct ArbMis {
    cfg: ArbConfig,
    graph: DynamicGraph,
    state: MisState,
    epoch: ArbEpoch,
    epoch_index: u64,
    stats: ArbStats,
}

impl ArbMis {
    pub fn new(n: usize, cfg: ArbConfig) -> Self {
        let graph = DynamicGraph::new(n);
        let mut epoch = ArbEpoch::degraded(&graph, 1, 1);
        epoch.rounds_left = 0;
        Self {
            cfg,
            state: MisState::new(n),
            graph,
            epoch,
            epoch_index: 0,
            stats: ArbStats::default(),
        }
    }

    pub fn epoch(&self) -> &ArbEpoch {
        &self.epoch
    }

    pub fn stats(&self) -> &ArbStats {
        &self.stats
    }

    fn rebuild(&mut self, mut fallbacks: Vec<Fallback>, meter: &mut WorkMeter) -> EpochReport {
        let start = *meter;
        let r = arb_reconstruct(&self.graph, &self.cfg, meter);
        for f in &r.fallbacks {
            match f {
                Fallback::LevelingStalled => self.stats.leveling_stalled += 1,
                Fallback::InjectionStuck => self.stats.injection_stuck += 1,
                _ => {}
            }
        }
        if r.fallbacks.is_empty() && !r.epoch.v_high.is_empty() {
            self.stats.injection_degree_sums.push((r.epoch.inj.degree_sum, r.epoch.t));
        }
        self.stats.max_high_set = self.stats.max_high_set.max(r.epoch.v_high.len());
        fallbacks.extend(r.fallbacks);
        self.state = r.state;
        self.epoch = r.epoch;
        let report = EpochReport {
            index: self.epoch_index,
            m0: self.epoch.m0,
            length: Some(self.epoch.length),
            work: meter.since(&start),
            fallbacks,
        };
        self.epoch_index += 1;
        self.stats.epochs += 1;
        report
    }
}

impl MisAlgorithm for ArbMis {
    fn name(&self) -> &'static str {
        "arb"
    }

    fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    fn state(&self) -> &MisState {
        &self.state
    }

    fn initialize(&mut self, meter: &mut WorkMeter) -> Result<EpochReport, MisError> {
        Ok(self.rebuild(Vec::new(), meter))
    }

    fn apply(&mut self, event: UpdateEvent, meter: &mut WorkMeter) -> Result<StepReport, MisError> {
        let mut report = StepReport::default();
        if self.epoch.rounds_left == 0 {
            report.epochs.push(self.rebuild(Vec::new(), meter));
        }
        let before = self.state.clone();
        let step = arb_update(
            &mut self.graph,
            &mut self.state,
            &mut self.epoch,
            &self.cfg,
            event,
            meter,
        )?;
        for scan in &step.scans {
            if event.kind == UpdateKind::Insert {
                self.stats.collision_replacements += 1;
            } else {
                self.stats.deletion_reassignments += 1;
            }
            self.stats.feasible_counts.push(scan.feasible);
            let ratio = scan.feasible as f64 / self.epoch.t as f64;
            self.stats.min_feasible_over_t =
                Some(self.stats.min_feasible_over_t.map_or(ratio, |r| r.min(ratio)));
        }
        if step.needs_rebuild {
            self.stats.replacement_not_found += 1;
            report.epochs.push(self.rebuild(vec![Fallback::ReplacementNotFound], meter));
            // Net membership change across the repair.
            let n = self.graph.n();
            report.outcome = UpdateOutcome {
                added: (0..n).filter(|&v| self.state.contains(v) && !before.contains(v)).collect(),
                removed: (0..n).filter(|&v| !self.state.contains(v) && before.contains(v)).collect(),
            };
            return Ok(report);
        }
        self.stats.max_removed_degree_sum =
            self.stats.max_removed_degree_sum.max(step.removed_degree_sum);
        let bound = self.cfg.replace_bound(self.epoch.t) + step.removed_degree_max as f64;
        if step.removed_degree_sum as f64 > bound {
            self.stats.removed_degree_violations += 1;
        }
        report.outcome = step.outcome;
        Ok(report)
    }

    fn check_invariants(&self) -> Result<(), String> {
        let g = &self.graph;
        let ep = &self.epoch;
        let s = &self.state;
        for &x in &ep.v_high {
            let y = ep.inj.f[x].ok_or_else(|| format!("high vertex {x} has no representative"))?;
            if !s.contains(y) {
                return Err(format!("representative {y} of {x} not in M"));
            }
            if !g.has_edge(x, y) {
                return Err(format!("representative {y} of {x} not adjacent"));
            }
            if !ep.candidates[x].contains(&y) {
                return Err(format!("representative {y} of {x} not a candidate"));
            }
            if ep.inj.preimage[y] != Some(x) {
                return Err(format!("representative {y} shared or unlinked"));
            }
            if s.counter(x) == 0 {
                return Err(format!("high vertex {x} has no MIS neighbor"));
            }
        }
        for y in 0..g.n() {
            if let Some(x) = ep.inj.preimage[y] {
                if ep.inj.f[x] != Some(y) {
                    return Err(format!("stale preimage at {y}"));
                }
            }
            let fc = g.neighbors(y).filter(|&w| ep.inj.in_image(w)).count();
            if fc != ep.inj.fcount[y] {
                return Err(format!("fcount of {y}: stored {}, actual {fc}", ep.inj.fcount[y]));
            }
            if ep.in_a[y] {
                let rc: usize = g.neighbors(y).filter(|&w| s.contains(w)).map(|w| g.degree(w)).sum();
                if rc != ep.replace_cost[y] {
                    return Err(format!(
                        "replace-cost of {y}: stored {}, actual {rc}",
                        ep.replace_cost[y]
                    ));
                }
            }
        }
        if self.stats.removed_degree_violations > 0 {
            return Err(format!(
                "{} updates above the removed-degree bound",
                self.stats.removed_degree_violations
            ));
        }
        Ok(())
    }

    fn config(&self) -> Vec<(&'static str, String)> {
        vec![
            ("lambda", self.cfg.lambda.to_string()),
            ("c_T", self.cfg.c_t.to_string()),
            ("c_high", self.cfg.c_high.to_string()),
            ("c_replace", self.cfg.c_replace.to_string()),
            ("c_feasible", self.cfg.c_feasible.to_string()),
        ]
    }
}
