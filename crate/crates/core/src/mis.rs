//! MIS membership with per-vertex MIS-counters, the shared add/remove/cascade
//! primitives, sequential greedy construction, and the naive baseline update.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{DynamicGraph, GraphError, VertexId};
use crate::meter::WorkMeter;
use crate::stream::{UpdateEvent, UpdateKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MisError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Membership flags plus `counter[v] = |N(v) ∩ M|`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MisState {
    in_mis: Vec<bool>,
    counter: Vec<usize>,
    size: usize,
}

impl MisState {
    pub fn new(n: usize) -> Self {
        Self {
            in_mis: vec![false; n],
            counter: vec![0; n],
            size: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.in_mis.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.in_mis[v]
    }

    pub fn counter(&self, v: VertexId) -> usize {
        self.counter[v]
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Members in ascending order.
    pub fn members(&self) -> Vec<VertexId> {
        (0..self.n()).filter(|&v| self.in_mis[v]).collect()
    }

    /// `Φ = −Σ_v counter[v]`.
    pub fn phi(&self) -> i64 {
        -(self.counter.iter().sum::<usize>() as i64)
    }

    pub(crate) fn counter_inc(&mut self, v: VertexId) {
        self.counter[v] += 1;
    }

    pub(crate) fn counter_dec(&mut self, v: VertexId) -> Result<(), MisError> {
        match self.counter[v].checked_sub(1) {
            Some(c) => {
                self.counter[v] = c;
                Ok(())
            }
            None => Err(MisError::Invariant(format!("counter of {v} underflow"))),
        }
    }
}

/// Builds a state with the given members and counters recomputed from
/// scratch. Does not check that `members` is an MIS.
pub fn recompute_state(g: &DynamicGraph, members: impl IntoIterator<Item = VertexId>) -> MisState {
    let mut s = MisState::new(g.n());
    for v in members {
        if !s.in_mis[v] {
            s.in_mis[v] = true;
            s.size += 1;
        }
    }
    for v in 0..g.n() {
        s.counter[v] = g.neighbors(v).filter(|&w| s.in_mis[w]).count();
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    IndependenceViolation(VertexId, VertexId),
    MaximalityViolation(VertexId),
    CounterMismatch(VertexId),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Valid => write!(f, "valid"),
            Verdict::IndependenceViolation(u, v) => write!(f, "independence violated by edge ({u}, {v})"),
            Verdict::MaximalityViolation(v) => write!(f, "maximality violated at vertex {v}"),
            Verdict::CounterMismatch(v) => write!(f, "MIS-counter mismatch at vertex {v}"),
        }
    }
}

/// Full oracle check: independence, then maximality, then exact counters.
///
/// Each check reports its first witness in ascending vertex / edge order.
/// Independent of the counters it is checking.
pub fn verify_mis(g: &DynamicGraph, s: &MisState) -> Verdict {
    let n = g.n();
    if s.n() != n {
        return Verdict::CounterMismatch(n.min(s.n()));
    }
    let mut true_count = vec![0usize; n];
    let mut first_edge: Option<(VertexId, VertexId)> = None;
    for u in 0..n {
        for v in g.neighbors(u) {
            if s.in_mis[v] {
                true_count[u] += 1;
                if s.in_mis[u] && u < v && first_edge.map_or(true, |e| (u, v) < e) {
                    first_edge = Some((u, v));
                }
            }
        }
    }
    if let Some((u, v)) = first_edge {
        return Verdict::IndependenceViolation(u, v);
    }
    if let Some(v) = (0..n).find(|&v| !s.in_mis[v] && true_count[v] == 0) {
        return Verdict::MaximalityViolation(v);
    }
    if let Some(v) = (0..n).find(|&v| s.counter[v] != true_count[v]) {
        return Verdict::CounterMismatch(v);
    }
    if s.size != s.in_mis.iter().filter(|&&b| b).count() {
        return Verdict::CounterMismatch(0);
    }
    Verdict::Valid
}

/// Side effects attached to membership changes (e.g. extra per-neighbor
/// bookkeeping). Called after the state has been updated.
pub trait MembershipHook {
    fn joined(&mut self, g: &DynamicGraph, s: &MisState, v: VertexId, meter: &mut WorkMeter);
    fn left(&mut self, g: &DynamicGraph, s: &MisState, v: VertexId, meter: &mut WorkMeter);
}

/// Hook that does nothing.
pub struct NoHook;

impl MembershipHook for NoHook {
    fn joined(&mut self, _: &DynamicGraph, _: &MisState, _: VertexId, _: &mut WorkMeter) {}
    fn left(&mut self, _: &DynamicGraph, _: &MisState, _: VertexId, _: &mut WorkMeter) {}
}

pub fn add_to_mis(
    g: &DynamicGraph,
    s: &mut MisState,
    v: VertexId,
    meter: &mut WorkMeter,
) -> Result<(), MisError> {
    if s.in_mis[v] {
        return Err(MisError::Invariant(format!("add: {v} already in M")));
    }
    if s.counter[v] != 0 {
        return Err(MisError::Invariant(format!(
            "add: {v} has {} MIS neighbors",
            s.counter[v]
        )));
    }
    s.in_mis[v] = true;
    s.size += 1;
    let d = g.degree(v);
    for w in g.neighbors(v) {
        s.counter[w] += 1;
    }
    meter.visit(d);
    meter.mutate(d);
    meter.flip();
    Ok(())
}

pub fn remove_from_mis(
    g: &DynamicGraph,
    s: &mut MisState,
    v: VertexId,
    meter: &mut WorkMeter,
) -> Result<(), MisError> {
    if !s.in_mis[v] {
        return Err(MisError::Invariant(format!("remove: {v} not in M")));
    }
    s.in_mis[v] = false;
    s.size -= 1;
    let d = g.degree(v);
    for w in g.neighbors(v) {
        s.counter_dec(w)?;
    }
    meter.visit(d);
    meter.mutate(d);
    meter.flip();
    Ok(())
}

/// Adds every reachable zero-counter vertex, scanning the frontier in
/// ascending id order. Returns the added vertices in insertion order.
pub fn cascade_add(
    g: &DynamicGraph,
    s: &mut MisState,
    frontier: impl IntoIterator<Item = VertexId>,
    meter: &mut WorkMeter,
) -> Result<Vec<VertexId>, MisError> {
    cascade_add_with(g, s, frontier, meter, &mut NoHook)
}

pub fn cascade_add_with<H: MembershipHook + ?Sized>(
    g: &DynamicGraph,
    s: &mut MisState,
    frontier: impl IntoIterator<Item = VertexId>,
    meter: &mut WorkMeter,
    hook: &mut H,
) -> Result<Vec<VertexId>, MisError> {
    let mut queue: BTreeSet<VertexId> = frontier.into_iter().collect();
    let mut added = Vec::new();
    while let Some(v) = queue.pop_first() {
        if s.in_mis[v] || s.counter[v] != 0 {
            continue;
        }
        add_to_mis(g, s, v, meter)?;
        hook.joined(g, s, v, meter);
        added.push(v);
        // Same adjacency pass as the counter increments above; not re-charged.
        queue.extend(g.neighbors(v));
    }
    Ok(added)
}

/// Sequential greedy MIS: scan `order`, take every vertex with no MIS
/// neighbor yet.
pub fn greedy_mis(g: &DynamicGraph, order: &[VertexId], meter: &mut WorkMeter) -> MisState {
    let mut s = MisState::new(g.n());
    for &v in order {
        if !s.in_mis[v] && s.counter[v] == 0 {
            add_to_mis(g, &mut s, v, meter).expect("greedy preconditions hold");
        }
    }
    s
}

/// Membership changes caused by one update.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UpdateOutcome {
    pub added: Vec<VertexId>,
    pub removed: Vec<VertexId>,
}

/// Endpoint with the smaller current degree, ties to the smaller id.
pub fn smaller_degree_endpoint(g: &DynamicGraph, u: VertexId, v: VertexId) -> VertexId {
    if (g.degree(u), u) <= (g.degree(v), v) {
        u
    } else {
        v
    }
}

/// Applies `e` to the graph and restores a valid state.
///
/// Deletion with one endpoint in `M` decrements the other's counter and
/// adds it when it reaches zero. Insertion between two members removes the
/// endpoint picked by `choose_removal` and cascades over its neighbors.
pub fn apply_counter_update<H, F>(
    g: &mut DynamicGraph,
    s: &mut MisState,
    e: UpdateEvent,
    meter: &mut WorkMeter,
    hook: &mut H,
    choose_removal: F,
) -> Result<UpdateOutcome, MisError>
where
    H: MembershipHook + ?Sized,
    F: FnOnce(&DynamicGraph, &MisState, VertexId, VertexId) -> VertexId,
{
    let (u, v) = (e.u, e.v);
    let mut out = UpdateOutcome::default();
    match e.kind {
        UpdateKind::Delete => {
            g.delete_edge(u, v)?;
            let (iu, iv) = (s.in_mis[u], s.in_mis[v]);
            if iu && iv {
                return Err(MisError::Invariant(format!("edge ({u}, {v}) inside M")));
            }
            let other = if iu {
                v
            } else if iv {
                u
            } else {
                return Ok(out);
            };
            s.counter_dec(other)?;
            meter.mutate(1);
            if s.counter[other] == 0 {
                out.added = cascade_add_with(g, s, [other], meter, hook)?;
            }
        }
        UpdateKind::Insert => {
            g.insert_edge(u, v)?;
            if s.in_mis[u] {
                s.counter[v] += 1;
                meter.mutate(1);
            }
            if s.in_mis[v] {
                s.counter[u] += 1;
                meter.mutate(1);
            }
            if s.in_mis[u] && s.in_mis[v] {
                let x = choose_removal(g, s, u, v);
                debug_assert!(x == u || x == v);
                remove_from_mis(g, s, x, meter)?;
                hook.left(g, s, x, meter);
                out.removed.push(x);
                out.added = cascade_add_with(g, s, g.neighbors(x), meter, hook)?;
            }
        }
    }
    Ok(out)
}

/// The O(Δ) baseline: counter maintenance with smaller-degree removal.
pub fn naive_update(
    g: &mut DynamicGraph,
    s: &mut MisState,
    e: UpdateEvent,
    meter: &mut WorkMeter,
) -> Result<UpdateOutcome, MisError> {
    apply_counter_update(g, s, e, meter, &mut NoHook, |g, _, u, v| {
        smaller_degree_endpoint(g, u, v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn from_edges(n: usize, edges: &[(usize, usize)]) -> DynamicGraph {
        let mut g = DynamicGraph::new(n);
        for &(u, v) in edges {
            g.insert_edge(u, v).unwrap();
        }
        g
    }

    fn path(n: usize) -> DynamicGraph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        from_edges(n, &edges)
    }

    fn star3() -> DynamicGraph {
        from_edges(4, &[(1, 0), (1, 2), (1, 3)])
    }

    fn counters(s: &MisState) -> Vec<usize> {
        (0..s.n()).map(|v| s.counter(v)).collect()
    }

    #[test]
    fn recompute_examples() {
        let s = recompute_state(&path(3), [0, 2]);
        assert_eq!(counters(&s), vec![0, 2, 0]);
        let s = recompute_state(&path(2), []);
        assert_eq!(counters(&s), vec![0, 0]);
        let s = recompute_state(&star3(), [1]);
        assert_eq!(counters(&s), vec![1, 0, 1, 1]);
        assert_eq!(s.phi(), -3);
    }

    #[test]
    fn verify_examples() {
        let g = path(3);
        assert_eq!(verify_mis(&g, &recompute_state(&g, [0, 2])), Verdict::Valid);
        assert_eq!(
            verify_mis(&g, &recompute_state(&g, [0])),
            Verdict::MaximalityViolation(2)
        );
        let g = path(2);
        assert_eq!(
            verify_mis(&g, &recompute_state(&g, [0, 1])),
            Verdict::IndependenceViolation(0, 1)
        );
        let g = path(3);
        let mut s = recompute_state(&g, [0, 2]);
        s.counter[1] = 1;
        assert_eq!(verify_mis(&g, &s), Verdict::CounterMismatch(1));
    }

    #[test]
    fn add_examples() {
        let g = DynamicGraph::new(2);
        let mut s = MisState::new(2);
        let mut m = WorkMeter::new();
        add_to_mis(&g, &mut s, 0, &mut m).unwrap();
        assert!(s.contains(0));
        assert_eq!(counters(&s), vec![0, 0]);

        let g = star3();
        let mut s = MisState::new(4);
        add_to_mis(&g, &mut s, 1, &mut m).unwrap();
        assert_eq!(counters(&s), vec![1, 0, 1, 1]);
        assert!(matches!(add_to_mis(&g, &mut s, 0, &mut m), Err(MisError::Invariant(_))));
    }

    #[test]
    fn remove_examples() {
        let g = star3();
        let mut m = WorkMeter::new();
        let mut s = recompute_state(&g, [1]);
        remove_from_mis(&g, &mut s, 1, &mut m).unwrap();
        assert_eq!(counters(&s), vec![0; 4]);
        assert!(matches!(remove_from_mis(&g, &mut s, 0, &mut m), Err(MisError::Invariant(_))));

        let g = path(2);
        let mut s = recompute_state(&g, [0]);
        remove_from_mis(&g, &mut s, 0, &mut m).unwrap();
        assert_eq!(s.counter(1), 0);
    }

    #[test]
    fn add_then_remove_restores_state() {
        let g = from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]);
        let s0 = recompute_state(&g, [1]);
        let mut s = s0.clone();
        let mut m = WorkMeter::new();
        add_to_mis(&g, &mut s, 3, &mut m).unwrap();
        remove_from_mis(&g, &mut s, 3, &mut m).unwrap();
        assert_eq!(s, s0);
    }

    #[test]
    fn cascade_examples() {
        let g = star3();
        let mut m = WorkMeter::new();
        let mut s = recompute_state(&g, [1]);
        remove_from_mis(&g, &mut s, 1, &mut m).unwrap();
        let added = cascade_add(&g, &mut s, [0, 2, 3], &mut m).unwrap();
        assert_eq!(added, vec![0, 2, 3]);
        assert!(verify_mis(&g, &s).is_valid());

        let s0 = recompute_state(&g, [1]);
        let mut s = s0.clone();
        assert!(cascade_add(&g, &mut s, [0, 2, 3], &mut m).unwrap().is_empty());
        assert_eq!(s, s0);

        // Path 0-1-2-3-4 with M = {2}; removing 2 then scanning {1, 3}.
        let g = path(5);
        let mut s = recompute_state(&g, [2]);
        remove_from_mis(&g, &mut s, 2, &mut m).unwrap();
        let added = cascade_add(&g, &mut s, [1, 3], &mut m).unwrap();
        assert_eq!(added, vec![1, 3]);
    }

    #[test]
    fn cascade_ignores_duplicates() {
        let g = path(5);
        let mut m = WorkMeter::new();
        let mut a = recompute_state(&g, [2]);
        remove_from_mis(&g, &mut a, 2, &mut m).unwrap();
        let mut b = a.clone();
        let ra = cascade_add(&g, &mut a, [1, 3], &mut m).unwrap();
        let rb = cascade_add(&g, &mut b, [3, 1, 1, 3, 3], &mut m).unwrap();
        assert_eq!((ra, a), (rb, b));
    }

    #[test]
    fn greedy_examples() {
        let mut m = WorkMeter::new();
        let tri = from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(greedy_mis(&tri, &[0, 1, 2], &mut m).members(), vec![0]);
        let p = path(3);
        assert_eq!(greedy_mis(&p, &[1, 0, 2], &mut m).members(), vec![1]);
        assert_eq!(greedy_mis(&p, &[0, 2, 1], &mut m).members(), vec![0, 2]);
    }

    #[test]
    fn naive_update_examples() {
        let mut m = WorkMeter::new();
        // Deleting the only MIS neighbor frees the other endpoint.
        let mut g = path(2);
        let mut s = recompute_state(&g, [0]);
        let out = naive_update(&mut g, &mut s, UpdateEvent::delete(0, 1), &mut m).unwrap();
        assert_eq!(out.added, vec![1]);
        assert_eq!(s.members(), vec![0, 1]);

        // Only one endpoint in M: counters change, membership does not.
        let mut g = DynamicGraph::new(2);
        let mut s = recompute_state(&g, [0]);
        let out = naive_update(&mut g, &mut s, UpdateEvent::insert(0, 1), &mut m).unwrap();
        assert_eq!(out, UpdateOutcome::default());
        assert_eq!(s.counter(1), 1);
        assert_eq!(s.members(), vec![0]);

        // Both in M, equal degree: smaller id leaves.
        let mut g = DynamicGraph::new(2);
        let mut s = recompute_state(&g, [0, 1]);
        let out = naive_update(&mut g, &mut s, UpdateEvent::insert(0, 1), &mut m).unwrap();
        assert_eq!(out.removed, vec![0]);
        assert_eq!(s.members(), vec![1]);
        assert!(verify_mis(&g, &s).is_valid());
    }

    #[test]
    fn naive_update_propagates_graph_errors() {
        let mut m = WorkMeter::new();
        let mut g = DynamicGraph::new(3);
        let mut s = recompute_state(&g, [0, 1, 2]);
        let err = naive_update(&mut g, &mut s, UpdateEvent::delete(0, 2), &mut m).unwrap_err();
        assert_eq!(err, MisError::Graph(GraphError::MissingEdge(0, 2)));
        assert_eq!(s, recompute_state(&g, [0, 1, 2]));
    }
}
