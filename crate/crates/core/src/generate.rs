//! Update-stream generators.
//!
//! All randomized generators draw from `ChaCha8Rng::seed_from_u64(seed)` and
//! are deterministic per argument tuple.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::VertexId;
use crate::stream::{UpdateEvent, UpdateStream};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("at least two vertices are needed to emit events (n = {0})")]
    TooFewVertices(usize),
    #[error("insert probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("bipartite side size must be at least 2 (got {0})")]
    SideTooSmall(usize),
    #[error("arboricity bound must be at least 1")]
    ZeroLambda,
}

fn ordered(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Present-edge pool with O(1) uniform sampling and removal.
#[derive(Default)]
struct EdgePool {
    edges: Vec<(VertexId, VertexId)>,
    slot: HashMap<(VertexId, VertexId), usize>,
}

impl EdgePool {
    fn len(&self) -> usize {
        self.edges.len()
    }

    fn contains(&self, e: (VertexId, VertexId)) -> bool {
        self.slot.contains_key(&e)
    }

    fn insert(&mut self, e: (VertexId, VertexId)) {
        self.slot.insert(e, self.edges.len());
        self.edges.push(e);
    }

    fn remove_at(&mut self, i: usize) -> (VertexId, VertexId) {
        let e = self.edges.swap_remove(i);
        self.slot.remove(&e);
        if i < self.edges.len() {
            self.slot.insert(self.edges[i], i);
        }
        e
    }
}

fn uniform_pair(rng: &mut ChaCha8Rng, n: usize) -> (VertexId, VertexId) {
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    ordered(a, b)
}

/// Random insert/delete stream.
///
/// Each step is an insertion of a uniformly random absent edge with
/// probability `p_insert`, else a deletion of a uniformly random present
/// edge. When the requested pool is empty the other kind is emitted.
pub fn gen_random_stream(
    n: usize,
    steps: usize,
    p_insert: f64,
    seed: u64,
) -> Result<UpdateStream, GenerateError> {
    if !(0.0..=1.0).contains(&p_insert) {
        return Err(GenerateError::BadProbability(p_insert));
    }
    let mut stream = UpdateStream::new(n);
    if steps == 0 {
        return Ok(stream);
    }
    if n < 2 {
        return Err(GenerateError::TooFewVertices(n));
    }
    let capacity = n * (n - 1) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = EdgePool::default();
    for _ in 0..steps {
        let want_insert = rng.gen_bool(p_insert);
        let insert = if want_insert {
            pool.len() < capacity
        } else {
            pool.len() == 0
        };
        let event = if insert {
            // Rejection sampling is uniform over absent pairs.
            let e = loop {
                let e = uniform_pair(&mut rng, n);
                if !pool.contains(e) {
                    break e;
                }
            };
            pool.insert(e);
            UpdateEvent::insert(e.0, e.1)
        } else {
            let i = rng.gen_range(0..pool.len());
            let e = pool.remove_at(i);
            UpdateEvent::delete(e.0, e.1)
        };
        stream.events.push(event);
    }
    Ok(stream)
}

/// Intra-side pairs `(0,1), (0,2), …, (1,2), …` of a side with `s` vertices.
fn side_pairs(s: usize) -> Vec<(VertexId, VertexId)> {
    (0..s)
        .flat_map(|a| (a + 1..s).map(move |b| (a, b)))
        .collect()
}

/// Complete bipartite build followed by the counter-maintenance adversary.
///
/// Left side is `0..s`, right side `s..2s`. Each round inserts one edge
/// inside each side and then deletes both, so at the end of every round the
/// graph is exactly `K_{s,s}` again.
pub fn gen_bipartite_adversary(s: usize, rounds: usize) -> Result<UpdateStream, GenerateError> {
    if s < 2 {
        return Err(GenerateError::SideTooSmall(s));
    }
    let mut stream = UpdateStream::new(2 * s);
    stream.events.reserve(s * s + 4 * rounds);
    for l in 0..s {
        for r in s..2 * s {
            stream.events.push(UpdateEvent::insert(l, r));
        }
    }
    let pairs = side_pairs(s);
    for round in 0..rounds {
        let (a, b) = pairs[round % pairs.len()];
        let (c, d) = (a + s, b + s);
        stream.events.extend([
            UpdateEvent::insert(a, b),
            UpdateEvent::insert(c, d),
            UpdateEvent::delete(a, b),
            UpdateEvent::delete(c, d),
        ]);
    }
    Ok(stream)
}

/// Default insertion bias of [`gen_bounded_arboricity_stream`].
pub const ARBORICITY_STREAM_P_INSERT: f64 = 0.7;

/// A pair with one endpoint among `0..hubs`, normalized.
fn hub_pair(rng: &mut ChaCha8Rng, n: usize, hubs: usize) -> (VertexId, VertexId) {
    let h = rng.gen_range(0..hubs);
    let mut o = rng.gen_range(0..n - 1);
    if o >= h {
        o += 1;
    }
    ordered(h, o)
}

/// Rejection-sampling attempts before falling back to full enumeration.
const SAMPLE_ATTEMPTS: usize = 64;

/// `lambda` edge-disjoint forests over `n` vertices.
struct ForestCover {
    n: usize,
    adj: Vec<Vec<Vec<VertexId>>>,
    labels: Vec<Vec<usize>>,
    dirty: bool,
}

impl ForestCover {
    fn new(n: usize, lambda: usize) -> Self {
        Self {
            n,
            adj: vec![vec![Vec::new(); n]; lambda],
            labels: vec![(0..n).collect(); lambda],
            dirty: false,
        }
    }

    fn relabel(&mut self) {
        if !self.dirty {
            return;
        }
        let mut stack = Vec::new();
        for (forest, labels) in self.adj.iter().zip(self.labels.iter_mut()) {
            labels.fill(usize::MAX);
            for root in 0..self.n {
                if labels[root] != usize::MAX {
                    continue;
                }
                labels[root] = root;
                stack.push(root);
                while let Some(x) = stack.pop() {
                    for &y in &forest[x] {
                        if labels[y] == usize::MAX {
                            labels[y] = root;
                            stack.push(y);
                        }
                    }
                }
            }
        }
        self.dirty = false;
    }

    /// First forest in which `a` and `b` lie in different trees.
    fn slot_for(&self, a: VertexId, b: VertexId) -> Option<usize> {
        self.labels.iter().position(|l| l[a] != l[b])
    }

    fn link(&mut self, f: usize, a: VertexId, b: VertexId) {
        self.adj[f][a].push(b);
        self.adj[f][b].push(a);
        self.dirty = true;
    }

    fn cut(&mut self, f: usize, a: VertexId, b: VertexId) {
        self.adj[f][a].retain(|&x| x != b);
        self.adj[f][b].retain(|&x| x != a);
        self.dirty = true;
    }
}

/// Stream whose replayed graph has arboricity at most `lambda` at every prefix.
///
/// Uses [`ARBORICITY_STREAM_P_INSERT`] as the insertion probability.
pub fn gen_bounded_arboricity_stream(
    n: usize,
    lambda: usize,
    steps: usize,
    seed: u64,
) -> Result<UpdateStream, GenerateError> {
    gen_bounded_arboricity_stream_biased(n, lambda, steps, ARBORICITY_STREAM_P_INSERT, seed)
}

/// As [`gen_bounded_arboricity_stream`] with an explicit insertion probability.
pub fn gen_bounded_arboricity_stream_biased(
    n: usize,
    lambda: usize,
    steps: usize,
    p_insert: f64,
    seed: u64,
) -> Result<UpdateStream, GenerateError> {
    let shape = ArboricityShape { p_insert, ..ArboricityShape::default() };
    gen_arboricity_stream_shaped(n, lambda, steps, &shape, seed)
}

/// Knobs of [`gen_arboricity_stream_shaped`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArboricityShape {
    pub p_insert: f64,
    /// Vertices `0..hubs` are hubs.
    pub hubs: usize,
    /// Probability that an insertion attempt draws a hub endpoint.
    pub hub_bias: f64,
}

impl Default for ArboricityShape {
    fn default() -> Self {
        Self { p_insert: ARBORICITY_STREAM_P_INSERT, hubs: 0, hub_bias: 0.0 }
    }
}

/// Every present edge belongs to exactly one of `lambda` internal forests.
/// An insertion picks a random absent pair that can join some forest
/// without closing a cycle (first fitting forest wins); if no such pair
/// exists a deletion is emitted instead. With hubs, insertion attempts draw
/// one endpoint among the hubs with probability `hub_bias`, which grows
/// high-degree vertices while keeping the arboricity bound.
pub fn gen_arboricity_stream_shaped(
    n: usize,
    lambda: usize,
    steps: usize,
    shape: &ArboricityShape,
    seed: u64,
) -> Result<UpdateStream, GenerateError> {
    let p_insert = shape.p_insert;
    if lambda == 0 {
        return Err(GenerateError::ZeroLambda);
    }
    if !(0.0..=1.0).contains(&p_insert) {
        return Err(GenerateError::BadProbability(p_insert));
    }
    if !(0.0..=1.0).contains(&shape.hub_bias) {
        return Err(GenerateError::BadProbability(shape.hub_bias));
    }
    let hubs = shape.hubs.min(n);
    let mut stream = UpdateStream::new(n);
    if steps == 0 {
        return Ok(stream);
    }
    if n < 2 {
        return Err(GenerateError::TooFewVertices(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = EdgePool::default();
    let mut home: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    let mut forests = ForestCover::new(n, lambda);

    for _ in 0..steps {
        let want_insert = rng.gen_bool(p_insert) || pool.len() == 0;
        let mut chosen = None;
        if want_insert {
            forests.relabel();
            for _ in 0..SAMPLE_ATTEMPTS {
                let e = if hubs > 0 && rng.gen_bool(shape.hub_bias) {
                    hub_pair(&mut rng, n, hubs)
                } else {
                    uniform_pair(&mut rng, n)
                };
                if pool.contains(e) {
                    continue;
                }
                if let Some(f) = forests.slot_for(e.0, e.1) {
                    chosen = Some((e, f));
                    break;
                }
            }
            if chosen.is_none() {
                let options: Vec<_> = (0..n)
                    .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                    .filter(|&e| !pool.contains(e))
                    .filter_map(|e| forests.slot_for(e.0, e.1).map(|f| (e, f)))
                    .collect();
                if !options.is_empty() {
                    chosen = Some(options[rng.gen_range(0..options.len())]);
                }
            }
        }
        let event = match chosen {
            Some((e, f)) => {
                forests.link(f, e.0, e.1);
                home.insert(e, f);
                pool.insert(e);
                UpdateEvent::insert(e.0, e.1)
            }
            None => {
                let i = rng.gen_range(0..pool.len());
                let e = pool.remove_at(i);
                let f = home.remove(&e).expect("edge has a forest");
                forests.cut(f, e.0, e.1);
                UpdateEvent::delete(e.0, e.1)
            }
        };
        stream.events.push(event);
    }
    Ok(stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::degeneracy;

    #[test]
    fn random_stream_basics() {
        assert!(gen_random_stream(5, 0, 0.5, 1).unwrap().is_empty());
        assert_eq!(gen_random_stream(1, 3, 0.5, 1), Err(GenerateError::TooFewVertices(1)));
        assert_eq!(gen_random_stream(4, 3, 1.5, 1), Err(GenerateError::BadProbability(1.5)));
        let a = gen_random_stream(16, 200, 0.6, 42).unwrap();
        let b = gen_random_stream(16, 200, 0.6, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_random_stream(16, 200, 0.6, 43).unwrap());
    }

    #[test]
    fn random_stream_pool_exhaustion_flips_kind() {
        let s = gen_random_stream(2, 3, 1.0, 9).unwrap();
        assert_eq!(
            s.events,
            vec![UpdateEvent::insert(0, 1), UpdateEvent::delete(0, 1), UpdateEvent::insert(0, 1)]
        );
        // p = 0 on an empty graph must still insert first.
        let s = gen_random_stream(3, 2, 0.0, 9).unwrap();
        assert_eq!(s.events[0].kind, crate::stream::UpdateKind::Insert);
        assert_eq!(s.events[1].kind, crate::stream::UpdateKind::Delete);
    }

    #[test]
    fn bipartite_adversary_shape() {
        assert_eq!(gen_bipartite_adversary(3, 0).unwrap().len(), 9);
        assert_eq!(gen_bipartite_adversary(3, 2).unwrap().len(), 17);
        let s = gen_bipartite_adversary(2, 1).unwrap();
        assert_eq!(
            s.events[4..],
            [
                UpdateEvent::insert(0, 1),
                UpdateEvent::insert(2, 3),
                UpdateEvent::delete(0, 1),
                UpdateEvent::delete(2, 3),
            ]
        );
        assert_eq!(gen_bipartite_adversary(1, 1), Err(GenerateError::SideTooSmall(1)));
    }

    #[test]
    fn bipartite_adversary_pairs_cycle() {
        let s = gen_bipartite_adversary(3, 4).unwrap();
        let firsts: Vec<_> = s.events[9..].chunks(4).map(|c| (c[0].u, c[0].v)).collect();
        assert_eq!(firsts, vec![(0, 1), (0, 2), (1, 2), (0, 1)]);
        let seconds: Vec<_> = s.events[9..].chunks(4).map(|c| (c[1].u, c[1].v)).collect();
        assert_eq!(seconds, vec![(3, 4), (3, 5), (4, 5), (3, 4)]);
    }

    #[test]
    fn forest_stream_stays_a_forest() {
        let s = gen_bounded_arboricity_stream(3, 1, 50, 5).unwrap();
        let mut g = crate::graph::DynamicGraph::new(3);
        for e in &s.events {
            e.apply(&mut g).unwrap();
            assert!(g.edge_count() <= 2);
            assert!(degeneracy(&g) <= 1);
        }
    }

    #[test]
    fn arboricity_two_on_four_vertices_reaches_five_edges() {
        let s = gen_bounded_arboricity_stream_biased(4, 2, 200, 0.95, 3).unwrap();
        let mut g = crate::graph::DynamicGraph::new(4);
        let mut peak = 0;
        for e in &s.events {
            e.apply(&mut g).unwrap();
            peak = peak.max(g.edge_count());
        }
        // Two forests on four vertices hold at most 6 edges; K4 itself has
        // arboricity 2, so the cap is reachable.
        assert!(peak >= 5 && peak <= 6, "peak {peak}");
        assert_eq!(gen_bounded_arboricity_stream(4, 0, 1, 1), Err(GenerateError::ZeroLambda));
    }
}
