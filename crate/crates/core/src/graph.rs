//! Undirected simple graph over a fixed vertex universe with mutable edges.

use indexmap::IndexSet;
use thiserror::Error;

/// Index of a vertex in `0..n`. The vertex set never changes after creation.
pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {v} out of range (n = {n})")]
    OutOfRange { v: VertexId, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(VertexId, VertexId),
    #[error("edge ({0}, {1}) not present")]
    MissingEdge(VertexId, VertexId),
}

/// Adjacency-set graph.
///
/// Neighbor sets are insertion-ordered hash sets: membership, insertion and
/// removal are expected O(1), and iteration order is a pure function of the
/// update history, so replays are reproducible across processes.
#[derive(Debug, Clone, Default)]
pub struct DynamicGraph {
    adj: Vec<IndexSet<VertexId>>,
    edge_count: usize,
}

impl DynamicGraph {
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![IndexSet::new(); n],
            edge_count: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.n() && v < self.n() && self.adj[u].contains(&v)
    }

    fn check_pair(&self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        let n = self.n();
        for w in [u, v] {
            if w >= n {
                return Err(GraphError::OutOfRange { v: w, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(())
    }

    pub fn insert_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check_pair(u, v)?;
        if !self.adj[u].insert(v) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        self.adj[v].insert(u);
        self.edge_count += 1;
        Ok(())
    }

    pub fn delete_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check_pair(u, v)?;
        if !self.adj[u].swap_remove(&v) {
            return Err(GraphError::MissingEdge(u, v));
        }
        self.adj[v].swap_remove(&u);
        self.edge_count -= 1;
        Ok(())
    }

    /// All edges as `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out: Vec<_> = (0..self.n())
            .flat_map(|u| self.neighbors(u).filter(move |&v| u < v).map(move |v| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Sorted neighbor list, for callers that need an order-stable view.
    pub fn sorted_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out: Vec<_> = self.neighbors(v).collect();
        out.sort_unstable();
        out
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(IndexSet::len).max().unwrap_or(0)
    }
}

/// Degeneracy by repeated minimum-degree removal (bucket queue, O(n + m)).
///
/// For a graph of arboricity `λ` the result lies in `[λ, 2λ − 1]`.
pub fn degeneracy(g: &DynamicGraph) -> usize {
    let n = g.n();
    if n == 0 {
        return 0;
    }
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<VertexId>> = vec![Vec::new(); max_deg + 1];
    for v in 0..n {
        buckets[deg[v]].push(v);
    }
    let mut removed = vec![false; n];
    let mut best = 0;
    let mut cursor = 0;
    for _ in 0..n {
        // Entries may be stale; skip them lazily.
        let v = loop {
            while buckets[cursor].is_empty() {
                cursor += 1;
            }
            let v = buckets[cursor].pop().expect("non-empty bucket");
            if !removed[v] && deg[v] == cursor {
                break v;
            }
        };
        removed[v] = true;
        best = best.max(deg[v]);
        for w in g.neighbors(v) {
            if !removed[w] {
                deg[w] -= 1;
                buckets[deg[w]].push(w);
                cursor = cursor.min(deg[w]);
            }
        }
    }
    best
}
