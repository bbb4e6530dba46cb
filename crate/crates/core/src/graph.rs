//! Simple undirected graphs with dense `0..n` vertex ids, plus the distance
//! and neighbourhood operators everything else is built on.

use std::collections::{BTreeSet, VecDeque};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type VertexSet = BTreeSet<Vertex>;

/// Immutable simple undirected graph. Adjacency lists are sorted and
/// symmetric; there are no loops and no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    edge_count: usize,
}

/// Accumulates edges, silently merging duplicates.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    adj: Vec<BTreeSet<Vertex>>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder {
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Appends a fresh isolated vertex and returns its id.
    pub fn add_vertex(&mut self) -> Vertex {
        self.adj.push(BTreeSet::new());
        self.adj.len() - 1
    }

    /// Returns `true` if the edge was new.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<bool> {
        let n = self.adj.len();
        for w in [u, v] {
            if w >= n {
                return Err(Error::VertexOutOfRange { vertex: w, n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let fresh = self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(fresh)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj.get(u).is_some_and(|a| a.contains(&v))
    }

    pub fn build(self) -> Graph {
        let adj: Vec<Vec<Vertex>> = self
            .adj
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Graph { adj, edge_count }
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list, merging duplicate edges.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        let mut b = GraphBuilder::new(n);
        for (u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.adj.len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, a)| a.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.adj.len() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.adj.len(),
            })
        }
    }

    pub fn check_set<'a>(&self, s: impl IntoIterator<Item = &'a Vertex>) -> Result<()> {
        s.into_iter().try_for_each(|&v| self.check_vertex(v))
    }

    /// Closed neighbourhood of every vertex as a bitset.
    pub fn closed_neighborhood_bits(&self) -> Vec<FixedBitSet> {
        let n = self.vertex_count();
        self.vertices()
            .map(|v| {
                let mut b = FixedBitSet::with_capacity(n);
                b.insert(v);
                for &w in self.neighbors(v) {
                    b.insert(w);
                }
                b
            })
            .collect()
    }

    /// Induced subgraph on `vertices`. Returns the subgraph and the map from
    /// its ids to ours; local ids follow the iteration order of `vertices`.
    pub fn induced_subgraph<'a>(
        &self,
        vertices: impl IntoIterator<Item = &'a Vertex>,
    ) -> (Graph, Vec<Vertex>) {
        let map: Vec<Vertex> = vertices.into_iter().copied().collect();
        let mut local = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in map.iter().enumerate() {
            local[v] = i;
        }
        let mut adj = vec![Vec::new(); map.len()];
        for (i, &v) in map.iter().enumerate() {
            adj[i] = self.adj[v]
                .iter()
                .filter_map(|&w| (local[w] != usize::MAX).then_some(local[w]))
                .collect();
            adj[i].sort_unstable();
        }
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        (Graph { adj, edge_count }, map)
    }

    /// Removes the given edges and vertices and compacts the ids. Returns the
    /// new graph and the map from new ids to old ids (ascending).
    pub fn remove(&self, edges: &[(Vertex, Vertex)], vertices: &VertexSet) -> (Graph, Vec<Vertex>) {
        let mut dropped: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
        for &(u, v) in edges {
            dropped.insert((u.min(v), u.max(v)));
        }
        let keep: Vec<Vertex> = self.vertices().filter(|v| !vertices.contains(v)).collect();
        let mut local = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            local[v] = i;
        }
        let mut adj = vec![Vec::new(); keep.len()];
        for (i, &v) in keep.iter().enumerate() {
            adj[i] = self.adj[v]
                .iter()
                .filter(|&&w| local[w] != usize::MAX && !dropped.contains(&(v.min(w), v.max(w))))
                .map(|&w| local[w])
                .collect();
        }
        let edge_count = adj.iter().map(Vec::len).sum::<usize>() / 2;
        (Graph { adj, edge_count }, keep)
    }

    /// Distances from `sources`, explored up to `limit` (inclusive).
    /// Unreached vertices get `None`.
    pub fn bfs_distances(&self, sources: &VertexSet, limit: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s] = Some(0);
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if limit.is_some_and(|l| du >= l) {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Degeneracy by repeated removal of a minimum-degree vertex.
    pub fn degeneracy(&self) -> usize {
        let n = self.vertex_count();
        let mut deg: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let maxd = self.max_degree();
        let mut buckets: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); maxd + 1];
        for v in 0..n {
            buckets[deg[v]].insert(v);
        }
        let mut removed = vec![false; n];
        let mut best = 0;
        let mut d: usize = 0;
        for _ in 0..n {
            d = d.saturating_sub(1);
            while buckets[d].is_empty() {
                d += 1;
            }
            let v = buckets[d].pop_first().unwrap();
            removed[v] = true;
            best = best.max(d);
            for &w in &self.adj[v] {
                if !removed[w] {
                    buckets[deg[w]].remove(&w);
                    deg[w] -= 1;
                    buckets[deg[w]].insert(w);
                }
            }
        }
        best
    }
}

/// `N^i(s)` (open) or `N^i[s]` (closed): every vertex within distance `i`
/// of `s`, excluding `s` itself in the open variant.
pub fn neighborhood(g: &Graph, s: &VertexSet, i: usize, closed: bool) -> Result<VertexSet> {
    g.check_set(s)?;
    let dist = g.bfs_distances(s, Some(i));
    Ok(g.vertices()
        .filter(|&v| match dist[v] {
            Some(0) => closed,
            Some(_) => true,
            None => false,
        })
        .collect())
}

pub fn closed_neighborhood(g: &Graph, v: Vertex) -> VertexSet {
    let mut s: VertexSet = g.neighbors(v).iter().copied().collect();
    s.insert(v);
    s
}

/// True iff every vertex has a member of `d` in its closed neighbourhood.
pub fn is_dominating(g: &Graph, d: &VertexSet) -> Result<bool> {
    g.check_set(d)?;
    Ok(g
        .vertices()
        .all(|v| d.contains(&v) || g.neighbors(v).iter().any(|w| d.contains(w))))
}
