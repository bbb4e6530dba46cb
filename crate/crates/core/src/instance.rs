//! Problem instances: a graph together with a maximal r-independent set `X`,
//! the radius `r` and the budget `p`, and the residual machinery around them.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result, Violation};
use crate::graph::{closed_neighborhood, neighborhood, Graph, Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub x_set: VertexSet,
    pub radius: usize,
    pub budget: i64,
}

/// The split `V = X ⊎ N(X) ⊎ R` plus per-center ball data, centers in
/// ascending id order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidualDecomposition {
    pub residual: VertexSet,
    pub x_order: Vec<Vertex>,
    /// `N[x_i]` per center.
    pub balls: Vec<VertexSet>,
    /// `N²[x_i]` per center.
    pub second_balls: Vec<VertexSet>,
    /// `R_i = N²[x_i] ∩ R` per center.
    pub ball_residuals: Vec<VertexSet>,
}

impl ResidualDecomposition {
    pub fn len(&self) -> usize {
        self.x_order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_order.is_empty()
    }

    /// `N(X)`: the union of the open balls.
    pub fn x_neighbors(&self) -> VertexSet {
        self.balls
            .iter()
            .zip(&self.x_order)
            .flat_map(|(b, x)| b.iter().filter(move |v| *v != x).copied())
            .collect()
    }
}

impl Instance {
    pub fn new(graph: Graph, x_set: VertexSet, radius: usize, budget: i64) -> Self {
        Instance {
            graph,
            x_set,
            radius,
            budget,
        }
    }

    /// Checks that `X` exists, is r-independent and is maximal.
    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(v))
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let g = &self.graph;
        let mut out = Vec::new();
        if self.radius < 1 {
            out.push(Violation::RadiusTooSmall(self.radius));
        }
        for &x in &self.x_set {
            if x >= g.vertex_count() {
                out.push(Violation::XVertexOutOfRange(x));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (u, v, distance) in close_pairs(g, &self.x_set, self.radius) {
            out.push(Violation::NotIndependent { u, v, distance });
        }
        let dist = g.bfs_distances(&self.x_set, Some(self.radius));
        for v in g.vertices() {
            if dist[v].is_none() {
                out.push(Violation::NotMaximal(v));
            }
        }
        out
    }

    /// `R = V ∖ N[X]`.
    pub fn residual(&self) -> VertexSet {
        residual_of(&self.graph, &self.x_set)
    }

    pub fn decompose(&self) -> Result<ResidualDecomposition> {
        self.validate()?;
        Ok(decompose_unchecked(&self.graph, &self.x_set))
    }

    /// `Some(true)` when `p ≥ |X| + |R|`, `Some(false)` when `p < |X|`,
    /// otherwise `None`.
    pub fn trivial_verdict(&self) -> Result<Option<bool>> {
        if self.radius < 2 {
            return Err(Error::UnsupportedRadius {
                need: 2,
                got: self.radius,
            });
        }
        let x = self.x_set.len() as i64;
        let r = self.residual().len() as i64;
        Ok(if self.budget >= x + r {
            Some(true)
        } else if self.budget < x {
            Some(false)
        } else {
            None
        })
    }
}

pub(crate) fn residual_of(g: &Graph, x_set: &VertexSet) -> VertexSet {
    let mut covered = FixedBitSet::with_capacity(g.vertex_count());
    for &x in x_set {
        covered.insert(x);
        for &w in g.neighbors(x) {
            covered.insert(w);
        }
    }
    g.vertices().filter(|&v| !covered.contains(v)).collect()
}

pub(crate) fn decompose_unchecked(g: &Graph, x_set: &VertexSet) -> ResidualDecomposition {
    let residual = residual_of(g, x_set);
    let x_order: Vec<Vertex> = x_set.iter().copied().collect();
    let balls: Vec<VertexSet> = x_order.iter().map(|&x| closed_neighborhood(g, x)).collect();
    let second_balls: Vec<VertexSet> = x_order
        .iter()
        .map(|&x| neighborhood(g, &VertexSet::from([x]), 2, true).expect("x in range"))
        .collect();
    let ball_residuals = second_balls
        .iter()
        .map(|b| b.intersection(&residual).copied().collect())
        .collect();
    ResidualDecomposition {
        residual,
        x_order,
        balls,
        second_balls,
        ball_residuals,
    }
}

/// Pairs of `x` at distance `≤ r`, with their distance.
fn close_pairs(g: &Graph, x: &VertexSet, r: usize) -> Vec<(Vertex, Vertex, usize)> {
    let mut out = Vec::new();
    for &u in x {
        let dist = g.bfs_distances(&VertexSet::from([u]), Some(r));
        for &v in x.range(u + 1..) {
            if let Some(d) = dist[v] {
                out.push((u, v, d));
            }
        }
    }
    out
}

/// True iff all distinct pairs of `x` are at distance at least `r + 1`.
pub fn is_r_independent(g: &Graph, x: &VertexSet, r: usize) -> Result<bool> {
    g.check_set(x)?;
    if x.len() <= 1 {
        return Ok(true);
    }
    Ok(close_pairs(g, x, r).is_empty())
}

/// Scans vertices by ascending id and keeps each one that is farther than
/// `r` from everything kept so far.
pub fn greedy_maximal_r_independent(g: &Graph, r: usize) -> VertexSet {
    let n = g.vertex_count();
    let mut covered = FixedBitSet::with_capacity(n);
    let mut x = VertexSet::new();
    let mut frontier = Vec::new();
    let mut seen = vec![usize::MAX; n];
    for v in g.vertices() {
        if covered.contains(v) {
            continue;
        }
        x.insert(v);
        // bounded BFS marking everything within distance r of v
        frontier.clear();
        frontier.push(v);
        seen[v] = v;
        covered.insert(v);
        for _ in 0..r {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in g.neighbors(u) {
                    if seen[w] != v {
                        seen[w] = v;
                        covered.insert(w);
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
    }
    x
}
