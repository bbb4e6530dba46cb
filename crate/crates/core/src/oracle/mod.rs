//! Exhaustive ground-truth solvers. Everything else in the crate is checked
//! against these.

mod colourful;
pub(crate) mod cover;
mod sat;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};
use cover::CoverSearch;

pub use colourful::{colourful_ds_exact, ColourfulInstance};
pub use sat::{sat_brute, CnfFormula, SAT_VARIABLE_GUARD};

/// A feasible set together with its size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub size: usize,
    pub witness: VertexSet,
}

impl Solution {
    pub fn new(witness: VertexSet) -> Self {
        Solution {
            size: witness.len(),
            witness,
        }
    }
}

/// Dominate everything outside `exempt` while hitting every required group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedInstance {
    pub graph: Graph,
    pub exempt: VertexSet,
    pub required_groups: Vec<VertexSet>,
    pub size_cap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundariedGraph {
    pub graph: Graph,
    pub boundary: VertexSet,
}

impl BoundariedGraph {
    pub fn new(graph: Graph, boundary: VertexSet) -> Result<Self> {
        graph.check_set(&boundary)?;
        Ok(BoundariedGraph { graph, boundary })
    }
}

/// Minimum dominating set by branch and bound. Branches over the closed
/// neighbourhood of the lowest-id undominated vertex; a greedy solution
/// seeds the incumbent.
pub fn ds_exact(g: &Graph) -> Solution {
    let n = g.vertex_count();
    if n == 0 {
        return Solution::new(VertexSet::new());
    }
    let closed = g.closed_neighborhood_bits();
    let mut bb = BranchAndBound {
        closed: &closed,
        graph: g,
        best: greedy_dominating_set(g, &closed),
        chosen: Vec::new(),
    };
    bb.search(FixedBitSet::with_capacity(n));
    Solution::new(bb.best.into_iter().collect())
}

fn greedy_dominating_set(g: &Graph, closed: &[FixedBitSet]) -> Vec<Vertex> {
    let mut dominated = FixedBitSet::with_capacity(g.vertex_count());
    let mut out = Vec::new();
    while dominated.count_ones(..) < g.vertex_count() {
        let v = g
            .vertices()
            .max_by_key(|&v| (closed[v].difference(&dominated).count(), std::cmp::Reverse(v)))
            .unwrap();
        dominated.union_with(&closed[v]);
        out.push(v);
    }
    out
}

struct BranchAndBound<'a> {
    graph: &'a Graph,
    closed: &'a [FixedBitSet],
    best: Vec<Vertex>,
    chosen: Vec<Vertex>,
}

impl BranchAndBound<'_> {
    fn search(&mut self, dominated: FixedBitSet) {
        let Some(u) = dominated.zeroes().next() else {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        };
        if self.chosen.len() + self.lower_bound(&dominated) >= self.best.len() {
            return;
        }
        let mut options: Vec<Vertex> = Vec::with_capacity(self.graph.degree(u) + 1);
        options.push(u);
        options.extend_from_slice(self.graph.neighbors(u));
        options.sort_unstable();
        let gains: Vec<FixedBitSet> = options
            .iter()
            .map(|&v| {
                let mut b = self.closed[v].clone();
                b.difference_with(&dominated);
                b
            })
            .collect();
        for (i, &v) in options.iter().enumerate() {
            // skip v when another option covers everything v would
            let dominated_by_other = gains.iter().enumerate().any(|(j, gj)| {
                j != i && gains[i].is_subset(gj) && (gains[i] != *gj || j < i)
            });
            if dominated_by_other {
                continue;
            }
            let mut next = dominated.clone();
            next.union_with(&self.closed[v]);
            self.chosen.push(v);
            self.search(next);
            self.chosen.pop();
        }
    }

    /// Max of a packing bound (undominated vertices with pairwise disjoint
    /// closed neighbourhoods need distinct dominators) and a counting bound.
    fn lower_bound(&self, dominated: &FixedBitSet) -> usize {
        let n = self.graph.vertex_count();
        let mut used = FixedBitSet::with_capacity(n);
        let mut packing = 0;
        let mut undominated: usize = 0;
        for w in dominated.zeroes() {
            undominated += 1;
            if self.closed[w].is_disjoint(&used) {
                used.union_with(&self.closed[w]);
                packing += 1;
            }
        }
        let max_gain = self
            .graph
            .vertices()
            .map(|v| self.closed[v].difference(dominated).count())
            .max()
            .unwrap_or(1)
            .max(1);
        packing.max(undominated.div_ceil(max_gain))
    }
}

/// Minimum set dominating `V ∖ Y` and meeting every required group, or
/// `None` if there is none within `size_cap` (an empty group is never met).
pub fn annotated_ds_exact(a: &AnnotatedInstance) -> Option<Solution> {
    let g = &a.graph;
    let mut constraints: Vec<Vec<usize>> = g
        .vertices()
        .filter(|v| !a.exempt.contains(v))
        .map(|v| {
            let mut c = g.neighbors(v).to_vec();
            c.push(v);
            c
        })
        .collect();
    for grp in &a.required_groups {
        constraints.push(grp.iter().copied().filter(|&v| v < g.vertex_count()).collect());
    }
    let picks = CoverSearch::new(g.vertex_count(), constraints).solve(a.size_cap)?;
    Some(Solution::new(picks.into_iter().collect()))
}

/// Minimum `(A, B)`-dominator of `h`: meets the boundary exactly in `A` and
/// dominates the interior plus `B`. With `max_extra` set, only dominators
/// with at most that many vertices beyond `A` are considered.
pub fn ab_dominator_min(
    h: &BoundariedGraph,
    a: &VertexSet,
    b: &VertexSet,
    max_extra: Option<usize>,
) -> Result<Option<Solution>> {
    ab_dominator_min_preferring(h, a, b, max_extra, None)
}

/// As [`ab_dominator_min`], but ties between minimum dominators are broken
/// lexicographically with `preferred` ordered before every other vertex.
pub fn ab_dominator_min_preferring(
    h: &BoundariedGraph,
    a: &VertexSet,
    b: &VertexSet,
    max_extra: Option<usize>,
    preferred: Option<Vertex>,
) -> Result<Option<Solution>> {
    if !a.is_subset(&h.boundary) || !b.is_subset(&h.boundary) {
        return Err(Error::Input(
            "A and B must be subsets of the boundary".to_string(),
        ));
    }
    let g = &h.graph;
    let mut candidates: Vec<Vertex> = g.vertices().filter(|v| !h.boundary.contains(v)).collect();
    if let Some(p) = preferred.filter(|p| candidates.contains(p)) {
        candidates.retain(|&v| v != p);
        candidates.insert(0, p);
    }
    let mut position = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in candidates.iter().enumerate() {
        position[v] = i;
    }
    let seen_by_a = |t: Vertex| a.contains(&t) || g.neighbors(t).iter().any(|w| a.contains(w));
    let constraints: Vec<Vec<usize>> = g
        .vertices()
        .filter(|t| !h.boundary.contains(t) || b.contains(t))
        .filter(|&t| !seen_by_a(t))
        .map(|t| {
            std::iter::once(t)
                .chain(g.neighbors(t).iter().copied())
                .filter(|&w| position[w] != usize::MAX)
                .map(|w| position[w])
                .collect()
        })
        .collect();
    let Some(picks) = CoverSearch::new(candidates.len(), constraints).solve(max_extra) else {
        return Ok(None);
    };
    let mut witness = a.clone();
    witness.extend(picks.into_iter().map(|p| candidates[p]));
    Ok(Some(Solution::new(witness)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_dominating;
    use crate::graph::tests::{cycle, path, star};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    /// Smallest dominating set by trying every subset in increasing size.
    fn brute_ds(g: &Graph) -> usize {
        let n = g.vertex_count();
        (0..1u32 << n)
            .filter(|&m| {
                g.vertices().all(|v| {
                    m >> v & 1 == 1 || g.neighbors(v).iter().any(|&w| m >> w & 1 == 1)
                })
            })
            .map(u32::count_ones)
            .min()
            .unwrap() as usize
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = vec![];
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn ds_exact_examples() {
        assert_eq!(ds_exact(&Graph::empty(1)).size, 1);
        assert_eq!(ds_exact(&path(4)).size, 2);
        assert_eq!(ds_exact(&cycle(6)).size, 2);
        assert_eq!(ds_exact(&Graph::empty(0)).size, 0);
        assert_eq!(ds_exact(&star(5)).witness, set(&[0]));
    }

    #[test]
    fn ds_exact_matches_subset_enumeration() {
        for seed in 0..150u64 {
            let n = 1 + (seed as usize % 14);
            let p = [0.1, 0.2, 0.35, 0.5][seed as usize % 4];
            let g = random_graph(n, p, seed);
            let sol = ds_exact(&g);
            assert!(is_dominating(&g, &sol.witness).unwrap());
            assert_eq!(sol.size, brute_ds(&g), "seed {seed}");
        }
    }

    #[test]
    fn annotated_examples() {
        let k1 = AnnotatedInstance {
            graph: Graph::empty(1),
            exempt: set(&[0]),
            required_groups: vec![],
            size_cap: None,
        };
        assert_eq!(annotated_ds_exact(&k1).unwrap().size, 0);

        let s = AnnotatedInstance {
            graph: star(4),
            exempt: VertexSet::new(),
            required_groups: vec![],
            size_cap: None,
        };
        assert_eq!(annotated_ds_exact(&s).unwrap().witness, set(&[0]));

        let mut with_empty = s.clone();
        with_empty.required_groups = vec![set(&[1]), VertexSet::new()];
        assert_eq!(annotated_ds_exact(&with_empty), None);

        // groups force a leaf; the leaf alone cannot cover the other leaves
        let mut leaf = s.clone();
        leaf.required_groups = vec![set(&[2])];
        assert_eq!(annotated_ds_exact(&leaf).unwrap().witness, set(&[0, 2]));
        leaf.size_cap = Some(1);
        assert_eq!(annotated_ds_exact(&leaf), None);
    }

    #[test]
    fn annotated_without_annotations_is_plain_domination() {
        for seed in 0..60u64 {
            let g = random_graph(2 + seed as usize % 11, 0.25, 1000 + seed);
            let a = AnnotatedInstance {
                graph: g.clone(),
                exempt: VertexSet::new(),
                required_groups: vec![],
                size_cap: None,
            };
            assert_eq!(annotated_ds_exact(&a).unwrap().size, ds_exact(&g).size);
        }
    }

    #[test]
    fn ab_dominator_examples() {
        let edge = BoundariedGraph::new(Graph::from_edges(2, [(0, 1)]).unwrap(), set(&[1])).unwrap();
        let s = ab_dominator_min(&edge, &set(&[]), &set(&[1]), None).unwrap().unwrap();
        assert_eq!(s.witness, set(&[0]));
        let s = ab_dominator_min(&edge, &set(&[1]), &set(&[]), None).unwrap().unwrap();
        assert_eq!(s.witness, set(&[1]));

        let apart = BoundariedGraph::new(Graph::empty(2), set(&[0])).unwrap();
        let s = ab_dominator_min(&apart, &set(&[]), &set(&[]), None).unwrap().unwrap();
        assert_eq!(s.witness, set(&[1]));
        // b cannot be dominated without being picked
        assert_eq!(ab_dominator_min(&apart, &set(&[]), &set(&[0]), None).unwrap(), None);

        assert!(ab_dominator_min(&apart, &set(&[1]), &set(&[]), None).is_err());
    }

    #[test]
    fn ab_dominator_preference_breaks_ties() {
        // both 3 and 4 dominate the whole interior {1, 2, 3, 4}
        let g = Graph::from_edges(5, [(3, 0), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3)]).unwrap();
        let h = BoundariedGraph::new(g, set(&[0])).unwrap();
        let lex = ab_dominator_min(&h, &set(&[]), &set(&[]), None).unwrap().unwrap();
        assert_eq!(lex.witness, set(&[3]));
        let pref = ab_dominator_min_preferring(&h, &set(&[]), &set(&[]), None, Some(4))
            .unwrap()
            .unwrap();
        assert_eq!(pref.witness, set(&[4]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ab_dominator_monotone_in_b(seed in 0u64..10_000, n in 2usize..=10, bsize in 1usize..=3) {
            let g = random_graph(n, 0.3, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
            let boundary: VertexSet = (0..n).filter(|_| rng.random_bool(0.4)).take(bsize + 1).collect();
            let h = BoundariedGraph::new(g, boundary.clone()).unwrap();
            let bvec: Vec<_> = boundary.iter().copied().collect();
            for amask in 0..1u32 << bvec.len() {
                let a: VertexSet = bvec.iter().enumerate().filter(|(i, _)| amask >> i & 1 == 1).map(|(_, &v)| v).collect();
                let mut prev: Option<usize> = Some(0);
                let mut b = VertexSet::new();
                // grow B one vertex at a time; optimum must never decrease
                for &v in &bvec {
                    let cur = ab_dominator_min(&h, &a, &b, None).unwrap().map(|s| s.size);
                    prop_assert!(prev.is_some() || cur.is_none());
                    if let (Some(p), Some(c)) = (prev, cur) { prop_assert!(p <= c); }
                    prev = cur;
                    b.insert(v);
                }
            }
        }
    }
}
