//! Grouping vertices by their trace `N(u) ∩ anchor` via partition
//! refinement, and the twin-class bound report.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::{Graph, Vertex, VertexSet};

/// One class of the partition: every member has exactly `trace` as its
/// neighbourhood inside the anchor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceClass {
    pub trace: Vec<Vertex>,
    pub members: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NeighborhoodClassPartition {
    pub ground: VertexSet,
    pub anchor: VertexSet,
    /// Sorted by trace.
    pub classes: Vec<TraceClass>,
    #[serde(skip)]
    pub trace_index: BTreeMap<Vec<Vertex>, usize>,
}

impl NeighborhoodClassPartition {
    pub fn class_of_trace(&self, trace: &[Vertex]) -> Option<&TraceClass> {
        self.trace_index.get(trace).map(|&i| &self.classes[i])
    }

    /// Position of the class containing `v`, if `v` is in the ground set.
    pub fn class_position(&self, v: Vertex) -> Option<usize> {
        self.classes.iter().position(|c| c.members.binary_search(&v).is_ok())
    }
}

/// Splits `ground` by `N(u) ∩ anchor`. Anchor vertices are processed in
/// ascending order; each one splits every class it touches into the touched
/// and untouched parts, so the work is linear in `|ground|` plus the edges
/// between anchor and ground.
pub fn partition_by_trace(g: &Graph, ground: &VertexSet, anchor: &VertexSet) -> NeighborhoodClassPartition {
    let n = g.vertex_count();
    let mut class_of = vec![usize::MAX; n];
    let mut members: Vec<Vec<Vertex>> = Vec::new();
    let mut traces: Vec<Vec<Vertex>> = Vec::new();
    // position of each vertex inside its class's member list
    let mut slot = vec![usize::MAX; n];
    if !ground.is_empty() {
        members.push(ground.iter().copied().collect());
        traces.push(Vec::new());
        for (i, &u) in members[0].iter().enumerate() {
            class_of[u] = 0;
            slot[u] = i;
        }
    }
    let mut split_into: Vec<usize> = Vec::new();
    for &a in anchor {
        let touched: Vec<Vertex> = g
            .neighbors(a)
            .iter()
            .copied()
            .filter(|&u| class_of[u] != usize::MAX)
            .collect();
        // count touched members per class
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &u in &touched {
            *counts.entry(class_of[u]).or_default() += 1;
        }
        split_into.clear();
        split_into.resize(members.len(), usize::MAX);
        for (&c, &k) in &counts {
            if k == members[c].len() {
                traces[c].push(a);
            } else {
                let mut t = traces[c].clone();
                t.push(a);
                split_into[c] = members.len();
                members.push(Vec::new());
                traces.push(t);
            }
        }
        for &u in &touched {
            let c = class_of[u];
            let target = split_into[c];
            if target == usize::MAX {
                continue;
            }
            // swap-remove u from c
            let i = slot[u];
            let end = members[c].len() - 1;
            members[c].swap(i, end);
            let moved = members[c][i];
            slot[moved] = i;
            members[c].pop();
            class_of[u] = target;
            slot[u] = members[target].len();
            members[target].push(u);
        }
    }
    let mut classes: Vec<TraceClass> = members
        .into_iter()
        .zip(traces)
        .filter(|(m, _)| !m.is_empty())
        .map(|(mut m, trace)| {
            m.sort_unstable();
            TraceClass { trace, members: m }
        })
        .collect();
    classes.sort_by(|a, b| a.trace.cmp(&b.trace));
    let trace_index = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.trace.clone(), i))
        .collect();
    NeighborhoodClassPartition {
        ground: ground.clone(),
        anchor: anchor.clone(),
        classes,
        trace_index,
    }
}

/// The distinct traces, in canonical order.
pub fn distinct_traces(p: &NeighborhoodClassPartition) -> Vec<Vec<Vertex>> {
    p.classes.iter().map(|c| c.trace.clone()).collect()
}

/// Empirical counts next to the twin-class bounds for a given `tau`. Only
/// the `4^tau` branch of the trace bound is evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwinBoundReport {
    pub tau: usize,
    pub ground_size: usize,
    pub anchor_size: usize,
    pub high_degree_count: usize,
    pub high_degree_bound: u128,
    pub trace_count: usize,
    pub trace_bound: u128,
    pub high_degree_violation: bool,
    pub trace_violation: bool,
}

impl TwinBoundReport {
    pub fn within_bounds(&self) -> bool {
        !self.high_degree_violation && !self.trace_violation
    }
}

pub fn twin_bound_report(p: &NeighborhoodClassPartition, tau: usize) -> TwinBoundReport {
    let tau = tau.max(1);
    let anchor = p.anchor.len() as u128;
    let high_degree_count = p
        .classes
        .iter()
        .filter(|c| c.trace.len() > 2 * tau)
        .map(|c| c.members.len())
        .sum();
    let high_degree_bound = 2 * tau as u128 * anchor;
    let four_pow = 4u128.checked_pow(tau as u32).unwrap_or(u128::MAX);
    let trace_bound = four_pow.saturating_add(2 * tau as u128).saturating_mul(anchor);
    let trace_count = p.classes.len();
    TwinBoundReport {
        tau,
        ground_size: p.ground.len(),
        anchor_size: p.anchor.len(),
        high_degree_count,
        high_degree_bound,
        trace_count,
        trace_bound,
        high_degree_violation: high_degree_count as u128 > high_degree_bound,
        // with an empty anchor there is at most the single empty trace
        trace_violation: anchor > 0 && trace_count as u128 > trace_bound,
    }
}
