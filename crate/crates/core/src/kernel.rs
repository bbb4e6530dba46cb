//! Kernelization for instances with `r ≥ 3`: ball replacement by a small
//! equivalent subgraph, removal of surplus interchangeable balls with a
//! budget offset, and the component removal used when `r ≥ 4`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{closed_neighborhood, neighborhood, Graph, Vertex, VertexSet};
use crate::instance::{decompose_unchecked, residual_of, Instance};
use crate::oracle::{ab_dominator_min, ab_dominator_min_preferring, BoundariedGraph};

pub const DEFAULT_BOUNDARY_CAP: usize = 4;

/// How many balls of a bucket of interchangeable balls survive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum KeepRule {
    /// `min{|bucket|, max(|R'|, 1)}`.
    #[default]
    Boundary,
    /// `min{|bucket|, max(|R|, 1)}`.
    Residual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KernelConfig {
    /// Largest boundary `|R'|` a ball may have to be replaced.
    pub boundary_cap: usize,
    pub keep: KeepRule,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            boundary_cap: DEFAULT_BOUNDARY_CAP,
            keep: KeepRule::Boundary,
        }
    }
}

/// `(4^k + 1)·k + 1`, saturating.
pub fn dominator_union_bound(k: usize) -> u128 {
    let four = 4u128.checked_pow(k as u32).unwrap_or(u128::MAX);
    four.saturating_add(1).saturating_mul(k as u128).saturating_add(1)
}

/// Queued edits for one ball, in the ids of the graph it was planned on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallPlan {
    pub center: Vertex,
    pub boundary: Vec<Vertex>,
    /// The union of minimum dominators together with the boundary and the
    /// centre.
    pub kept_core: VertexSet,
    pub removed_edges: Vec<(Vertex, Vertex)>,
    pub removed_vertices: VertexSet,
    pub twin_classes: usize,
    /// Boundary larger than the cap; nothing is removed.
    pub skipped: bool,
}

impl BallPlan {
    pub fn core_bound(&self) -> u128 {
        dominator_union_bound(self.boundary.len())
    }

    /// Vertices that remain in the ball after the edits.
    pub fn retained(&self, g: &Graph) -> VertexSet {
        let mut ball = neighborhood(g, &VertexSet::from([self.center]), 2, true).expect("centre in range");
        ball.retain(|v| !self.removed_vertices.contains(v));
        ball
    }

    /// The edited ball `N²[center]` with its boundary, local ids ascending
    /// with the global ones.
    pub fn replaced_ball(&self, g: &Graph) -> (BoundariedGraph, Vec<Vertex>) {
        let verts = self.retained(g);
        let (h, map) = g.induced_subgraph(&verts);
        let local = |v: Vertex| map.binary_search(&v).expect("vertex of the ball");
        let edges: Vec<(Vertex, Vertex)> = self
            .removed_edges
            .iter()
            .filter(|(u, v)| verts.contains(u) && verts.contains(v))
            .map(|&(u, v)| (local(u), local(v)))
            .collect();
        let (h, _) = h.remove(&edges, &VertexSet::new());
        let boundary = self.boundary.iter().map(|&b| local(b)).collect();
        (BoundariedGraph { graph: h, boundary }, map)
    }
}

/// Plans the replacement of `G[N²[center]]` (boundary `R' = N²[center] ∩ R`).
pub fn plan_ball(g: &Graph, x_set: &VertexSet, center: Vertex, cap: usize) -> Result<BallPlan> {
    g.check_vertex(center)?;
    if !x_set.contains(&center) {
        return Err(Error::Input(format!("vertex {} is not in X", center + 1)));
    }
    let residual = residual_of(g, x_set);
    let ball = closed_neighborhood(g, center);
    let second = neighborhood(g, &VertexSet::from([center]), 2, true)?;
    let boundary: Vec<Vertex> = second.difference(&ball).copied().collect();
    if let Some(&v) = boundary.iter().find(|v| !residual.contains(v)) {
        return Err(Error::ReductionDomain(format!(
            "vertex {} at distance 2 from centre {} is dominated by X; X must be 3-independent",
            v + 1,
            center + 1
        )));
    }
    let mut plan = BallPlan {
        center,
        boundary,
        kept_core: VertexSet::new(),
        removed_edges: Vec::new(),
        removed_vertices: VertexSet::new(),
        twin_classes: 0,
        skipped: false,
    };
    let k = plan.boundary.len();
    if k > cap {
        plan.skipped = true;
        return Ok(plan);
    }
    let (h, map) = g.induced_subgraph(&second);
    let local = |v: Vertex| map.binary_search(&v).expect("vertex of the ball");
    let boundary_local: VertexSet = plan.boundary.iter().map(|&b| local(b)).collect();
    let hb = BoundariedGraph {
        graph: h,
        boundary: boundary_local.clone(),
    };
    let centre_local = local(center);
    let mut core: VertexSet = boundary_local.clone();
    core.insert(centre_local);
    let bl: Vec<Vertex> = boundary_local.iter().copied().collect();
    for am in 0..1usize << k {
        let a = mask_set(&bl, am);
        for bm in 0..1usize << k {
            let b = mask_set(&bl, bm);
            let s = ab_dominator_min_preferring(&hb, &a, &b, Some(b.len() + 1), Some(centre_local))?
                .ok_or_else(|| {
                    Error::ReductionDomain(format!("no (A,B)-dominator in the ball of {}", center + 1))
                })?;
            core.extend(s.witness);
        }
    }
    let h = &hb.graph;
    for (u, v) in h.edges() {
        if !core.contains(&u) && !core.contains(&v) {
            plan.removed_edges.push((map[u], map[v]));
        }
    }
    // interior vertices outside the core, keyed by their neighbours in it
    let mut twins: BTreeMap<Vec<Vertex>, Vec<Vertex>> = BTreeMap::new();
    for y in h.vertices().filter(|y| !core.contains(y)) {
        let key = h.neighbors(y).iter().copied().filter(|w| core.contains(w)).collect();
        twins.entry(key).or_default().push(y);
    }
    plan.twin_classes = twins.len();
    for members in twins.values() {
        plan.removed_vertices.extend(members.iter().skip(2).map(|&y| map[y]));
    }
    plan.kept_core = core.into_iter().map(|v| map[v]).collect();
    Ok(plan)
}

fn mask_set(items: &[Vertex], mask: usize) -> VertexSet {
    items
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &v)| v)
        .collect()
}

/// Result of a graph edit: the new graph, new ids to old ids, and `X` in new
/// ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Replacement {
    #[serde(skip)]
    pub graph: Graph,
    pub vertex_map: Vec<Vertex>,
    pub x_set: VertexSet,
}

fn apply(g: &Graph, x_set: &VertexSet, edges: &[(Vertex, Vertex)], vertices: &VertexSet) -> Replacement {
    let (graph, vertex_map) = g.remove(edges, vertices);
    let x_set = vertex_map
        .iter()
        .enumerate()
        .filter(|(_, v)| x_set.contains(v))
        .map(|(i, _)| i)
        .collect();
    Replacement {
        graph,
        vertex_map,
        x_set,
    }
}

/// Replaces the ball of `center` and returns the edited graph with its plan.
pub fn replace_ball(g: &Graph, x_set: &VertexSet, center: Vertex, cap: usize) -> Result<(Replacement, BallPlan)> {
    let plan = plan_ball(g, x_set, center, cap)?;
    let rep = apply(g, x_set, &plan.removed_edges, &plan.removed_vertices);
    Ok((rep, plan))
}

/// `χ[A, B]` for all `A, B ⊆ anchor`, capped at `|A| + |B| + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CharacteristicVector {
    /// Anchor in ascending order; masks index into it.
    pub anchor: Vec<Vertex>,
    /// Row-major over `(A mask, B mask)`; `None` is infinity.
    pub values: Vec<Option<usize>>,
}

impl CharacteristicVector {
    pub fn get(&self, a_mask: usize, b_mask: usize) -> Option<usize> {
        self.values[a_mask << self.anchor.len() | b_mask]
    }
}

pub fn characteristic_vector(h: &BoundariedGraph, anchor: &VertexSet, cap: usize) -> Result<CharacteristicVector> {
    if anchor != &h.boundary {
        return Err(Error::Input("anchor must equal the boundary".into()));
    }
    let k = anchor.len();
    if k > cap {
        return Err(Error::Resource(format!("boundary of size {k} exceeds the cap of {cap}")));
    }
    let items: Vec<Vertex> = anchor.iter().copied().collect();
    let mut values = Vec::with_capacity(1 << (2 * k));
    for am in 0..1usize << k {
        let a = mask_set(&items, am);
        for bm in 0..1usize << k {
            let b = mask_set(&items, bm);
            let s = ab_dominator_min(h, &a, &b, Some(b.len() + 1))?;
            values.push(s.map(|s| s.size));
        }
    }
    Ok(CharacteristicVector { anchor: items, values })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub trace: Vec<Vertex>,
    pub members: usize,
    pub buckets: usize,
    pub kept: usize,
    pub removed: usize,
    pub offset: usize,
    pub skipped: bool,
}

/// Queued edits for a group of balls sharing `R'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPlan {
    pub balls: Vec<BallPlan>,
    pub deleted_centers: Vec<Vertex>,
    pub removed_edges: Vec<(Vertex, Vertex)>,
    pub removed_vertices: VertexSet,
    pub report: ClassReport,
}

/// Plans the class replacement for `group` (centres with a common `R'`).
pub fn plan_class(g: &Graph, x_set: &VertexSet, group: &[Vertex], cfg: &KernelConfig) -> Result<ClassPlan> {
    let residual = residual_of(g, x_set);
    let mut balls = Vec::with_capacity(group.len());
    for &c in group {
        balls.push(plan_ball(g, x_set, c, cfg.boundary_cap)?);
    }
    let trace = balls.first().map(|b| b.boundary.clone()).unwrap_or_default();
    if balls.iter().any(|b| b.boundary != trace) {
        return Err(Error::Input("balls of a class must share their boundary".into()));
    }
    let mut report = ClassReport {
        trace: trace.clone(),
        members: group.len(),
        buckets: 0,
        kept: group.len(),
        removed: 0,
        offset: 0,
        skipped: false,
    };
    let mut plan = ClassPlan {
        balls: Vec::new(),
        deleted_centers: Vec::new(),
        removed_edges: Vec::new(),
        removed_vertices: VertexSet::new(),
        report: report.clone(),
    };
    if trace.len() > cfg.boundary_cap {
        plan.balls = balls;
        plan.report.skipped = true;
        return Ok(plan);
    }
    let mut buckets: BTreeMap<CharacteristicVector, Vec<usize>> = BTreeMap::new();
    for (i, b) in balls.iter().enumerate() {
        let (h, map) = b.replaced_ball(g);
        let anchor = h.boundary.clone();
        let mut chi = characteristic_vector(&h, &anchor, cfg.boundary_cap)?;
        chi.anchor = chi.anchor.iter().map(|&v| map[v]).collect();
        buckets.entry(chi).or_default().push(i);
    }
    let survivors = match cfg.keep {
        KeepRule::Boundary => trace.len(),
        KeepRule::Residual => residual.len(),
    }
    .max(1);
    let mut deleted = vec![false; balls.len()];
    for members in buckets.values() {
        for &i in members.iter().skip(survivors) {
            deleted[i] = true;
        }
    }
    report.buckets = buckets.len();
    for (b, del) in balls.iter().zip(&deleted) {
        plan.removed_edges.extend(b.removed_edges.iter().copied());
        plan.removed_vertices.extend(b.removed_vertices.iter().copied());
        if *del {
            plan.deleted_centers.push(b.center);
            plan.removed_vertices.extend(closed_neighborhood(g, b.center));
        }
    }
    report.removed = plan.deleted_centers.len();
    report.kept = group.len() - report.removed;
    report.offset = report.removed;
    plan.balls = balls;
    plan.report = report;
    Ok(plan)
}

/// Applies [`plan_class`]; the offset `c` is in the report.
pub fn replace_class(
    g: &Graph,
    x_set: &VertexSet,
    group: &[Vertex],
    cfg: &KernelConfig,
) -> Result<(Replacement, ClassPlan)> {
    let plan = plan_class(g, x_set, group, cfg)?;
    let rep = apply(g, x_set, &plan.removed_edges, &plan.removed_vertices);
    Ok((rep, plan))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelReport {
    #[serde(skip)]
    pub reduced: Instance,
    /// `c`: the reduced instance needs exactly `c` fewer dominators.
    pub offset: usize,
    pub tau: usize,
    /// Centres with `|R_i| > 2τ`, original ids.
    pub large_balls: Vec<Vertex>,
    pub small_ball_groups: Vec<ClassReport>,
    /// Reduced ids to original ids.
    pub vertex_map: Vec<Vertex>,
    /// Budget verdict on the reduced instance, when already decided.
    pub verdict: Option<bool>,
    /// Canonical YES instance, when the budget settles the answer.
    #[serde(skip)]
    pub trivial: Option<Instance>,
    /// Per replaced ball: centre, `|core|`, its bound and the twin classes.
    pub ball_stats: Vec<BallStat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallStat {
    pub center: Vertex,
    pub boundary: usize,
    pub core: usize,
    pub core_bound: u128,
    pub twin_classes: usize,
    pub retained: usize,
}

pub fn kernelize(inst: &Instance, tau: usize, cfg: &KernelConfig) -> Result<KernelReport> {
    if inst.radius < 3 {
        return Err(Error::UnsupportedRadius {
            need: 3,
            got: inst.radius,
        });
    }
    inst.validate()?;
    let g = &inst.graph;
    let decomp = decompose_unchecked(g, &inst.x_set);
    let mut large_balls = Vec::new();
    let mut groups: BTreeMap<Vec<Vertex>, Vec<Vertex>> = BTreeMap::new();
    for (&x, ri) in decomp.x_order.iter().zip(&decomp.ball_residuals) {
        if ri.len() > 2 * tau {
            large_balls.push(x);
        } else {
            groups.entry(ri.iter().copied().collect()).or_default().push(x);
        }
    }
    let mut edges = Vec::new();
    let mut vertices = VertexSet::new();
    let mut reports = Vec::new();
    let mut ball_stats = Vec::new();
    let mut offset = 0;
    for group in groups.values() {
        let plan = plan_class(g, &inst.x_set, group, cfg)?;
        for b in plan.balls.iter().filter(|b| !b.skipped) {
            ball_stats.push(BallStat {
                center: b.center,
                boundary: b.boundary.len(),
                core: b.kept_core.len(),
                core_bound: b.core_bound(),
                twin_classes: b.twin_classes,
                retained: b.retained(g).len(),
            });
        }
        offset += plan.report.offset;
        edges.extend(plan.removed_edges);
        vertices.extend(plan.removed_vertices);
        reports.push(plan.report);
    }
    let rep = apply(g, &inst.x_set, &edges, &vertices);
    let reduced = Instance::new(rep.graph, rep.x_set, inst.radius, inst.budget - offset as i64);
    reduced.validate()?;
    let verdict = reduced.trivial_verdict()?;
    let trivial = (verdict == Some(true)).then(|| Instance::new(Graph::empty(1), VertexSet::from([0]), inst.radius, 1));
    Ok(KernelReport {
        reduced,
        offset,
        tau,
        large_balls,
        small_ball_groups: reports,
        vertex_map: rep.vertex_map,
        verdict,
        trivial,
        ball_stats,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct R4Reduction {
    #[serde(skip)]
    pub instance: Instance,
    /// Original ids.
    pub removed_centers: Vec<Vertex>,
    pub vertex_map: Vec<Vertex>,
}

/// Deletes `N[x]` for every centre with `N²(x) ∩ R = ∅`, one budget unit
/// each, until none is left.
pub fn reduce_r4(inst: &Instance) -> Result<R4Reduction> {
    if inst.radius < 4 {
        return Err(Error::UnsupportedRadius {
            need: 4,
            got: inst.radius,
        });
    }
    inst.validate()?;
    let mut cur = inst.clone();
    let mut map: Vec<Vertex> = inst.graph.vertices().collect();
    let mut removed_centers = Vec::new();
    loop {
        let decomp = decompose_unchecked(&cur.graph, &cur.x_set);
        let doomed: Vec<Vertex> = decomp
            .x_order
            .iter()
            .zip(&decomp.ball_residuals)
            .filter(|(_, ri)| ri.is_empty())
            .map(|(&x, _)| x)
            .collect();
        if doomed.is_empty() {
            break;
        }
        let mut gone = VertexSet::new();
        for &x in &doomed {
            gone.extend(closed_neighborhood(&cur.graph, x));
            removed_centers.push(map[x]);
        }
        let rep = apply(&cur.graph, &cur.x_set, &[], &gone);
        map = rep.vertex_map.iter().map(|&v| map[v]).collect();
        cur = Instance::new(rep.graph, rep.x_set, cur.radius, cur.budget - doomed.len() as i64);
    }
    removed_centers.sort_unstable();
    Ok(R4Reduction {
        instance: cur,
        removed_centers,
        vertex_map: map,
    })
}

/// Edges of `reduced` that are missing in `original` under `map`, or a
/// non-injective map; empty when `reduced` is a subgraph.
pub fn subgraph_violations(original: &Graph, reduced: &Graph, map: &[Vertex]) -> Vec<(Vertex, Vertex)> {
    let distinct: BTreeSet<Vertex> = map.iter().copied().collect();
    if distinct.len() != map.len() || map.len() != reduced.vertex_count() {
        return vec![(usize::MAX, usize::MAX)];
    }
    reduced
        .edges()
        .filter(|&(u, v)| !original.has_edge(map[u], map[v]))
        .collect()
}
