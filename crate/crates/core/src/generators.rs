//! Reduction gadgets and seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, Vertex, VertexSet};
use crate::instance::{greedy_maximal_r_independent, residual_of, Instance};
use crate::oracle::{ds_exact, CnfFormula, ColourfulInstance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeGadget {
    pub s: Vertex,
    pub r: Vertex,
    /// Connector vertices between the children and `s`; empty on the
    /// clause level.
    pub a: Vec<Vertex>,
    /// Clause vertices or `r` vertices of the level below.
    pub children: Vec<Vertex>,
}

/// Roles of the vertices produced by a reduction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GadgetMap {
    /// `(x_i, t_i, f_i)` per variable.
    pub variable_vertices: Vec<(Vertex, Vertex, Vertex)>,
    pub clause_vertices: Vec<Vertex>,
    pub tree_gadgets: Vec<TreeGadget>,
    /// `(y_1, y_2, y_3)`.
    pub y_vertices: Option<(Vertex, Vertex, Vertex)>,
    /// `a_0, .., a_k`.
    pub apex_vertices: Vec<Vertex>,
    /// Built from a formula asserted to be planar.
    pub apex: bool,
}

impl GadgetMap {
    /// All ids named by the map, with repetitions if roles overlap.
    pub fn all_vertices(&self) -> Vec<Vertex> {
        let mut out = Vec::new();
        for &(x, t, f) in &self.variable_vertices {
            out.extend([x, t, f]);
        }
        out.extend(&self.clause_vertices);
        for t in &self.tree_gadgets {
            out.extend([t.s, t.r]);
            out.extend(&t.a);
        }
        if let Some((a, b, c)) = self.y_vertices {
            // the last tree gadget doubles as y_1, y_2 in the tree variant
            if self.tree_gadgets.is_empty() {
                out.extend([a, b]);
            }
            out.push(c);
        }
        out.extend(&self.apex_vertices);
        out
    }
}

fn literal_vertex(vars: &[(Vertex, Vertex, Vertex)], lit: i32) -> Vertex {
    let (_, t, f) = vars[lit.unsigned_abs() as usize - 1];
    if lit > 0 {
        t
    } else {
        f
    }
}

fn variable_gadgets(b: &mut GraphBuilder, n: usize) -> Result<Vec<(Vertex, Vertex, Vertex)>> {
    let mut vars = Vec::with_capacity(n);
    for _ in 0..n {
        let (x, t, f) = (b.add_vertex(), b.add_vertex(), b.add_vertex());
        b.add_edge(x, t)?;
        b.add_edge(x, f)?;
        b.add_edge(t, f)?;
        vars.push((x, t, f));
    }
    Ok(vars)
}

fn clause_vertices(b: &mut GraphBuilder, f: &CnfFormula, vars: &[(Vertex, Vertex, Vertex)]) -> Result<Vec<Vertex>> {
    let mut out = Vec::with_capacity(f.clauses.len());
    for c in &f.clauses {
        let cv = b.add_vertex();
        for &l in c {
            b.add_edge(cv, literal_vertex(vars, l))?;
        }
        out.push(cv);
    }
    Ok(out)
}

/// Variable triangles, a vertex per clause, and `y_1` joined to every
/// clause with the path `y_1 y_2 y_3`. `X = {x_i} ∪ {y_1}`, `r = 2`,
/// `p = |X|`.
pub fn from_3sat(f: &CnfFormula) -> Result<(Instance, GadgetMap)> {
    if let Some(j) = f.clauses.iter().position(|c| c.is_empty() || c.len() > 3) {
        return Err(Error::ReductionDomain(format!(
            "clause {} has {} literals; 1 to 3 are allowed",
            j + 1,
            f.clauses[j].len()
        )));
    }
    let mut b = GraphBuilder::new(0);
    let vars = variable_gadgets(&mut b, f.variable_count)?;
    let clauses = clause_vertices(&mut b, f, &vars)?;
    let (y1, y2, y3) = (b.add_vertex(), b.add_vertex(), b.add_vertex());
    for &c in &clauses {
        b.add_edge(y1, c)?;
    }
    b.add_edge(y1, y2)?;
    b.add_edge(y2, y3)?;
    let mut x_set: VertexSet = vars.iter().map(|v| v.0).collect();
    x_set.insert(y1);
    let budget = x_set.len() as i64;
    let map = GadgetMap {
        variable_vertices: vars,
        clause_vertices: clauses,
        y_vertices: Some((y1, y2, y3)),
        ..GadgetMap::default()
    };
    Ok((Instance::new(b.build(), x_set, 2, budget), map))
}

/// [`from_3sat`] with the apex flag set; the construction is the same.
pub fn apex_from_planar_3sat(f: &CnfFormula) -> Result<(Instance, GadgetMap)> {
    let (inst, mut map) = from_3sat(f)?;
    map.apex = true;
    Ok((inst, map))
}

/// Splits `items` into pairs, the last group a triple when the count is odd.
/// A single item forms its own group.
fn pair_up(items: &[Vertex]) -> Vec<Vec<Vertex>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut groups: Vec<Vec<Vertex>> = items.chunks(2).map(<[Vertex]>::to_vec).collect();
    if items.len() % 2 == 1 {
        let last = groups.pop().unwrap();
        groups.last_mut().unwrap().extend(last);
    }
    groups
}

/// The bounded-degree variant: the clause vertices become the leaves of a
/// tree of gadgets whose root carries `y_3`. Requires exactly three literals
/// per clause and at most four clauses per variable.
pub fn from_34sat(f: &CnfFormula) -> Result<(Instance, GadgetMap)> {
    if let Some(j) = f.clauses.iter().position(|c| c.len() != 3) {
        return Err(Error::ReductionDomain(format!("clause {} does not have 3 literals", j + 1)));
    }
    if let Some((v, occ)) = f.occurrences().into_iter().enumerate().find(|&(_, o)| o > 4) {
        return Err(Error::ReductionDomain(format!("variable {} occurs in {occ} clauses", v + 1)));
    }
    let mut b = GraphBuilder::new(0);
    let vars = variable_gadgets(&mut b, f.variable_count)?;
    let clauses = clause_vertices(&mut b, f, &vars)?;
    let mut x_set: VertexSet = vars.iter().map(|v| v.0).collect();
    let mut gadgets = Vec::new();
    let mut level = Vec::new();
    for group in pair_up(&clauses) {
        let (s, r) = (b.add_vertex(), b.add_vertex());
        for &c in &group {
            b.add_edge(c, s)?;
        }
        b.add_edge(s, r)?;
        x_set.insert(s);
        level.push(r);
        gadgets.push(TreeGadget {
            s,
            r,
            a: vec![],
            children: group,
        });
    }
    while level.len() > 1 {
        let mut next = Vec::new();
        for group in pair_up(&level) {
            let s = b.add_vertex();
            let mut a = Vec::with_capacity(group.len());
            for &child in &group {
                let ai = b.add_vertex();
                b.add_edge(child, ai)?;
                b.add_edge(ai, s)?;
                a.push(ai);
            }
            let r = b.add_vertex();
            b.add_edge(s, r)?;
            x_set.insert(s);
            next.push(r);
            gadgets.push(TreeGadget { s, r, a, children: group });
        }
        level = next;
    }
    let root = gadgets.last().expect("at least one gadget");
    let (y1, y2) = (root.s, root.r);
    let y3 = b.add_vertex();
    b.add_edge(y2, y3)?;
    let g = b.build();
    let max_degree = g.max_degree();
    if max_degree > 6 {
        return Err(Error::ReductionDomain(format!("construction reached degree {max_degree}")));
    }
    let budget = x_set.len() as i64;
    let map = GadgetMap {
        variable_vertices: vars,
        clause_vertices: clauses,
        tree_gadgets: gadgets,
        y_vertices: Some((y1, y2, y3)),
        ..GadgetMap::default()
    };
    Ok((Instance::new(g, x_set, 2, budget), map))
}

/// Completes every colour class to a clique, hangs `a_i` on `C_i` and joins
/// `a_0` to all original vertices. `X = {a_0}`, `p = k`.
pub fn from_colourful(c: &ColourfulInstance, radius: usize) -> Result<(Instance, GadgetMap)> {
    if radius < 2 {
        return Err(Error::UnsupportedRadius { need: 2, got: radius });
    }
    let k = c.colour_count();
    if k == 0 {
        return Err(Error::ReductionDomain("at least one colour class is required".into()));
    }
    if let Some(i) = (1..=k).find(|&i| c.blocks[i].is_empty()) {
        return Err(Error::ReductionDomain(format!("colour class {i} is empty")));
    }
    let n = c.graph.vertex_count();
    let mut b = GraphBuilder::new(n + k + 1);
    for (u, v) in c.graph.edges() {
        b.add_edge(u, v)?;
    }
    let a0 = n;
    for v in 0..n {
        b.add_edge(a0, v)?;
    }
    for i in 1..=k {
        let block: Vec<Vertex> = c.blocks[i].iter().copied().collect();
        for (j, &u) in block.iter().enumerate() {
            b.add_edge(n + i, u)?;
            for &v in &block[j + 1..] {
                b.add_edge(u, v)?;
            }
        }
    }
    let map = GadgetMap {
        apex_vertices: (n..=n + k).collect(),
        ..GadgetMap::default()
    };
    Ok((Instance::new(b.build(), VertexSet::from([a0]), radius, k as i64), map))
}

/// `C_0` is the red set (ids `0..|red|` in ascending original order); each of
/// the `k` colour classes is a copy of the blue set, joined to the red
/// neighbours of its original.
pub fn redblue_to_colourful(g: &Graph, red: &VertexSet, blue: &VertexSet, k: usize) -> Result<ColourfulInstance> {
    if k == 0 {
        return Err(Error::Input("k must be at least 1".into()));
    }
    g.check_set(red)?;
    g.check_set(blue)?;
    if !red.is_disjoint(blue) || red.len() + blue.len() != g.vertex_count() {
        return Err(Error::Input("red and blue must partition the vertex set".into()));
    }
    let red_ids: Vec<Vertex> = red.iter().copied().collect();
    let blue_ids: Vec<Vertex> = blue.iter().copied().collect();
    let mut new_id = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in red_ids.iter().enumerate() {
        new_id[v] = i;
    }
    let nr = red_ids.len();
    let nb = blue_ids.len();
    let mut b = GraphBuilder::new(nr + k * nb);
    let mut blocks = vec![(0..nr).collect::<VertexSet>()];
    for copy in 0..k {
        let base = nr + copy * nb;
        blocks.push((base..base + nb).collect());
        for (j, &u) in blue_ids.iter().enumerate() {
            for &w in g.neighbors(u) {
                if red.contains(&w) {
                    b.add_edge(base + j, new_id[w])?;
                }
            }
        }
    }
    ColourfulInstance::new(b.build(), blocks)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RandomModel {
    ErdosRenyi { p: f64 },
    /// Random edges while both endpoints have degree below `d`.
    BoundedDegree { d: usize },
    /// Random stacked triangulation with each edge kept with probability
    /// `keep`.
    PlanarIsh { keep: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum BudgetPolicy {
    /// `ds_exact` when `n ≤ 20`, else `|X| + |R|/2` rounded.
    #[default]
    Auto,
    Fixed(i64),
    /// `|X| + extra`.
    AboveX(i64),
}

pub const EXACT_BUDGET_LIMIT: usize = 20;

fn budget_for(g: &Graph, x_set: &VertexSet, policy: BudgetPolicy) -> i64 {
    match policy {
        BudgetPolicy::Fixed(p) => p,
        BudgetPolicy::AboveX(extra) => x_set.len() as i64 + extra,
        BudgetPolicy::Auto if g.vertex_count() <= EXACT_BUDGET_LIMIT => ds_exact(g).size as i64,
        BudgetPolicy::Auto => {
            let r = residual_of(g, x_set).len();
            x_set.len() as i64 + (r as f64 / 2.0).round() as i64
        }
    }
}

pub fn random_graph(n: usize, model: RandomModel, rng: &mut ChaCha8Rng) -> Graph {
    let mut b = GraphBuilder::new(n);
    match model {
        RandomModel::ErdosRenyi { p } => {
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(p.clamp(0.0, 1.0)) {
                        b.add_edge(u, v).expect("valid pair");
                    }
                }
            }
        }
        RandomModel::BoundedDegree { d } => {
            let mut deg = vec![0usize; n];
            if n >= 2 {
                for _ in 0..n * d {
                    let u = rng.random_range(0..n);
                    let v = rng.random_range(0..n);
                    if u != v && deg[u] < d && deg[v] < d && !b.has_edge(u, v) {
                        b.add_edge(u, v).expect("valid pair");
                        deg[u] += 1;
                        deg[v] += 1;
                    }
                }
            }
        }
        RandomModel::PlanarIsh { keep } => {
            let mut edges = Vec::new();
            if n >= 2 {
                edges.push((0, 1));
            }
            if n >= 3 {
                edges.extend([(0, 2), (1, 2)]);
                let mut faces = vec![[0, 1, 2]];
                for v in 3..n {
                    let i = rng.random_range(0..faces.len());
                    let [a, bb, c] = faces.swap_remove(i);
                    edges.extend([(a, v), (bb, v), (c, v)]);
                    faces.extend([[a, bb, v], [a, c, v], [bb, c, v]]);
                }
            }
            for (u, v) in edges {
                if rng.random_bool(keep.clamp(0.0, 1.0)) {
                    b.add_edge(u, v).expect("valid pair");
                }
            }
        }
    }
    b.build()
}

/// Random graph with `X` from [`greedy_maximal_r_independent`] after a
/// seeded relabelling.
pub fn random_instance(n: usize, model: RandomModel, radius: usize, seed: u64, policy: BudgetPolicy) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_graph(n, model, &mut rng);
    let mut perm: Vec<Vertex> = (0..n).collect();
    perm.shuffle(&mut rng);
    let g = Graph::from_edges(n, base.edges().map(|(u, v)| (perm[u], perm[v]))).expect("relabelled edges");
    let x_set = greedy_maximal_r_independent(&g, radius.max(1));
    let budget = budget_for(&g, &x_set, policy);
    Instance::new(g, x_set, radius, budget)
}

/// Shape of [`planted_instance`] outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlantedConfig {
    /// Distinct ball shapes.
    pub templates: usize,
    /// Each template is copied a number of times drawn from this range.
    pub copies: (usize, usize),
    /// Neighbours per centre, drawn from this range.
    pub leaves: (usize, usize),
    /// Size of the residual pool.
    pub pool: usize,
    /// Largest `|R_i|` of a ball.
    pub max_trace: usize,
    pub leaf_edge_prob: f64,
    pub pool_edge_prob: f64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            templates: 3,
            copies: (1, 2),
            leaves: (1, 3),
            pool: 3,
            max_trace: 2,
            leaf_edge_prob: 0.3,
            pool_edge_prob: 0.2,
        }
    }
}

struct Template {
    trace: Vec<usize>,
    /// Per leaf, pool indices it sees.
    leaf_traces: Vec<Vec<usize>>,
    leaf_edges: Vec<(usize, usize)>,
}

fn random_template(cfg: &PlantedConfig, rng: &mut ChaCha8Rng) -> Template {
    let leaves = rng.random_range(cfg.leaves.0.max(1)..=cfg.leaves.1.max(cfg.leaves.0.max(1)));
    let mut pool: Vec<usize> = (0..cfg.pool).collect();
    pool.shuffle(rng);
    let t = rng.random_range(0..=cfg.max_trace.min(cfg.pool));
    let mut trace: Vec<usize> = pool[..t].to_vec();
    trace.sort_unstable();
    let mut leaf_traces: Vec<Vec<usize>> = (0..leaves)
        .map(|_| trace.iter().copied().filter(|_| rng.random_bool(0.5)).collect())
        .collect();
    // every traced pool vertex needs a leaf that sees it
    for &p in &trace {
        if !leaf_traces.iter().any(|lt| lt.contains(&p)) {
            let i = rng.random_range(0..leaves);
            leaf_traces[i].push(p);
            leaf_traces[i].sort_unstable();
        }
    }
    let mut leaf_edges = Vec::new();
    for i in 0..leaves {
        for j in i + 1..leaves {
            if rng.random_bool(cfg.leaf_edge_prob.clamp(0.0, 1.0)) {
                leaf_edges.push((i, j));
            }
        }
    }
    Template {
        trace,
        leaf_traces,
        leaf_edges,
    }
}

/// Instances built from balls around planted centres that reach into a
/// shared residual pool. Copies of a template are isomorphic with the same
/// boundary, so they share their characteristic vector. Pool vertices that
/// no template reaches are attached to an extra ball. The radius is 3.
pub fn planted_instance(cfg: &PlantedConfig, seed: u64, policy: BudgetPolicy) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut templates: Vec<Template> = (0..cfg.templates.max(1)).map(|_| random_template(cfg, &mut rng)).collect();
    let reached: VertexSet = templates.iter().flat_map(|t| t.trace.iter().copied()).collect();
    let missing: Vec<usize> = (0..cfg.pool).filter(|p| !reached.contains(p)).collect();
    for chunk in missing.chunks(cfg.max_trace.max(1)) {
        templates.push(Template {
            trace: chunk.to_vec(),
            leaf_traces: vec![chunk.to_vec()],
            leaf_edges: vec![],
        });
    }
    let mut b = GraphBuilder::new(cfg.pool);
    for u in 0..cfg.pool {
        for v in u + 1..cfg.pool {
            if rng.random_bool(cfg.pool_edge_prob.clamp(0.0, 1.0)) {
                b.add_edge(u, v).expect("valid pair");
            }
        }
    }
    let mut x_set = VertexSet::new();
    for (ti, t) in templates.iter().enumerate() {
        let copies = if ti < cfg.templates.max(1) {
            rng.random_range(cfg.copies.0.max(1)..=cfg.copies.1.max(cfg.copies.0.max(1)))
        } else {
            1
        };
        for _ in 0..copies {
            let x = b.add_vertex();
            x_set.insert(x);
            let leaves: Vec<Vertex> = t.leaf_traces.iter().map(|_| b.add_vertex()).collect();
            for (&y, lt) in leaves.iter().zip(&t.leaf_traces) {
                b.add_edge(x, y).expect("fresh vertices");
                for &p in lt {
                    b.add_edge(y, p).expect("pool vertex");
                }
            }
            for &(i, j) in &t.leaf_edges {
                b.add_edge(leaves[i], leaves[j]).expect("fresh vertices");
            }
        }
    }
    let g = b.build();
    let budget = budget_for(&g, &x_set, policy);
    Instance::new(g, x_set, 3, budget)
}

/// Random formula with `m` clauses of `width` literals over `n` variables.
pub fn random_cnf(n: usize, m: usize, width: usize, rng: &mut ChaCha8Rng) -> CnfFormula {
    let clauses = (0..m)
        .map(|_| {
            (0..width)
                .map(|_| {
                    let v = rng.random_range(1..=n as i32);
                    if rng.random_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    CnfFormula::new(n, clauses).expect("literals in range")
}

/// Random formula with three distinct variables per clause and at most four
/// clauses per variable; `None` if the draw keeps failing.
pub fn random_34cnf(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Option<CnfFormula> {
    if n < 3 || 3 * m > 4 * n {
        return None;
    }
    'attempt: for _ in 0..100 {
        let mut occ = vec![0usize; n];
        let mut clauses = Vec::with_capacity(m);
        for _ in 0..m {
            let mut free: Vec<usize> = (0..n).filter(|&v| occ[v] < 4).collect();
            if free.len() < 3 {
                continue 'attempt;
            }
            free.shuffle(rng);
            let clause = free[..3]
                .iter()
                .map(|&v| {
                    occ[v] += 1;
                    let lit = v as i32 + 1;
                    if rng.random_bool(0.5) {
                        lit
                    } else {
                        -lit
                    }
                })
                .collect();
            clauses.push(clause);
        }
        return Some(CnfFormula::new(n, clauses).expect("literals in range"));
    }
    None
}
