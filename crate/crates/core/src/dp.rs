//! Exact solver for instances with `r ≥ 3`.
//!
//! The solver guesses the part `D_R` of the solution inside the residual set,
//! groups `N(X)` by its trace on the still undominated residual vertices
//! `R'`, guesses which traces the solution covers and then runs a subset
//! dynamic program over the balls `N[x_1], .., N[x_ℓ]`. For `r ≥ 3` the balls
//! are pairwise non-adjacent, so each one is an independent annotated
//! domination subproblem.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Add;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::classes::{distinct_traces, partition_by_trace};
use crate::error::{Error, Result};
use crate::graph::{is_dominating, Graph, Vertex, VertexSet};
use crate::instance::{Instance, ResidualDecomposition};
use crate::oracle::{annotated_ds_exact, AnnotatedInstance, Solution};

pub const DEFAULT_MASK_WIDTH_GUARD: usize = 20;
pub const DEFAULT_RESIDUAL_GUARD: usize = 24;

/// A table cost; `Infinite` marks an unreachable entry and absorbs addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Cost {
    Finite(usize),
    Infinite,
}

impl Cost {
    pub fn finite(self) -> Option<usize> {
        match self {
            Cost::Finite(c) => Some(c),
            Cost::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a.saturating_add(b)),
            _ => Cost::Infinite,
        }
    }
}

impl From<Option<usize>> for Cost {
    fn from(v: Option<usize>) -> Self {
        v.map_or(Cost::Infinite, Cost::Finite)
    }
}

/// Per-ball subproblem solver.
pub trait AnnotatedSolver: Sync {
    fn solve(&self, instance: &AnnotatedInstance) -> Option<Solution>;
}

/// The exhaustive oracle.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExhaustiveSolver;

impl AnnotatedSolver for ExhaustiveSolver {
    fn solve(&self, instance: &AnnotatedInstance) -> Option<Solution> {
        annotated_ds_exact(instance)
    }
}

impl<F> AnnotatedSolver for F
where
    F: Fn(&AnnotatedInstance) -> Option<Solution> + Sync,
{
    fn solve(&self, instance: &AnnotatedInstance) -> Option<Solution> {
        self(instance)
    }
}

/// How `T_{i+1}[S]` combines a previous entry with the current ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitRule {
    /// `S = S1 ⊎ S2` with `S2 ⊆ S` and `S1 = S ∖ S2`.
    #[default]
    Disjoint,
    /// Every pair with `S1 ∪ S2 = S`.
    AnyUnion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpConfig {
    /// Largest number of covered traces a single table may range over.
    pub mask_width_guard: usize,
    /// Largest residual set whose subsets are enumerated.
    pub residual_guard: usize,
    pub split: SplitRule,
    pub parallel: bool,
}

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig {
            mask_width_guard: DEFAULT_MASK_WIDTH_GUARD,
            residual_guard: DEFAULT_RESIDUAL_GUARD,
            split: SplitRule::Disjoint,
            parallel: true,
        }
    }
}

/// One guessed `(D_R, R', 𝓡')` combination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpBranch {
    pub residual_choice: VertexSet,
    pub undominated_residual: VertexSet,
    /// Distinct traces of `N(X)` on `R'`, canonical order.
    pub trace_family: Vec<Vec<Vertex>>,
    /// Indices into `trace_family`, ascending.
    pub covered_guess: Vec<usize>,
}

impl DpBranch {
    /// Branch for `D_R = residual_choice` with an empty coverage guess.
    pub fn new(g: &Graph, decomp: &ResidualDecomposition, residual_choice: VertexSet) -> Result<Self> {
        if !residual_choice.is_subset(&decomp.residual) {
            return Err(Error::Input("D_R must be a subset of R".into()));
        }
        let undominated_residual = undominated_residual(g, &decomp.residual, &residual_choice);
        let partition = partition_by_trace(g, &decomp.x_neighbors(), &undominated_residual);
        Ok(DpBranch {
            residual_choice,
            undominated_residual,
            trace_family: distinct_traces(&partition),
            covered_guess: Vec::new(),
        })
    }

    pub fn with_guess(mut self, mut guess: Vec<usize>) -> Result<Self> {
        guess.sort_unstable();
        guess.dedup();
        if guess.iter().any(|&i| i >= self.trace_family.len()) {
            return Err(Error::Input("guess refers to a trace outside the family".into()));
        }
        self.covered_guess = guess;
        Ok(self)
    }

    pub fn covered_traces(&self) -> Vec<&Vec<Vertex>> {
        self.covered_guess.iter().map(|&i| &self.trace_family[i]).collect()
    }

    /// The guessed traces together cover `R'`.
    pub fn is_viable(&self) -> bool {
        let covered: VertexSet = self.covered_traces().into_iter().flatten().copied().collect();
        self.undominated_residual.is_subset(&covered)
    }
}

/// `R ∖ N[D_R]`.
fn undominated_residual(g: &Graph, residual: &VertexSet, choice: &VertexSet) -> VertexSet {
    residual
        .iter()
        .copied()
        .filter(|v| !choice.contains(v) && !g.neighbors(*v).iter().any(|w| choice.contains(w)))
        .collect()
}

/// For each selected trace, the vertices of `ball_nbrs` whose neighbourhood
/// inside `anchor` is exactly that trace. Empty sets are kept; they make the
/// subproblem infeasible.
pub fn trace_preimage(
    family: &[Vec<Vertex>],
    selected: &[usize],
    g: &Graph,
    ball_nbrs: &VertexSet,
    anchor: &VertexSet,
) -> Vec<VertexSet> {
    selected
        .iter()
        .map(|&i| {
            let want = &family[i];
            ball_nbrs
                .iter()
                .copied()
                .filter(|&y| {
                    let t: Vec<Vertex> = g
                        .neighbors(y)
                        .iter()
                        .copied()
                        .filter(|w| anchor.contains(w))
                        .collect();
                    &t == want
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpEntry {
    pub cost: Cost,
    pub witness: VertexSet,
}

/// `T_i`, indexed by bitmask over the positions of the covered guess.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpTable {
    pub level: usize,
    pub entries: Vec<DpEntry>,
}

impl DpTable {
    fn base(width: usize) -> Self {
        let mut entries = vec![
            DpEntry {
                cost: Cost::Infinite,
                witness: VertexSet::new(),
            };
            1 << width
        ];
        entries[0].cost = Cost::Finite(0);
        DpTable { level: 0, entries }
    }

    pub fn cost(&self, mask: usize) -> Cost {
        self.entries[mask].cost
    }

    pub fn full_mask(&self) -> usize {
        self.entries.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpOutcome {
    pub cost: Cost,
    pub witness: VertexSet,
}

/// `G[N[x]]` with local ids in ascending global order.
#[derive(Debug, Clone)]
struct Ball {
    center: Vertex,
    vertices: Vec<Vertex>,
    graph: Graph,
}

impl Ball {
    fn local(&self, v: Vertex) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }
}

/// Immutable per-instance data shared by all branches.
pub struct DpContext<'a, S: AnnotatedSolver> {
    graph: &'a Graph,
    balls: Vec<Ball>,
    solver: &'a S,
    config: DpConfig,
    oracle_calls: AtomicUsize,
}

/// Per-`D_R` data: exempt sets and trace classes of every ball, plus the
/// subproblem memo shared by all guesses of that `D_R`.
struct BranchState {
    exempt: Vec<VertexSet>,
    /// Per ball: family index to the local ids of `N(x)` with that trace.
    classes: Vec<BTreeMap<usize, VertexSet>>,
    memo: HashMap<(usize, Vec<usize>), Option<Solution>>,
}

impl<'a, S: AnnotatedSolver> DpContext<'a, S> {
    pub fn new(graph: &'a Graph, decomp: &'a ResidualDecomposition, solver: &'a S, config: DpConfig) -> Self {
        let balls = decomp
            .x_order
            .iter()
            .zip(&decomp.balls)
            .map(|(&center, ball)| {
                let (graph, vertices) = graph.induced_subgraph(ball);
                Ball {
                    center,
                    vertices,
                    graph,
                }
            })
            .collect();
        DpContext {
            graph,
            balls,
            solver,
            config,
            oracle_calls: AtomicUsize::new(0),
        }
    }

    pub fn oracle_calls(&self) -> usize {
        self.oracle_calls.load(Ordering::Relaxed)
    }

    fn branch_state(&self, branch: &DpBranch) -> BranchState {
        let g = self.graph;
        let dominated_by_choice: VertexSet = branch
            .residual_choice
            .iter()
            .flat_map(|&d| g.neighbors(d).iter().copied())
            .collect();
        let family_index: BTreeMap<&Vec<Vertex>, usize> =
            branch.trace_family.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut exempt = Vec::with_capacity(self.balls.len());
        let mut classes = Vec::with_capacity(self.balls.len());
        for ball in &self.balls {
            exempt.push(
                ball.vertices
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| dominated_by_choice.contains(v))
                    .map(|(i, _)| i)
                    .collect(),
            );
            let mut by_trace: BTreeMap<usize, VertexSet> = BTreeMap::new();
            for &y in g.neighbors(ball.center) {
                let t: Vec<Vertex> = g
                    .neighbors(y)
                    .iter()
                    .copied()
                    .filter(|w| branch.undominated_residual.contains(w))
                    .collect();
                if let Some(&f) = family_index.get(&t) {
                    by_trace.entry(f).or_default().insert(ball.local(y).unwrap());
                }
            }
            classes.push(by_trace);
        }
        BranchState {
            exempt,
            classes,
            memo: HashMap::new(),
        }
    }

    /// `γ` for ball `i` and the family indices in `traces`, witness in
    /// global ids.
    fn gamma(&self, st: &mut BranchState, i: usize, traces: Vec<usize>) -> Option<Solution> {
        let key = (i, traces);
        if let Some(hit) = st.memo.get(&key) {
            return hit.clone();
        }
        let mut groups = Vec::with_capacity(key.1.len());
        let mut feasible = true;
        for f in &key.1 {
            match st.classes[i].get(f) {
                Some(m) if !m.is_empty() => groups.push(m.clone()),
                _ => {
                    feasible = false;
                    break;
                }
            }
        }
        let result = if feasible {
            self.oracle_calls.fetch_add(1, Ordering::Relaxed);
            let ball = &self.balls[i];
            let sub = AnnotatedInstance {
                graph: ball.graph.clone(),
                exempt: st.exempt[i].clone(),
                size_cap: Some(groups.len() + 1),
                required_groups: groups,
            };
            self.solver
                .solve(&sub)
                .map(|s| Solution::new(s.witness.iter().map(|&l| ball.vertices[l]).collect()))
        } else {
            None
        };
        st.memo.insert(key, result.clone());
        result
    }

    fn check_width(&self, width: usize) -> Result<()> {
        if width > self.config.mask_width_guard {
            return Err(Error::Resource(format!(
                "{width} covered traces exceed the mask width guard of {}",
                self.config.mask_width_guard
            )));
        }
        Ok(())
    }

    /// All tables `T_0..T_ℓ` for `branch`.
    pub fn tables(&self, branch: &DpBranch) -> Result<Vec<DpTable>> {
        let mut st = self.branch_state(branch);
        let mut out = Vec::new();
        self.run(&mut st, &branch.covered_guess, |t| out.push(t.clone()))?;
        Ok(out)
    }

    /// `T_ℓ` for `branch`.
    pub fn final_table(&self, branch: &DpBranch) -> Result<DpTable> {
        let mut st = self.branch_state(branch);
        self.run(&mut st, &branch.covered_guess, |_| {})
    }

    fn run(&self, st: &mut BranchState, guess: &[usize], mut observe: impl FnMut(&DpTable)) -> Result<DpTable> {
        let width = guess.len();
        self.check_width(width)?;
        let full = (1usize << width) - 1;
        let mut table = DpTable::base(width);
        observe(&table);
        for i in 0..self.balls.len() {
            let gammas: Vec<Option<Solution>> = (0..=full)
                .map(|m| {
                    let traces = (0..width).filter(|b| m >> b & 1 == 1).map(|b| guess[b]).collect();
                    self.gamma(st, i, traces)
                })
                .collect();
            let mut next = Vec::with_capacity(full + 1);
            for s in 0..=full {
                next.push(self.best_split(&table, &gammas, s));
            }
            table = DpTable {
                level: i + 1,
                entries: next,
            };
            observe(&table);
        }
        Ok(table)
    }

    fn best_split(&self, prev: &DpTable, gammas: &[Option<Solution>], s: usize) -> DpEntry {
        let mut best: Option<(Cost, usize, usize)> = None;
        let mut consider = |s1: usize, s2: usize| {
            let Some(g) = &gammas[s2] else { return };
            let c = prev.entries[s1].cost + Cost::Finite(g.size);
            if c.is_finite() && best.is_none_or(|(b, _, _)| c < b) {
                best = Some((c, s1, s2));
            }
        };
        let mut s2 = s;
        loop {
            let rest = s & !s2;
            match self.config.split {
                SplitRule::Disjoint => consider(rest, s2),
                SplitRule::AnyUnion => {
                    // s1 = rest ∪ (any part of s2)
                    let mut extra = s2;
                    loop {
                        consider(rest | extra, s2);
                        if extra == 0 {
                            break;
                        }
                        extra = (extra - 1) & s2;
                    }
                }
            }
            if s2 == 0 {
                break;
            }
            s2 = (s2 - 1) & s;
        }
        match best {
            Some((cost, s1, s2)) => {
                let mut witness = prev.entries[s1].witness.clone();
                witness.extend(gammas[s2].as_ref().unwrap().witness.iter().copied());
                DpEntry { cost, witness }
            }
            None => DpEntry {
                cost: Cost::Infinite,
                witness: VertexSet::new(),
            },
        }
    }
}

/// Runs the dynamic program for one branch: `T_ℓ[𝓡']` with its witness.
pub fn dp_run<S: AnnotatedSolver>(
    g: &Graph,
    decomp: &ResidualDecomposition,
    branch: &DpBranch,
    solver: &S,
) -> Result<DpOutcome> {
    let ctx = DpContext::new(g, decomp, solver, DpConfig::default());
    let t = ctx.final_table(branch)?;
    let e = &t.entries[t.full_mask()];
    Ok(DpOutcome {
        cost: e.cost,
        witness: e.witness.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Algorithm {
    /// Per `D_R`, one table per inclusion-minimal covering guess.
    Above3,
    /// Per `D_R`, one table over the whole trace family, read at every
    /// covering guess.
    Xp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchSummary {
    #[serde(rename = "D_R")]
    pub residual_choice: VertexSet,
    pub covered: Vec<Vec<Vertex>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub residual_branches: usize,
    pub pruned_branches: usize,
    pub guesses: usize,
    pub oracle_calls: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveOutcome {
    pub ds_size: usize,
    pub witness: VertexSet,
    /// `ds_size ≤ p`.
    pub verdict: bool,
    pub branch: BranchSummary,
    pub stats: SolveStats,
}

pub fn solve_above3(inst: &Instance) -> Result<SolveOutcome> {
    solve_with(inst, Algorithm::Above3, &DpConfig::default(), &ExhaustiveSolver)
}

pub fn solve_xp(inst: &Instance) -> Result<SolveOutcome> {
    solve_with(inst, Algorithm::Xp, &DpConfig::default(), &ExhaustiveSolver)
}

/// Subsets of `items` by increasing size, lexicographic within a size.
fn subsets_by_size(items: &[Vertex]) -> Vec<VertexSet> {
    let n = items.len();
    let mut out = Vec::with_capacity(1 << n);
    for k in 0..=n {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.iter().map(|&i| items[i]).collect());
            // next k-combination
            let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + n - k) else {
                break;
            };
            idx[pos] += 1;
            for q in pos + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    out
}

/// Inclusion-minimal sets of traces whose union is `target` (bitmasks over
/// `R'`). Returned as sorted index lists.
fn minimal_covers(masks: &[u64], target: u64) -> Vec<Vec<usize>> {
    fn go(masks: &[u64], target: u64, chosen: &mut Vec<usize>, covered: u64, out: &mut BTreeSet<Vec<usize>>) {
        if covered & target == target {
            let minimal = chosen.iter().enumerate().all(|(i, &c)| {
                let others = chosen
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .fold(0u64, |acc, (_, &o)| acc | masks[o]);
                masks[c] & target & !others != 0
            });
            if minimal {
                let mut key = chosen.clone();
                key.sort_unstable();
                out.insert(key);
            }
            return;
        }
        let missing = target & !covered;
        let bit = missing & missing.wrapping_neg();
        for (f, &m) in masks.iter().enumerate() {
            if m & bit != 0 && !chosen.contains(&f) {
                chosen.push(f);
                go(masks, target, chosen, covered | m, out);
                chosen.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(masks, target, &mut Vec::new(), 0, &mut out);
    out.into_iter().collect()
}

struct BranchResult {
    total: usize,
    witness: VertexSet,
    branch: DpBranch,
}

type BranchEval = Result<Option<(usize, BranchResult, usize)>>;

pub fn solve_with<S: AnnotatedSolver>(
    inst: &Instance,
    algorithm: Algorithm,
    config: &DpConfig,
    solver: &S,
) -> Result<SolveOutcome> {
    if inst.radius < 3 {
        return Err(Error::UnsupportedRadius {
            need: 3,
            got: inst.radius,
        });
    }
    let decomp = inst.decompose()?;
    let g = &inst.graph;
    let residual: Vec<Vertex> = decomp.residual.iter().copied().collect();
    if residual.len() > config.residual_guard {
        return Err(Error::Resource(format!(
            "|R| = {} exceeds the residual guard of {}",
            residual.len(),
            config.residual_guard
        )));
    }
    let ctx = DpContext::new(g, &decomp, solver, *config);
    let ell = decomp.len();
    let choices = subsets_by_size(&residual);
    let incumbent = AtomicUsize::new(usize::MAX);
    let pruned = AtomicUsize::new(0);

    let evaluate = |(idx, choice): (usize, &VertexSet)| -> BranchEval {
        // every viable branch pays at least one vertex per ball
        if choice.len() + ell > incumbent.load(Ordering::Relaxed) {
            pruned.fetch_add(1, Ordering::Relaxed);
            return Ok(None);
        }
        let base = DpBranch::new(g, &decomp, choice.clone())?;
        let r_prime: Vec<Vertex> = base.undominated_residual.iter().copied().collect();
        let bit_of = |v: &Vertex| 1u64 << r_prime.binary_search(v).unwrap();
        let masks: Vec<u64> = base
            .trace_family
            .iter()
            .map(|t| t.iter().fold(0, |acc, v| acc | bit_of(v)))
            .collect();
        let target = masks.iter().fold(0, |a, m| a | m);
        let all_r_prime = if r_prime.is_empty() { 0 } else { u64::MAX >> (64 - r_prime.len()) };
        if target != all_r_prime {
            // some vertex of R' sees no trace
            return Ok(None);
        }
        let mut best: Option<BranchResult> = None;
        let mut guesses = 0;
        let offer = |cost: Cost, witness: &VertexSet, guess: Vec<usize>, best: &mut Option<BranchResult>| -> Result<()> {
            let Some(c) = cost.finite() else { return Ok(()) };
            let total = c + choice.len();
            if best.as_ref().is_none_or(|b| total < b.total) {
                let mut w = witness.clone();
                w.extend(choice.iter().copied());
                *best = Some(BranchResult {
                    total,
                    witness: w,
                    branch: base.clone().with_guess(guess)?,
                });
            }
            Ok(())
        };
        match algorithm {
            Algorithm::Above3 => {
                let covers = minimal_covers(&masks, all_r_prime);
                guesses = covers.len();
                let mut st = ctx.branch_state(&base);
                for cover in covers {
                    let t = ctx.run(&mut st, &cover, |_| {})?;
                    let e = &t.entries[t.full_mask()];
                    offer(e.cost, &e.witness, cover, &mut best)?;
                }
            }
            Algorithm::Xp => {
                let all: Vec<usize> = (0..base.trace_family.len()).collect();
                let branch = base.clone().with_guess(all)?;
                ctx.check_width(branch.covered_guess.len())?;
                let t = ctx.final_table(&branch)?;
                for (mask, e) in t.entries.iter().enumerate() {
                    let cover = masks
                        .iter()
                        .enumerate()
                        .filter(|(f, _)| mask >> f & 1 == 1)
                        .fold(0, |a, (_, m)| a | m);
                    if cover & all_r_prime == all_r_prime {
                        guesses += 1;
                        let guess = (0..masks.len()).filter(|f| mask >> f & 1 == 1).collect();
                        offer(e.cost, &e.witness, guess, &mut best)?;
                    }
                }
            }
        }
        if let Some(b) = &best {
            incumbent.fetch_min(b.total, Ordering::Relaxed);
        }
        Ok(best.map(|b| (idx, b, guesses)))
    };

    let results: Vec<BranchEval> = if config.parallel {
        choices.par_iter().enumerate().map(evaluate).collect()
    } else {
        choices.iter().enumerate().map(evaluate).collect()
    };
    let mut stats = SolveStats {
        residual_branches: choices.len(),
        ..SolveStats::default()
    };
    let mut best: Option<(usize, BranchResult)> = None;
    for r in results {
        if let Some((idx, b, guesses)) = r? {
            stats.guesses += guesses;
            if best.as_ref().is_none_or(|(bi, bb)| (b.total, idx) < (bb.total, *bi)) {
                best = Some((idx, b));
            }
        }
    }
    stats.pruned_branches = pruned.load(Ordering::Relaxed);
    stats.oracle_calls = ctx.oracle_calls();
    let (_, best) = best.expect("D_R = R always yields a finite branch");
    if best.witness.len() != best.total || !is_dominating(g, &best.witness)? {
        return Err(Error::Input(format!(
            "internal error: witness of size {} fails to certify {}",
            best.witness.len(),
            best.total
        )));
    }
    Ok(SolveOutcome {
        ds_size: best.total,
        verdict: best.total as i64 <= inst.budget,
        branch: BranchSummary {
            residual_choice: best.branch.residual_choice.clone(),
            covered: best.branch.covered_traces().into_iter().cloned().collect(),
        },
        witness: best.witness,
        stats,
    })
}
