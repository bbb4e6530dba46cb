//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a failure status if any criterion fails.

use std::process::ExitCode;
use std::sync::Mutex;
use std::time::Instant;

use dsai::dp::{solve_above3, solve_xp, Cost, DpBranch, DpConfig, DpContext, ExhaustiveSolver};
use dsai::generators::{
    from_34sat, from_3sat, from_colourful, planted_instance, random_cnf, random_instance, redblue_to_colourful,
    BudgetPolicy, PlantedConfig, RandomModel,
};
use dsai::kernel::{kernelize, replace_ball, subgraph_violations, KeepRule, KernelConfig};
use dsai::oracle::{colourful_ds_exact, sat_brute, ColourfulInstance};
use dsai::{ds_exact, Graph, Instance, Vertex, VertexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// `(ds, |X|, |R|)` of every instance with `r ≥ 2` seen by the suite.
static BAND: Mutex<Vec<(usize, usize, usize)>> = Mutex::new(Vec::new());

fn exact(inst: &Instance) -> usize {
    let ds = ds_exact(&inst.graph).size;
    if inst.radius >= 2 {
        BAND.lock()
            .unwrap()
            .push((ds, inst.x_set.len(), inst.residual().len()));
    }
    ds
}

struct Outcome {
    checked: usize,
    failures: Vec<String>,
    note: String,
}

impl Outcome {
    fn new(checked: usize, failures: Vec<String>) -> Self {
        Outcome {
            checked,
            failures,
            note: String::new(),
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dp_instance(seed: u64) -> Instance {
    let mut r = rng(seed ^ 0x5eed);
    let n = r.random_range(4..=18);
    match seed % 4 {
        0 => random_instance(n, RandomModel::ErdosRenyi { p: r.random_range(0.08..0.3) }, 3, seed, BudgetPolicy::AboveX(1)),
        1 => random_instance(n, RandomModel::BoundedDegree { d: r.random_range(2..=4) }, 3, seed, BudgetPolicy::AboveX(1)),
        2 => random_instance(n, RandomModel::PlanarIsh { keep: r.random_range(0.3..0.7) }, 3, seed, BudgetPolicy::AboveX(1)),
        _ => {
            let cfg = PlantedConfig {
                templates: r.random_range(1..=3),
                copies: (1, 2),
                leaves: (1, 3),
                pool: r.random_range(1..=6),
                max_trace: 3,
                leaf_edge_prob: 0.3,
                pool_edge_prob: 0.3,
            };
            planted_instance(&cfg, seed, BudgetPolicy::AboveX(1))
        }
    }
}

fn criterion_1() -> Outcome {
    let instances: Vec<Instance> = (0u64..)
        .map(dp_instance)
        .filter(|i| i.graph.vertex_count() <= 18 && i.residual().len() <= 6)
        .take(520)
        .collect();
    let failures: Vec<String> = instances
        .par_iter()
        .enumerate()
        .filter_map(|(i, inst)| {
            let truth = exact(inst);
            let dp = solve_above3(inst).map(|s| s.ds_size);
            let xp = solve_xp(inst).map(|s| s.ds_size);
            match (dp, xp) {
                (Ok(a), Ok(b)) if a == truth && b == truth => None,
                (a, b) => Some(format!("instance {i}: oracle {truth}, dp {a:?}, xp {b:?}")),
            }
        })
        .collect();
    let with_residual = instances.iter().filter(|i| !i.residual().is_empty()).count();
    let max_residual = instances.iter().map(|i| i.residual().len()).max().unwrap_or(0);
    let mut o = Outcome::new(instances.len(), failures);
    o.note = format!("{with_residual} with R nonempty, max |R| {max_residual}");
    o
}

/// Minimum `|D|` over `D ⊆ N[x_1..x_i]` dominating those balls minus the
/// exempt vertices, with some `y ∈ D ∩ N(x_j)` per required trace.
fn brute_table_entry(
    g: &Graph,
    balls: &[VertexSet],
    centers: &[Vertex],
    exempt: &VertexSet,
    r_prime: &VertexSet,
    traces: &[Vec<Vertex>],
) -> Cost {
    let universe: Vec<Vertex> = balls.iter().flatten().copied().collect();
    let targets: Vec<Vertex> = universe.iter().copied().filter(|v| !exempt.contains(v)).collect();
    let nbrs: VertexSet = centers.iter().flat_map(|&c| g.neighbors(c).iter().copied()).collect();
    let trace_of = |y: Vertex| -> Vec<Vertex> { g.neighbors(y).iter().copied().filter(|w| r_prime.contains(w)).collect() };
    let mut best = Cost::Infinite;
    for mask in 0u64..1 << universe.len() {
        let d: Vec<Vertex> = (0..universe.len()).filter(|b| mask >> b & 1 == 1).map(|b| universe[b]).collect();
        let size = d.len();
        if Cost::Finite(size) >= best {
            continue;
        }
        let dominated = targets
            .iter()
            .all(|&t| d.contains(&t) || g.neighbors(t).iter().any(|w| d.contains(w)));
        let covered = traces
            .iter()
            .all(|s| d.iter().any(|&y| nbrs.contains(&y) && &trace_of(y) == s));
        if dominated && covered {
            best = Cost::Finite(size);
        }
    }
    best
}

fn criterion_2() -> Outcome {
    let mut cases = Vec::new();
    let mut seed = 1000u64;
    while cases.len() < 120 {
        seed += 1;
        let mut r = rng(seed);
        let cfg = PlantedConfig {
            templates: r.random_range(1..=3),
            copies: (1, 1),
            leaves: (1, 3),
            pool: r.random_range(1..=4),
            max_trace: 3,
            leaf_edge_prob: 0.4,
            pool_edge_prob: 0.3,
        };
        let inst = planted_instance(&cfg, seed, BudgetPolicy::AboveX(0));
        let d = inst.decompose().unwrap();
        let ball_vertices: usize = d.balls.iter().map(|b| b.len()).sum();
        if d.len() > 3 || ball_vertices > 16 {
            continue;
        }
        let residual: Vec<Vertex> = d.residual.iter().copied().collect();
        let choice: VertexSet = residual.iter().copied().filter(|_| r.random_bool(0.3)).collect();
        let base = DpBranch::new(&inst.graph, &d, choice).unwrap();
        let fam = base.trace_family.len();
        let width = r.random_range(0..=fam.min(3));
        let mut pool: Vec<usize> = (0..fam).collect();
        let mut guess = Vec::new();
        for _ in 0..width {
            guess.push(pool.swap_remove(r.random_range(0..pool.len())));
        }
        cases.push((inst, base.with_guess(guess).unwrap()));
    }
    let failures: Vec<String> = cases
        .par_iter()
        .enumerate()
        .flat_map_iter(|(ci, (inst, branch))| {
            let g = &inst.graph;
            let d = inst.decompose().unwrap();
            let ctx = DpContext::new(g, &d, &ExhaustiveSolver, DpConfig::default());
            let tables = ctx.tables(branch).unwrap();
            let exempt: VertexSet = branch
                .residual_choice
                .iter()
                .flat_map(|&v| g.neighbors(v).iter().copied())
                .collect();
            let mut bad = Vec::new();
            for (i, t) in tables.iter().enumerate() {
                for (mask, e) in t.entries.iter().enumerate() {
                    let traces: Vec<Vec<Vertex>> = branch
                        .covered_guess
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| mask >> b & 1 == 1)
                        .map(|(_, &f)| branch.trace_family[f].clone())
                        .collect();
                    let want = brute_table_entry(
                        g,
                        &d.balls[..i],
                        &d.x_order[..i],
                        &exempt,
                        &branch.undominated_residual,
                        &traces,
                    );
                    if want != e.cost {
                        bad.push(format!("case {ci} level {i} mask {mask}: table {:?}, brute {want:?}", e.cost));
                    }
                    if let Cost::Finite(c) = e.cost {
                        if e.witness.len() != c {
                            bad.push(format!("case {ci} level {i} mask {mask}: witness size"));
                        }
                    }
                }
            }
            bad
        })
        .collect();
    Outcome::new(cases.len(), failures)
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let formulas: Vec<_> = (0..240)
        .map(|_| {
            let n = r.random_range(1..=8);
            let m = r.random_range(1..=6);
            let width = r.random_range(1..=3);
            random_cnf(n, m, width, &mut r)
        })
        .collect();
    let sat_count = Mutex::new(0);
    let failures: Vec<String> = formulas
        .par_iter()
        .enumerate()
        .filter_map(|(i, f)| {
            let sat = sat_brute(f).unwrap().is_some();
            if sat {
                *sat_count.lock().unwrap() += 1;
            }
            let (inst, map) = from_3sat(f).unwrap();
            if inst.validate().is_err() || inst.residual() != VertexSet::from([map.y_vertices.unwrap().2]) {
                return Some(format!("formula {i}: malformed instance"));
            }
            let ds = exact(&inst);
            (sat != (ds == inst.x_set.len())).then(|| format!("formula {i}: sat {sat}, ds {ds}, |X| {}", inst.x_set.len()))
        })
        .collect();
    let mut o = Outcome::new(formulas.len(), failures);
    o.note = format!("{} satisfiable", sat_count.into_inner().unwrap());
    o
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut formulas = Vec::new();
    while formulas.len() < 150 {
        let n = r.random_range(1..=6);
        let m = r.random_range(1..=8);
        let f = random_cnf(n, m, 3, &mut r);
        if f.occurrences().iter().all(|&o| o <= 4) {
            formulas.push(f);
        }
    }
    let sat_count = Mutex::new(0);
    let failures: Vec<String> = formulas
        .par_iter()
        .enumerate()
        .filter_map(|(i, f)| {
            let sat = sat_brute(f).unwrap().is_some();
            if sat {
                *sat_count.lock().unwrap() += 1;
            }
            let (inst, _) = match from_34sat(f) {
                Ok(v) => v,
                Err(e) => return Some(format!("formula {i}: {e}")),
            };
            if inst.graph.max_degree() > 6 {
                return Some(format!("formula {i}: degree {}", inst.graph.max_degree()));
            }
            if inst.validate().is_err() || inst.residual().len() != 1 {
                return Some(format!("formula {i}: malformed instance"));
            }
            let ds = exact(&inst);
            (sat != (ds == inst.x_set.len())).then(|| format!("formula {i}: sat {sat}, ds {ds}"))
        })
        .collect();
    let mut o = Outcome::new(formulas.len(), failures);
    o.note = format!("{} satisfiable", sat_count.into_inner().unwrap());
    o
}

fn random_colourful(seed: u64) -> ColourfulInstance {
    let mut r = rng(seed);
    if seed % 3 == 0 {
        let n = r.random_range(2..=8);
        let mut edges = Vec::new();
        let colours: Vec<bool> = (0..n).map(|_| r.random_bool(0.5)).collect();
        for u in 0..n {
            for v in u + 1..n {
                if colours[u] != colours[v] && r.random_bool(0.4) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, edges).unwrap();
        let red: VertexSet = (0..n).filter(|&v| colours[v]).collect();
        let blue: VertexSet = (0..n).filter(|&v| !colours[v]).collect();
        if !blue.is_empty() {
            return redblue_to_colourful(&g, &red, &blue, r.random_range(1..=2)).unwrap();
        }
    }
    let k = r.random_range(1..=3);
    let sizes: Vec<usize> = (0..=k).map(|i| r.random_range(if i == 0 { 0 } else { 1 }..=4)).collect();
    let n: usize = sizes.iter().sum();
    let mut colours = Vec::with_capacity(n);
    for (c, &s) in sizes.iter().enumerate() {
        colours.extend(std::iter::repeat_n(c, s));
    }
    let p = r.random_range(0.1..0.6);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    ColourfulInstance::from_colours(Graph::from_edges(n, edges).unwrap(), &colours, k).unwrap()
}

fn criterion_5() -> Outcome {
    let instances: Vec<ColourfulInstance> = (0..150u64)
        .map(random_colourful)
        .filter(|c| c.blocks[1..].iter().map(VertexSet::len).product::<usize>() <= 10_000)
        .collect();
    let feasible = Mutex::new(0);
    let failures: Vec<String> = instances
        .par_iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let ok = colourful_ds_exact(c).is_some();
            if ok {
                *feasible.lock().unwrap() += 1;
            }
            let k = c.colour_count();
            let (inst, _) = from_colourful(c, 2 + i % 3).unwrap();
            if inst.validate().is_err() || inst.residual().len() != k {
                return Some(format!("instance {i}: malformed"));
            }
            let ds = exact(&inst);
            (ok != (ds == k)).then(|| format!("instance {i}: colourful {ok}, ds {ds}, k {k}"))
        })
        .collect();
    let mut o = Outcome::new(instances.len(), failures);
    o.note = format!("{} feasible", feasible.into_inner().unwrap());
    o
}

fn kernel_instance(seed: u64, max_n: usize) -> Option<Instance> {
    let mut r = rng(seed ^ 0xba11);
    let cfg = PlantedConfig {
        templates: r.random_range(1..=4),
        copies: (1, r.random_range(1..=5)),
        leaves: (1, r.random_range(1..=5)),
        pool: r.random_range(0..=5),
        max_trace: 3,
        leaf_edge_prob: r.random_range(0.0..0.6),
        pool_edge_prob: 0.3,
    };
    let inst = planted_instance(&cfg, seed, BudgetPolicy::AboveX(1));
    (inst.graph.vertex_count() <= max_n).then_some(inst)
}

fn criterion_6() -> Outcome {
    let instances: Vec<Instance> = (0u64..).filter_map(|s| kernel_instance(s, 30)).take(220).collect();
    let balls = Mutex::new(0usize);
    let failures: Vec<String> = instances
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, inst)| {
            let truth = exact(inst);
            let mut bad = Vec::new();
            for &x in &inst.x_set {
                let (rep, plan) = replace_ball(&inst.graph, &inst.x_set, x, 3).unwrap();
                if plan.skipped {
                    continue;
                }
                *balls.lock().unwrap() += 1;
                if plan.kept_core.len() as u128 > plan.core_bound() {
                    bad.push(format!("instance {i} ball {x}: |S| {} > {}", plan.kept_core.len(), plan.core_bound()));
                }
                if plan.retained(&inst.graph).len() > plan.kept_core.len() + 2 * plan.twin_classes {
                    bad.push(format!("instance {i} ball {x}: retained too many"));
                }
                if !subgraph_violations(&inst.graph, &rep.graph, &rep.vertex_map).is_empty() {
                    bad.push(format!("instance {i} ball {x}: not a subgraph"));
                }
                let reduced = Instance::new(rep.graph, rep.x_set, inst.radius, inst.budget);
                if reduced.validate().is_err() {
                    bad.push(format!("instance {i} ball {x}: X no longer valid"));
                }
                let after = exact(&reduced);
                if after != truth {
                    bad.push(format!("instance {i} ball {x}: ds {truth} became {after}"));
                }
            }
            bad
        })
        .collect();
    let mut o = Outcome::new(instances.len(), failures);
    o.note = format!("{} balls replaced", balls.into_inner().unwrap());
    o
}

fn shrink_check() -> (usize, Vec<String>) {
    let mut failures = Vec::new();
    let mut checked = 0;
    for seed in 0..10u64 {
        let mut r = rng(seed ^ 0x5421);
        let cfg = PlantedConfig {
            templates: r.random_range(1..=2),
            copies: (10, 14),
            leaves: (1, 4),
            pool: r.random_range(1..=4),
            max_trace: 2,
            leaf_edge_prob: 0.3,
            pool_edge_prob: 0.3,
        };
        let inst = planted_instance(&cfg, seed, BudgetPolicy::AboveX(1));
        let rep = kernelize(&inst, 1, &KernelConfig::default()).unwrap();
        let d = inst.decompose().unwrap();
        let small: VertexSet = d
            .balls
            .iter()
            .zip(&d.ball_residuals)
            .filter(|(_, ri)| ri.len() <= 2)
            .flat_map(|(b, _)| b.iter().copied())
            .collect();
        let surviving = rep.vertex_map.iter().filter(|v| small.contains(v)).count();
        let removed = 1.0 - surviving as f64 / small.len() as f64;
        checked += 1;
        if removed < 0.5 {
            failures.push(format!("seed {seed}: removed only {:.0}% of small-ball vertices", removed * 100.0));
        }
    }
    (checked, failures)
}

fn criterion_7() -> Outcome {
    let instances: Vec<Instance> = (5000u64..).filter_map(|s| kernel_instance(s, 40)).take(110).collect();
    let offsets = Mutex::new(0usize);
    let mut failures: Vec<String> = instances
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, inst)| {
            let truth = exact(inst);
            let mut bad = Vec::new();
            for keep in [KeepRule::Boundary, KeepRule::Residual] {
                let cfg = KernelConfig { keep, ..KernelConfig::default() };
                let tau = 1 + i % 2;
                let rep = match kernelize(inst, tau, &cfg) {
                    Ok(r) => r,
                    Err(e) => {
                        bad.push(format!("instance {i} {keep:?}: {e}"));
                        continue;
                    }
                };
                *offsets.lock().unwrap() += rep.offset;
                let after = exact(&rep.reduced);
                if truth != after + rep.offset {
                    bad.push(format!("instance {i} {keep:?}: ds {truth} vs {after} + {}", rep.offset));
                }
                if !subgraph_violations(&inst.graph, &rep.reduced.graph, &rep.vertex_map).is_empty() {
                    bad.push(format!("instance {i} {keep:?}: not a subgraph"));
                }
                if rep.reduced.budget != inst.budget - rep.offset as i64 {
                    bad.push(format!("instance {i} {keep:?}: budget not reduced by the offset"));
                }
            }
            bad
        })
        .collect();
    let (shrunk, shrink_failures) = shrink_check();
    failures.extend(shrink_failures);
    let mut o = Outcome::new(instances.len(), failures);
    o.note = format!(
        "total offset {}, shrink check on {shrunk} replicated instances",
        offsets.into_inner().unwrap()
    );
    o
}

fn criterion_8() -> Outcome {
    let instances: Vec<Instance> = (0..120u64)
        .map(|s| {
            let mut r = rng(s ^ 0x44);
            let n = r.random_range(4..=30);
            let model = match s % 3 {
                0 => RandomModel::ErdosRenyi { p: r.random_range(0.03..0.15) },
                1 => RandomModel::BoundedDegree { d: r.random_range(1..=3) },
                _ => RandomModel::PlanarIsh { keep: r.random_range(0.1..0.4) },
            };
            random_instance(n, model, 4, s, BudgetPolicy::AboveX(2))
        })
        .collect();
    let removed = Mutex::new(0usize);
    let failures: Vec<String> = instances
        .par_iter()
        .enumerate()
        .filter_map(|(i, inst)| {
            let out = dsai::kernel::reduce_r4(inst).unwrap();
            *removed.lock().unwrap() += out.removed_centers.len();
            let red = &out.instance;
            if red.validate().is_err() {
                return Some(format!("instance {i}: reduced instance invalid"));
            }
            if red.residual().len() < red.x_set.len() {
                return Some(format!("instance {i}: |R| {} < |X| {}", red.residual().len(), red.x_set.len()));
            }
            if red.budget != inst.budget - out.removed_centers.len() as i64 {
                return Some(format!("instance {i}: budget"));
            }
            let (a, b) = (exact(inst), exact(red));
            (a != b + out.removed_centers.len())
                .then(|| format!("instance {i}: ds {a} vs {b} + {}", out.removed_centers.len()))
        })
        .collect();
    let mut o = Outcome::new(instances.len(), failures);
    o.note = format!("{} balls removed", removed.into_inner().unwrap());
    o
}

fn criterion_9() -> Outcome {
    let band = BAND.lock().unwrap();
    let failures: Vec<String> = band
        .iter()
        .enumerate()
        .filter_map(|(i, &(ds, x, r))| {
            let ok = x <= ds && ds <= x + r && (r > 0 || ds == x);
            (!ok).then(|| format!("record {i}: ds {ds}, |X| {x}, |R| {r}"))
        })
        .collect();
    let empty = band.iter().filter(|t| t.2 == 0).count();
    let mut o = Outcome::new(band.len(), failures);
    o.note = format!("{empty} with R empty");
    o
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("dp agrees with the exact oracle (n <= 18, r = 3, |R| <= 6)", criterion_1),
        ("dp table entries equal brute-force minima", criterion_2),
        ("3-SAT gadget: satisfiable iff ds = |X|", criterion_3),
        ("(3,4)-SAT tree gadget: degree <= 6 and satisfiable iff ds = |X|", criterion_4),
        ("colourful gadget: feasible iff ds = k", criterion_5),
        ("ball replacement keeps ds and the core bound", criterion_6),
        ("kernel: ds = ds(reduced) + offset in both keep modes, replicated balls shrink", criterion_7),
        ("r >= 4 component removal: |R| >= |X| and ds equivalence", criterion_8),
        ("trivial band |X| <= ds <= |X| + |R| on every instance", criterion_9),
    ];
    let mut all_ok = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        all_ok &= o.failures.is_empty();
        let note = if o.note.is_empty() { String::new() } else { format!(", {}", o.note) };
        println!(
            "{status} criterion {}: {name} [{} checked, {} failures{note}, {:.1}s]",
            i + 1,
            o.checked,
            o.failures.len(),
            start.elapsed().as_secs_f64()
        );
        for f in o.failures.iter().take(10) {
            println!("    {f}");
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
