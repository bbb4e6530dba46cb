use dsai::dp::{solve_above3, solve_with, Algorithm, DpBranch, DpConfig, DpContext, ExhaustiveSolver, SplitRule};
use dsai::format::{parse_instance, write_instance};
use dsai::generators::{planted_instance, random_instance, BudgetPolicy, PlantedConfig, RandomModel};
use dsai::kernel::{kernelize, plan_ball, KeepRule, KernelConfig};
use dsai::{ds_exact, is_dominating, Instance, VertexSet};
use proptest::prelude::*;

fn small_planted(seed: u64, pool: usize, copies: usize) -> Instance {
    let cfg = PlantedConfig {
        templates: 2,
        copies: (1, copies),
        leaves: (1, 3),
        pool,
        max_trace: 3,
        leaf_edge_prob: 0.3,
        pool_edge_prob: 0.3,
    };
    planted_instance(&cfg, seed, BudgetPolicy::AboveX(1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_rules_give_identical_tables(seed in any::<u64>(), pool in 1usize..5) {
        let inst = small_planted(seed, pool, 2);
        let d = inst.decompose().unwrap();
        let branch = DpBranch::new(&inst.graph, &d, VertexSet::new()).unwrap();
        let all = (0..branch.trace_family.len().min(4)).collect();
        let branch = branch.with_guess(all).unwrap();
        let costs = |split| {
            let cfg = DpConfig { split, ..DpConfig::default() };
            let ctx = DpContext::new(&inst.graph, &d, &ExhaustiveSolver, cfg);
            ctx.tables(&branch).unwrap().into_iter().map(|t| t.entries.into_iter().map(|e| e.cost).collect::<Vec<_>>()).collect::<Vec<_>>()
        };
        prop_assert_eq!(costs(SplitRule::Disjoint), costs(SplitRule::AnyUnion));
    }

    #[test]
    fn tables_are_monotone(seed in any::<u64>(), pool in 1usize..5) {
        let inst = small_planted(seed, pool, 2);
        let d = inst.decompose().unwrap();
        let branch = DpBranch::new(&inst.graph, &d, VertexSet::new()).unwrap();
        let all = (0..branch.trace_family.len().min(4)).collect();
        let branch = branch.with_guess(all).unwrap();
        let ctx = DpContext::new(&inst.graph, &d, &ExhaustiveSolver, DpConfig::default());
        for t in ctx.tables(&branch).unwrap() {
            for s in 0..t.entries.len() {
                for sub in 0..t.entries.len() {
                    if sub & s == sub {
                        prop_assert!(t.cost(sub) <= t.cost(s));
                    }
                }
            }
        }
    }

    #[test]
    fn solvers_agree_and_certify(seed in any::<u64>(), n in 3usize..16) {
        let inst = random_instance(n, RandomModel::BoundedDegree { d: 3 }, 3, seed, BudgetPolicy::Auto);
        prop_assume!(inst.residual().len() <= 6);
        let truth = ds_exact(&inst.graph).size;
        let serial = DpConfig { parallel: false, ..DpConfig::default() };
        for (algo, cfg) in [(Algorithm::Above3, DpConfig::default()), (Algorithm::Xp, DpConfig::default()), (Algorithm::Above3, serial)] {
            let sol = solve_with(&inst, algo, &cfg, &ExhaustiveSolver).unwrap();
            prop_assert_eq!(sol.ds_size, truth);
            prop_assert_eq!(sol.witness.len(), truth);
            prop_assert!(is_dominating(&inst.graph, &sol.witness).unwrap());
            prop_assert!(sol.verdict);
        }
    }

    #[test]
    fn solve_is_deterministic(seed in any::<u64>()) {
        let inst = small_planted(seed, 4, 2);
        let a = solve_above3(&inst).unwrap();
        let b = solve_above3(&inst).unwrap();
        prop_assert_eq!(a.witness, b.witness);
        prop_assert_eq!(a.branch, b.branch);
    }

    #[test]
    fn kernel_keeps_x_valid_and_maps_into_original(seed in any::<u64>(), strict in any::<bool>()) {
        let inst = small_planted(seed, 3, 4);
        let keep = if strict { KeepRule::Residual } else { KeepRule::Boundary };
        let rep = kernelize(&inst, 1, &KernelConfig { keep, ..KernelConfig::default() }).unwrap();
        rep.reduced.validate().unwrap();
        for x in &rep.reduced.x_set {
            prop_assert!(inst.x_set.contains(&rep.vertex_map[*x]));
        }
        prop_assert_eq!(rep.reduced.residual().len(), inst.residual().len());
    }

    #[test]
    fn ball_plans_touch_only_the_interior(seed in any::<u64>()) {
        let inst = small_planted(seed, 4, 3);
        let residual = inst.residual();
        for &x in &inst.x_set {
            let plan = plan_ball(&inst.graph, &inst.x_set, x, 4).unwrap();
            prop_assert!(plan.removed_vertices.iter().all(|v| inst.graph.has_edge(x, *v)));
            prop_assert!(plan.removed_edges.iter().all(|(u, v)| !residual.contains(u) && !residual.contains(v)));
            prop_assert!(plan.kept_core.contains(&x));
        }
    }

    #[test]
    fn files_round_trip(seed in any::<u64>(), n in 1usize..40) {
        let inst = random_instance(n, RandomModel::PlanarIsh { keep: 0.5 }, 2, seed, BudgetPolicy::AboveX(0));
        prop_assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
    }
}
