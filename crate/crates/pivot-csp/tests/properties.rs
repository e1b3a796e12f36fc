//! Property suites over seeded random instances.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use pivot_csp::filtering::{
    check_pivot_consistent, check_xk_compatible, directional_path_consistency, path_consistency,
    pivot_filter,
};
use pivot_csp::generate::{generate_instance, GeneratorParams};
use pivot_csp::instance::{doc_from_network, network_from_doc};
use pivot_csp::network::{union_networks, Network, Var};

use pivot_csp::solver::brute_force_solve;
use pivot_csp::structure::{
    compute_pivot_plan, compute_pivot_plan_counted, functional_subgraph, is_r_compatible,
    is_root_set, minimum_root_set, tarjan_scc_counted, PivotPlan, TieBreak,
};

fn arb_params() -> impl Strategy<Value = GeneratorParams> {
    (
        2usize..=7,
        1usize..=4,
        0usize..=8,
        0.0..=1.0f64,
        0usize..=3,
        0.0..=0.8f64,
        0u64..100_000,
    )
        .prop_map(|(n, d, f, cyc, o, t, seed)| {
            let pairs = n * (n - 1) / 2;
            let f = f.min(n - 1);
            GeneratorParams {
                variables: n,
                domain_size: d,
                functional_arcs: f,
                cycle_fraction: cyc,
                other_constraints: o.min(pairs - f),
                tightness: t,
                seed,
            }
        })
}

fn arb_net() -> impl Strategy<Value = Network> {
    arb_params().prop_map(|p| generate_instance(&p).expect("valid params"))
}

fn lex_plan(net: &Network) -> PivotPlan {
    let roots = minimum_root_set(net, TieBreak::Lex);
    compute_pivot_plan(net, &roots, TieBreak::Lex).expect("minimum root set is a root set")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transpose_coherence(net in arb_net()) {
        for i in net.vars() {
            for j in net.vars() {
                if i == j {
                    continue;
                }
                let forward = net.relation_view(i, j).unwrap().pairs();
                let mut swapped: Vec<_> = net
                    .relation_view(j, i)
                    .unwrap()
                    .pairs()
                    .into_iter()
                    .map(|(a, b)| (b, a))
                    .collect();
                swapped.sort();
                prop_assert_eq!(forward, swapped);
            }
        }
    }

    #[test]
    fn functional_directions_agree_with_support_counts(net in arb_net()) {
        for i in net.vars() {
            for j in net.vars() {
                if i == j {
                    continue;
                }
                let brute = net
                    .domain(i)
                    .all(|a| net.supports(i, a, j).unwrap().len() <= 1);
                prop_assert_eq!(net.functional_directions(i, j).unwrap().i_to_j, brute);
            }
        }
    }

    #[test]
    fn subproblem_is_a_partial_order(net in arb_net(), k1 in 2usize..5, k2 in 2usize..5) {
        let b = common::tighten(&net, k1, None);
        let a = common::tighten(&b, k2, Some(0));
        // Reflexive, antisymmetric on canonical forms, transitive.
        prop_assert!(net.is_subproblem(&net).unwrap());
        prop_assert!(a.is_subproblem(&b).unwrap());
        prop_assert!(b.is_subproblem(&net).unwrap());
        prop_assert!(a.is_subproblem(&net).unwrap());
        if a.is_subproblem(&b).unwrap() && b.is_subproblem(&a).unwrap() {
            prop_assert_eq!(&a, &b);
        }
    }

    #[test]
    fn union_bounds_its_operands(net in arb_net(), k1 in 2usize..5, k2 in 2usize..5) {
        let a = common::tighten(&net, k1, Some(1));
        let b = common::tighten(&net, k2, None);
        let u = union_networks(&a, &b, &net).unwrap();
        prop_assert!(a.is_subproblem(&u).unwrap());
        prop_assert!(b.is_subproblem(&u).unwrap());
        prop_assert!(u.is_subproblem(&net).unwrap());
    }

    #[test]
    fn minimum_root_set_is_a_root_set(net in arb_net(), seed in 0u64..1000) {
        for tb in [TieBreak::Lex, TieBreak::Seeded(seed)] {
            let roots = minimum_root_set(&net, tb);
            prop_assert!(is_root_set(&net, roots.members()));
        }
    }

    #[test]
    fn computed_plans_satisfy_their_invariants(net in arb_net(), seed in 0u64..1000) {
        let g = functional_subgraph(&net);
        for tb in [TieBreak::Lex, TieBreak::Seeded(seed)] {
            let roots = minimum_root_set(&net, tb);
            let plan = compute_pivot_plan(&net, &roots, tb).unwrap();
            prop_assert!(is_r_compatible(plan.ordering(), plan.roots(), &g));
            let targets: BTreeSet<Var> = plan.candidates().map(|(_, t)| t).collect();
            prop_assert_eq!(targets.len(), net.var_count() - roots.size());
            for (origin, target) in plan.candidates() {
                prop_assert!(!plan.roots().contains(target));
                prop_assert!(plan.position(origin) < plan.position(target));
                prop_assert!(g.has_arc(origin, target));
            }
        }
    }

    #[test]
    fn pivot_filter_is_idempotent(net in arb_net()) {
        let plan = lex_plan(&net);
        let (once, _) = pivot_filter(&net, &plan).unwrap();
        let (twice, second) = pivot_filter(&once, &plan).unwrap();
        prop_assert_eq!(&twice, &once);
        prop_assert!(second.pairs_removed.is_empty());
        prop_assert!(second.domain_removals.is_empty());
        prop_assert!(second.constraints_created.is_empty());
    }

    #[test]
    fn readding_a_removed_pair_gets_removed_again(net in arb_net()) {
        let plan = lex_plan(&net);
        let (closure, report) = pivot_filter(&net, &plan).unwrap();
        // Pick the first removed pair whose values survived in the closure.
        let candidate = report.pairs_removed.iter().find(|p| {
            closure.is_live(p.scope.0, p.pair.0) && closure.is_live(p.scope.1, p.pair.1)
        });
        if let Some(removal) = candidate {
            let (i, j) = removal.scope;
            let tok_i = net.token(i, removal.pair.0).to_string();
            let tok_j = net.token(j, removal.pair.1).to_string();
            let mut doc = doc_from_network(&closure);
            let decl = doc
                .constraints
                .iter_mut()
                .find(|c| c.scope.0 == net.name(i) && c.scope.1 == net.name(j))
                .expect("scope with a removal is explicit in the closure");
            decl.pairs
                .as_mut()
                .expect("modified relations are explicit")
                .push((tok_i.clone(), tok_j.clone()));
            let patched = network_from_doc(&doc).unwrap();

            let (refiltered, again) = pivot_filter(&patched, &plan).unwrap();
            prop_assert_eq!(&refiltered, &closure);
            let removed_again = again.pairs_removed.iter().any(|p| {
                p.scope == removal.scope
                    && patched.token(p.scope.0, p.pair.0) == tok_i
                    && patched.token(p.scope.1, p.pair.1) == tok_j
            });
            prop_assert!(removed_again);
        }
    }

    #[test]
    fn filtering_preserves_solutions(net in arb_net()) {
        let plan = lex_plan(&net);
        let (closure, _) = pivot_filter(&net, &plan).unwrap();
        let before = common::solution_set(brute_force_solve(&net).unwrap(), &net);
        let after = common::solution_set(brute_force_solve(&closure).unwrap(), &closure);
        prop_assert_eq!(before, after);
    }

    #[test]
    fn every_processed_pivot_still_passes_after_the_loop(net in arb_net()) {
        // Order safety: later steps never undo an established pivot, so a
        // full re-check (self compatibility included) holds at the end.
        let plan = lex_plan(&net);
        let (closure, report) = pivot_filter(&net, &plan).unwrap();
        if report.wiped_out.is_some() {
            return Ok(());
        }
        for pos in plan.r()..plan.n() {
            let k = plan.ordering()[pos];
            let h = plan.candidate(k).unwrap();
            prop_assert!(check_xk_compatible(&closure, h, h, k).unwrap().verdict);
            for &j in &plan.ordering()[..pos] {
                if j != h && closure.has_constraint(j, k) {
                    prop_assert!(check_xk_compatible(&closure, h, j, k).unwrap().verdict);
                }
            }
        }
    }

    #[test]
    fn dpc_output_is_pivot_consistent_for_plans_along_its_ordering(net in arb_net()) {
        let plan = lex_plan(&net);
        let (dpc_net, report) = directional_path_consistency(&net, plan.ordering()).unwrap();
        if report.wiped_out.is_some() {
            return Ok(());
        }
        prop_assert!(check_pivot_consistent(&dpc_net, &plan).verdict);
        // Any other choice of functional candidates along the same ordering
        // must pass as well; swap each candidate for the latest valid one.
        let g = functional_subgraph(&net);
        let mut alt = std::collections::BTreeMap::new();
        for pos in plan.r()..plan.n() {
            let k = plan.ordering()[pos];
            let origin = plan.ordering()[..pos]
                .iter()
                .rev()
                .find(|&&h| g.has_arc(h, k))
                .copied()
                .expect("ordering is root compatible");
            alt.insert(k, origin);
        }
        let alt_plan = PivotPlan::from_parts(
            &net,
            plan.roots().clone(),
            plan.ordering().to_vec(),
            alt,
        ).unwrap();
        prop_assert!(check_pivot_consistent(&dpc_net, &alt_plan).verdict);
    }

    #[test]
    fn path_consistency_is_at_least_as_strong_as_dpc(net in arb_net()) {
        let plan = lex_plan(&net);
        let (pc_net, pc_report) = path_consistency(&net);
        let (dpc_net, dpc_report) = directional_path_consistency(&net, plan.ordering()).unwrap();
        if pc_report.wiped_out.is_some() || dpc_report.wiped_out.is_some() {
            return Ok(());
        }
        prop_assert!(pc_net.is_subproblem(&dpc_net).unwrap());
        prop_assert!(check_pivot_consistent(&pc_net, &lex_plan(&pc_net)).verdict);
    }
}

#[test]
fn analysis_step_counts_stay_linear() {
    let mut ratios = Vec::new();
    for n in [50usize, 100, 200, 400] {
        let params = GeneratorParams {
            variables: n,
            domain_size: 3,
            functional_arcs: n - 3,
            cycle_fraction: 0.2,
            other_constraints: n / 2,
            tightness: 0.3,
            seed: 77,
        };
        let net = generate_instance(&params).unwrap();
        let g = functional_subgraph(&net);
        let (_, scc_steps) = tarjan_scc_counted(&g);
        let roots = minimum_root_set(&net, TieBreak::Lex);
        let (_, plan_steps) = compute_pivot_plan_counted(&net, &roots, TieBreak::Lex).unwrap();
        let work = (n + g.arc_count()) as f64;
        ratios.push((scc_steps + plan_steps) as f64 / work);
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(
        max <= 3.0 * min && max <= 8.0,
        "step counts are not linear in n + e: ratios {ratios:?}"
    );
}
