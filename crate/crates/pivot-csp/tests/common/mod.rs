//! Shared fixtures for the integration suites.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use pivot_csp::generate::{generate_instance, GeneratorParams};
use pivot_csp::instance::{doc_from_network, load_instance, network_from_doc};
use pivot_csp::network::Network;
use pivot_csp::solver::Solution;
use pivot_csp::structure::{PivotPlan, RootSet};

#[allow(dead_code)]
pub fn travel_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances/travel-agency.json")
}

#[allow(dead_code)]
pub fn travel() -> Network {
    load_instance(travel_path()).expect("bundled instance loads")
}

/// Roots {X1, X2}, ordering X1 X2 X3, candidate X2 -> X3.
#[allow(dead_code)]
pub fn three_var_plan(net: &Network) -> PivotPlan {
    let x1 = net.var("X1").unwrap();
    let x2 = net.var("X2").unwrap();
    let x3 = net.var("X3").unwrap();
    let mut candidates = BTreeMap::new();
    candidates.insert(x3, x2);
    PivotPlan::from_parts(
        net,
        RootSet::from_vars([x1, x2]),
        vec![x1, x2, x3],
        candidates,
    )
    .expect("plan is well formed")
}

/// Pivot consistent but neither arc nor path consistent.
#[allow(dead_code)]
pub fn pivot_consistent_triple() -> Network {
    Network::builder()
        .variable("X1", ["a1", "b1"])
        .variable("X2", ["a2", "b2", "c2"])
        .variable("X3", ["a3", "b3"])
        .constraint("X1", "X2", [("a1", "a2"), ("b1", "a2"), ("b1", "c2")])
        .constraint("X2", "X3", [("a2", "a3"), ("b2", "b3"), ("c2", "b3")])
        .constraint("X1", "X3", [("a1", "a3"), ("b1", "a3"), ("b1", "b3")])
        .finish()
        .unwrap()
}

/// Not pivot consistent: (a1, b2) has no support in D_3.
#[allow(dead_code)]
pub fn unsupported_pair_triple() -> Network {
    Network::builder()
        .variable("X1", ["a1", "b1"])
        .variable("X2", ["a2", "b2"])
        .variable("X3", ["a3", "b3"])
        .constraint("X1", "X2", [("a1", "a2"), ("a1", "b2"), ("b1", "b2")])
        .constraint("X2", "X3", [("a2", "a3"), ("b2", "b3")])
        .constraint("X1", "X3", [("a1", "a3"), ("b1", "b3")])
        .finish()
        .unwrap()
}

/// The seeded instance pool used by the randomized suites: functional
/// density swept from zero coverage to a full forest, with and without
/// cycles, extra non-functional constraints included.
#[allow(dead_code)]
pub fn instance_pool(count: usize, base_seed: u64) -> Vec<(GeneratorParams, Network)> {
    let mut out = Vec::new();
    let mut seed = base_seed;
    while out.len() < count {
        for density_step in 0..=4 {
            if out.len() >= count {
                break;
            }
            let n = 4 + (seed % 5) as usize; // 4..=8 variables
            let d = 2 + (seed % 3) as usize; // 2..=4 values
            let functional_arcs = (n - 1) * density_step / 4;
            let params = GeneratorParams {
                variables: n,
                domain_size: d,
                functional_arcs,
                cycle_fraction: match seed % 3 {
                    0 => 0.0,
                    1 => 0.3,
                    _ => 0.7,
                },
                other_constraints: (seed % 3) as usize,
                tightness: 0.1 + 0.15 * (seed % 5) as f64,
                seed,
            };
            let net = generate_instance(&params).expect("pool params are valid");
            out.push((params, net));
            seed += 1;
        }
    }
    out
}

/// Random tightening of `net`: drops some relation pairs and domain values
/// by editing the instance document and rebuilding.
#[allow(dead_code)]
pub fn tighten(net: &Network, drop_nth_pair: usize, drop_nth_value: Option<usize>) -> Network {
    let mut doc = doc_from_network(net);
    for (ci, c) in doc.constraints.iter_mut().enumerate() {
        if let Some(pairs) = &mut c.pairs {
            let keep: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(pi, _)| (pi + ci) % drop_nth_pair != 0)
                .map(|(_, p)| p.clone())
                .collect();
            *pairs = keep;
        }
    }
    if let Some(nth) = drop_nth_value {
        // Drop one value from the largest domain, and every pair using it.
        if let Some(vd) = doc
            .variables
            .iter()
            .enumerate()
            .max_by_key(|(_, v)| v.domain.len())
            .map(|(i, _)| i)
        {
            if doc.variables[vd].domain.len() > 1 {
                let at = nth % doc.variables[vd].domain.len();
                let gone = doc.variables[vd].domain.remove(at);
                let name = doc.variables[vd].name.clone();
                for c in doc.constraints.iter_mut() {
                    if let Some(pairs) = &mut c.pairs {
                        pairs.retain(|(a, b)| {
                            !(c.scope.0 == name && *a == gone || c.scope.1 == name && *b == gone)
                        });
                    }
                }
            }
        }
    }
    network_from_doc(&doc).expect("tightened document is well formed")
}

/// True iff both networks keep exactly the same live values everywhere.
#[allow(dead_code)]
pub fn same_live_domains(a: &Network, b: &Network) -> bool {
    a.vars().all(|v| {
        let left: BTreeSet<&str> = a.domain(v).map(|val| a.token(v, val)).collect();
        let right: BTreeSet<&str> = b.domain(v).map(|val| b.token(v, val)).collect();
        left == right
    })
}

#[allow(dead_code)]
pub fn solution_set(solutions: Vec<Solution>, net: &Network) -> BTreeSet<Vec<String>> {
    solutions
        .into_iter()
        .map(|s| s.tokens(net).into_iter().map(str::to_string).collect())
        .collect()
}
