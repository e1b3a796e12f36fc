//! Seeded random instance generator.
//!
//! The functional skeleton is laid out first: a random forest over a
//! shuffled variable order (each non-root position picks one earlier
//! parent), then any surplus functional arcs between already-covered
//! positions. With `cycle_fraction = 0` this pins the number of sources,
//! and therefore the minimum root set size, to `n - min(arcs, n - 1)`.
//! Relations are sampled afterwards: partial functions (bijections for the
//! arcs drawn into cycles) on the functional skeleton, tightness-thinned
//! pair tables on the remaining constraints.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::{Network, Var};

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    pub variables: usize,
    pub domain_size: usize,
    /// Number of functional constraints. The first `n - 1` of them form a
    /// forest; the rest cross-link covered variables.
    pub functional_arcs: usize,
    /// Probability that a functional arc is sampled bijective, closing a
    /// two-cycle in the functional subgraph.
    pub cycle_fraction: f64,
    /// Number of additional, tightness-sampled constraints.
    pub other_constraints: usize,
    /// Fraction of disallowed pairs in non-functional relations; doubles as
    /// the probability that an origin value of a functional relation has no
    /// image.
    pub tightness: f64,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            variables: 8,
            domain_size: 4,
            functional_arcs: 5,
            cycle_fraction: 0.0,
            other_constraints: 2,
            tightness: 0.3,
            seed: 0,
        }
    }
}

/// Where the generator placed its constraints; origins come first in the
/// functional arcs.
#[derive(Clone, Debug, Default)]
pub struct GeneratedLayout {
    pub functional_arcs: Vec<(Var, Var)>,
    pub other_constraints: Vec<(Var, Var)>,
}

pub fn generate_instance(params: &GeneratorParams) -> Result<Network> {
    generate_instance_with_layout(params).map(|(net, _)| net)
}

pub fn generate_instance_with_layout(
    params: &GeneratorParams,
) -> Result<(Network, GeneratedLayout)> {
    validate(params)?;
    let n = params.variables;
    let d = params.domain_size;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let tokens: Vec<String> = (0..d).map(|i| format!("v{i}")).collect();

    // Position -> variable assignment; arcs always run forward in position.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let forest_arcs = params.functional_arcs.min(n.saturating_sub(1));
    let cover_start = n - forest_arcs;
    let mut used = std::collections::BTreeSet::new();
    let mut functional: Vec<(usize, usize)> = Vec::new();
    for pos in cover_start..n {
        let parent = rng.gen_range(0..pos);
        functional.push((parent, pos));
        used.insert(key(parent, pos));
    }
    let extra = params.functional_arcs - forest_arcs;
    if extra > 0 {
        let mut free: Vec<(usize, usize)> = Vec::new();
        for p in 0..n {
            for q in (p + 1).max(cover_start)..n {
                if !used.contains(&key(p, q)) {
                    free.push((p, q));
                }
            }
        }
        if free.len() < extra {
            return Err(Error::InvalidParams(format!(
                "cannot place {} functional arcs over {n} variables",
                params.functional_arcs
            )));
        }
        free.shuffle(&mut rng);
        for &(p, q) in free.iter().take(extra) {
            functional.push((p, q));
            used.insert(key(p, q));
        }
    }

    let mut free: Vec<(usize, usize)> = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            if !used.contains(&key(p, q)) {
                free.push((p, q));
            }
        }
    }
    if free.len() < params.other_constraints {
        return Err(Error::InvalidParams(format!(
            "cannot place {} extra constraints over {n} variables",
            params.other_constraints
        )));
    }
    free.shuffle(&mut rng);
    let other: Vec<(usize, usize)> = free.into_iter().take(params.other_constraints).collect();

    let mut builder = Network::builder();
    for name in &names {
        builder = builder.variable(name.clone(), tokens.clone());
    }

    let keep = 1.0 - params.tightness;
    let mut layout = GeneratedLayout::default();
    for &(p, q) in &functional {
        let origin = order[p];
        let target = order[q];
        let pairs = if rng.gen_bool(params.cycle_fraction) {
            sample_bijection(&tokens, keep, &mut rng)
        } else {
            sample_partial_function(&tokens, keep, &mut rng)
        };
        builder = builder.constraint(names[origin].clone(), names[target].clone(), pairs);
        layout.functional_arcs.push((Var(origin), Var(target)));
    }
    for &(p, q) in &other {
        let a = order[p];
        let b = order[q];
        let mut pairs = Vec::new();
        for ta in &tokens {
            for tb in &tokens {
                if rng.gen_bool(keep) {
                    pairs.push((ta.clone(), tb.clone()));
                }
            }
        }
        builder = builder.constraint(names[a].clone(), names[b].clone(), pairs);
        layout.other_constraints.push((Var(a), Var(b)));
    }

    let net = builder.finish()?;
    Ok((net, layout))
}

fn key(p: usize, q: usize) -> (usize, usize) {
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

fn sample_partial_function(
    tokens: &[String],
    keep: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<(String, String)> {
    let mut pairs = Vec::new();
    for a in tokens {
        if rng.gen_bool(keep) {
            pairs.push((a.clone(), tokens[rng.gen_range(0..tokens.len())].clone()));
        }
    }
    pairs
}

fn sample_bijection(tokens: &[String], keep: f64, rng: &mut ChaCha8Rng) -> Vec<(String, String)> {
    let mut left: Vec<&String> = tokens.iter().collect();
    let mut right: Vec<&String> = tokens.iter().collect();
    left.shuffle(rng);
    right.shuffle(rng);
    left.into_iter()
        .zip(right)
        .filter(|_| rng.gen_bool(keep))
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect()
}

fn validate(params: &GeneratorParams) -> Result<()> {
    if params.variables == 0 {
        return Err(Error::InvalidParams(
            "at least one variable required".into(),
        ));
    }
    if params.domain_size == 0 {
        return Err(Error::InvalidParams("domains must be nonempty".into()));
    }
    for (name, f) in [
        ("cycle_fraction", params.cycle_fraction),
        ("tightness", params.tightness),
    ] {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::InvalidParams(format!("{name} must lie in [0, 1]")));
        }
    }
    let all_pairs = params.variables * (params.variables - 1) / 2;
    if params.functional_arcs + params.other_constraints > all_pairs {
        return Err(Error::InvalidParams(format!(
            "{} constraints requested but only {all_pairs} variable pairs exist",
            params.functional_arcs + params.other_constraints
        )));
    }
    Ok(())
}
