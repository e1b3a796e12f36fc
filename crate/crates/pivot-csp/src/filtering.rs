//! Consistency filtering.
//!
//! The main entry point is [`pivot_filter`], which drives the directed
//! filtering loop: for each non-root variable `x_k`, taken from the back of
//! the assignment ordering, the pivot candidate `x_h -> x_k` is made
//! compatible with every constraint reaching `x_k` from earlier variables.
//! Each [`compatible`] call keeps only those pairs of `R_hj` whose `x_h`
//! value maps, through the functional image, to a value supported by `x_j`;
//! the self call (`j = h`) prunes domain values without an image.
//!
//! Arc, path and directional path consistency are provided as reference
//! filters; all four record their work in a [`FilterReport`].

use std::collections::{BTreeSet, VecDeque};

use serde_json::json;

use crate::error::{Error, Result};
use crate::network::{Network, Val, Var};
use crate::structure::PivotPlan;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterMethod {
    Pivot,
    Ac,
    Pc,
    Dpc,
}

impl FilterMethod {
    pub fn name(self) -> &'static str {
        match self {
            FilterMethod::Pivot => "pivot",
            FilterMethod::Ac => "ac",
            FilterMethod::Pc => "pc",
            FilterMethod::Dpc => "dpc",
        }
    }
}

/// One call of the compatibility procedure: pivot origin, pivot target and
/// the earlier variable being reconciled with the pivot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompatibleCall {
    pub origin: Var,
    pub target: Var,
    pub other: Var,
}

/// A pair suppression, reported in canonical scope orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairRemoval {
    pub scope: (Var, Var),
    pub pair: (Val, Val),
    pub step: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainRemoval {
    pub var: Var,
    pub value: Val,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CreatedConstraint {
    pub scope: (Var, Var),
    pub step: usize,
}

/// A relation or domain that became empty, proving the network insoluble.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Wipeout {
    Relation((Var, Var)),
    Domain(Var),
}

/// Ledger of one filtering run. The step index stored with removals and
/// creations is the value of the method's call counter at that moment
/// (`compatible` calls for the pivot filter, triangle revisions for the
/// path-based ones).
#[derive(Clone, Debug)]
pub struct FilterReport {
    pub method: FilterMethod,
    pub calls: Vec<CompatibleCall>,
    pub pairs_removed: Vec<PairRemoval>,
    pub domain_removals: Vec<DomainRemoval>,
    pub constraints_created: Vec<CreatedConstraint>,
    pub compatible_calls: usize,
    pub triangle_checks: usize,
    pub pair_checks: usize,
    pub max_pair_checks_per_call: usize,
    pub wiped_out: Option<Wipeout>,
}

impl FilterReport {
    fn new(method: FilterMethod) -> Self {
        FilterReport {
            method,
            calls: Vec::new(),
            pairs_removed: Vec::new(),
            domain_removals: Vec::new(),
            constraints_created: Vec::new(),
            compatible_calls: 0,
            triangle_checks: 0,
            pair_checks: 0,
            max_pair_checks_per_call: 0,
            wiped_out: None,
        }
    }

    pub fn created_scopes(&self) -> BTreeSet<(Var, Var)> {
        self.constraints_created.iter().map(|c| c.scope).collect()
    }

    /// Scopes of pre-existing constraints that lost at least one pair.
    pub fn modified_scopes(&self) -> BTreeSet<(Var, Var)> {
        let created = self.created_scopes();
        self.pairs_removed
            .iter()
            .map(|r| r.scope)
            .filter(|s| !created.contains(s))
            .collect()
    }

    fn record_wipeout(&mut self, w: Wipeout) {
        if self.wiped_out.is_none() {
            self.wiped_out = Some(w);
        }
    }

    pub fn render_text(&self, net: &Network) -> String {
        let mut out = String::new();
        let scope_name = |s: (Var, Var)| format!("{{{}, {}}}", net.name(s.0), net.name(s.1));
        out.push_str(&format!("method: {}\n", self.method.name()));
        out.push_str(&format!(
            "constraints created: {}\n",
            self.constraints_created.len()
        ));
        for c in &self.constraints_created {
            out.push_str(&format!("  step {:>3}  {}\n", c.step, scope_name(c.scope)));
        }
        out.push_str(&format!(
            "constraints modified: {}\n",
            self.modified_scopes().len()
        ));
        for s in self.modified_scopes() {
            out.push_str(&format!("  {}\n", scope_name(s)));
        }
        out.push_str(&format!("pairs removed: {}\n", self.pairs_removed.len()));
        for p in &self.pairs_removed {
            out.push_str(&format!(
                "  step {:>3}  {}: ({}, {})\n",
                p.step,
                scope_name(p.scope),
                net.token(p.scope.0, p.pair.0),
                net.token(p.scope.1, p.pair.1)
            ));
        }
        out.push_str(&format!(
            "domain values removed: {}\n",
            self.domain_removals.len()
        ));
        for d in &self.domain_removals {
            out.push_str(&format!(
                "  {} := {} pruned\n",
                net.name(d.var),
                net.token(d.var, d.value)
            ));
        }
        out.push_str(&format!(
            "counters: compatible_calls={} triangle_checks={} pair_checks={}\n",
            self.compatible_calls, self.triangle_checks, self.pair_checks
        ));
        match &self.wiped_out {
            Some(Wipeout::Relation(s)) => out.push_str(&format!(
                "wiped out: relation {} (insoluble)\n",
                scope_name(*s)
            )),
            Some(Wipeout::Domain(v)) => out.push_str(&format!(
                "wiped out: domain of {} (insoluble)\n",
                net.name(*v)
            )),
            None => {}
        }
        out
    }

    pub fn to_json(&self, net: &Network) -> serde_json::Value {
        let scope = |s: (Var, Var)| json!([net.name(s.0), net.name(s.1)]);
        json!({
            "method": self.method.name(),
            "calls": self.calls.iter().map(|c| json!({
                "origin": net.name(c.origin),
                "target": net.name(c.target),
                "other": net.name(c.other),
            })).collect::<Vec<_>>(),
            "constraints_created": self.constraints_created.iter().map(|c| json!({
                "scope": scope(c.scope),
                "step": c.step,
            })).collect::<Vec<_>>(),
            "constraints_modified": self.modified_scopes().iter().map(|s| scope(*s)).collect::<Vec<_>>(),
            "pairs_removed": self.pairs_removed.iter().map(|p| json!({
                "scope": scope(p.scope),
                "pair": [net.token(p.scope.0, p.pair.0), net.token(p.scope.1, p.pair.1)],
                "step": p.step,
            })).collect::<Vec<_>>(),
            "domain_removals": self.domain_removals.iter().map(|d| json!({
                "variable": net.name(d.var),
                "value": net.token(d.var, d.value),
            })).collect::<Vec<_>>(),
            "compatible_calls": self.compatible_calls,
            "triangle_checks": self.triangle_checks,
            "pair_checks": self.pair_checks,
            "wiped_out": self.wiped_out.as_ref().map(|w| match w {
                Wipeout::Relation(s) => json!({"relation": scope(*s)}),
                Wipeout::Domain(v) => json!({"domain": net.name(*v)}),
            }),
        })
    }
}

/// Verdict of a consistency check, with a falsifying pair when negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyWitness {
    pub verdict: bool,
    pub counterexample: Option<Counterexample>,
}

impl ConsistencyWitness {
    fn holds() -> Self {
        ConsistencyWitness {
            verdict: true,
            counterexample: None,
        }
    }

    fn fails(cx: Counterexample) -> Self {
        ConsistencyWitness {
            verdict: false,
            counterexample: Some(cx),
        }
    }
}

/// A pair of `R_ij` with no common support in `D_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub i: Var,
    pub j: Var,
    pub pair: (Val, Val),
    pub k: Var,
}

fn canonical_scope(i: Var, j: Var) -> (Var, Var) {
    if i.index() <= j.index() {
        (i, j)
    } else {
        (j, i)
    }
}

fn canonical_pair(i: Var, j: Var, a_i: Val, a_j: Val) -> ((Var, Var), (Val, Val)) {
    if i.index() <= j.index() {
        ((i, j), (a_i, a_j))
    } else {
        ((j, i), (a_j, a_i))
    }
}

/// Makes the constraints `x_h -> x_k` and `C_jk` compatible on `x_k`:
/// suppresses from `R_hj` every pair whose image under `f_hk` is not
/// supported by the `x_j` side, creating the constraint `C_hj` first when
/// the relation was universal. With `j = h` this degenerates into pruning
/// the values of `D_h` that have no image at all.
pub fn compatible(
    net: &mut Network,
    h: Var,
    k: Var,
    j: Var,
    report: &mut FilterReport,
) -> Result<()> {
    let images = net.image_table(h, k)?;
    report.compatible_calls += 1;
    let step = report.compatible_calls;
    report.calls.push(CompatibleCall {
        origin: h,
        target: k,
        other: j,
    });

    let checks;
    if j == h {
        checks = net.domain_size(h);
        let doomed: Vec<Val> = net
            .domain(h)
            .filter(|a| images[a.index()].is_none())
            .collect();
        for a in doomed {
            net.remove_value(h, a);
            report
                .domain_removals
                .push(DomainRemoval { var: h, value: a });
        }
        if net.domain_size(h) == 0 {
            report.record_wipeout(Wipeout::Domain(h));
        }
    } else {
        let doomed: Vec<(Val, Val)> = {
            let hj = net.relation_view(h, j)?;
            let jk = net.relation_view(j, k)?;
            let pairs = hj.pairs();
            checks = pairs.len();
            pairs
                .into_iter()
                .filter(|&(a_h, a_j)| match images[a_h.index()] {
                    Some(a_k) => !jk.contains(a_j, a_k),
                    None => true,
                })
                .collect()
        };
        if !doomed.is_empty() {
            if net.ensure_explicit(h, j) {
                report.constraints_created.push(CreatedConstraint {
                    scope: canonical_scope(h, j),
                    step,
                });
            }
            for (a_h, a_j) in doomed {
                net.remove_pair(h, j, a_h, a_j);
                let (scope, pair) = canonical_pair(h, j, a_h, a_j);
                report.pairs_removed.push(PairRemoval { scope, pair, step });
            }
            if net.relation_view(h, j)?.pair_count() == 0 {
                report.record_wipeout(Wipeout::Relation(canonical_scope(h, j)));
            }
        }
    }
    report.pair_checks += checks;
    report.max_pair_checks_per_call = report.max_pair_checks_per_call.max(checks);
    Ok(())
}

/// Makes `x_h -> x_k` a pivot of the ordering prefix before `x_k`: one
/// [`compatible`] call per earlier variable constrained with `x_k`, the
/// self call first.
pub fn pivot_step(
    net: &mut Network,
    h: Var,
    k: Var,
    plan: &PivotPlan,
    report: &mut FilterReport,
) -> Result<()> {
    if plan.position(h) >= plan.position(k) {
        return Err(Error::InvalidPlan(format!(
            "pivot origin `{}` does not precede `{}`",
            net.name(h),
            net.name(k)
        )));
    }
    compatible(net, h, k, h, report)?;
    for pos in 0..plan.position(k) {
        let j = plan.ordering()[pos];
        if j != h && net.has_constraint(j, k) {
            compatible(net, h, k, j, report)?;
        }
    }
    Ok(())
}

/// Checks that a plan fits this network: matching variable count and one
/// functional candidate constraint per non-root variable.
pub fn validate_plan(net: &Network, plan: &PivotPlan) -> Result<()> {
    if plan.n() != net.var_count() {
        return Err(Error::InvalidPlan(
            "plan and network differ in variable count".into(),
        ));
    }
    for (origin, target) in plan.candidates() {
        if !net.has_constraint(origin, target) || !net.functional_directions(origin, target)?.i_to_j
        {
            return Err(Error::InvalidPlan(format!(
                "candidate `{}` -> `{}` is not a functional constraint of this network",
                net.name(origin),
                net.name(target)
            )));
        }
    }
    Ok(())
}

/// Computes the pivot consistent closure of `net` with respect to the
/// plan's root set, candidates and ordering. Non-root variables are
/// processed strictly from the last position down to the first non-root
/// one. An emptied relation or domain is recorded in the report and proves
/// the network insoluble, but never aborts the pass.
pub fn pivot_filter(net: &Network, plan: &PivotPlan) -> Result<(Network, FilterReport)> {
    validate_plan(net, plan)?;
    let mut work = net.clone();
    let mut report = FilterReport::new(FilterMethod::Pivot);
    for pos in (plan.r()..plan.n()).rev() {
        let k = plan.ordering()[pos];
        let h = plan
            .candidate(k)
            .expect("plan provides a candidate per non-root variable");
        pivot_step(&mut work, h, k, plan, &mut report)?;
    }
    // At most one compatibility call per (earlier variable, target) pair.
    debug_assert!(report.compatible_calls <= (plan.r()..plan.n()).sum());
    Ok((work, report))
}

/// Checks that `C_ik` and `C_jk` are compatible on `x_k`: every pair of
/// `R_ij` has a common support in `D_k`. With `i = j` the pair relation
/// degenerates to the values of `D_i` themselves.
pub fn check_xk_compatible(net: &Network, i: Var, j: Var, k: Var) -> Result<ConsistencyWitness> {
    for end in [i, j] {
        if !net.has_constraint(end, k) {
            return Err(Error::MissingConstraint(
                net.name(end).to_string(),
                net.name(k).to_string(),
            ));
        }
    }
    let ik = net.relation_view(i, k)?;
    if i == j {
        for a_i in net.domain(i) {
            if ik.partners(a_i).next().is_none() {
                return Ok(ConsistencyWitness::fails(Counterexample {
                    i,
                    j,
                    pair: (a_i, a_i),
                    k,
                }));
            }
        }
        return Ok(ConsistencyWitness::holds());
    }
    let jk = net.relation_view(j, k)?;
    let ks: Vec<Val> = net.domain(k).collect();
    for (a_i, a_j) in net.relation_view(i, j)?.pairs() {
        let supported = ks
            .iter()
            .any(|&a_k| ik.contains(a_i, a_k) && jk.contains(a_j, a_k));
        if !supported {
            return Ok(ConsistencyWitness::fails(Counterexample {
                i,
                j,
                pair: (a_i, a_j),
                k,
            }));
        }
    }
    Ok(ConsistencyWitness::holds())
}

/// Checks pivot consistency of `net` with respect to a plan: the plan must
/// have the right shape for this network (one functional candidate per
/// non-root variable, origins preceding targets), and for every non-root
/// `x_k` the candidate must be `x_k`-compatible with each constraint
/// reaching `x_k` from a distinct earlier variable.
pub fn check_pivot_consistent(net: &Network, plan: &PivotPlan) -> ConsistencyWitness {
    if validate_plan(net, plan).is_err() {
        return ConsistencyWitness {
            verdict: false,
            counterexample: None,
        };
    }
    for pos in plan.r()..plan.n() {
        let k = plan.ordering()[pos];
        let h = plan.candidate(k).expect("candidate per non-root");
        for &j in &plan.ordering()[..pos] {
            if j == h || !net.has_constraint(j, k) {
                continue;
            }
            let witness = check_xk_compatible(net, h, j, k).expect("constraints verified present");
            if !witness.verdict {
                return witness;
            }
        }
    }
    ConsistencyWitness::holds()
}

/// AC-3 over the declared constraints: prunes domain values without
/// support, propagating along incident constraints until stable.
pub fn arc_consistency(net: &Network) -> (Network, FilterReport) {
    let mut work = net.clone();
    let mut report = FilterReport::new(FilterMethod::Ac);
    let mut queue: VecDeque<(Var, Var)> = VecDeque::new();
    let mut queued: BTreeSet<(usize, usize)> = BTreeSet::new();
    let scopes: Vec<(Var, Var)> = work.constraints().collect();
    for &(i, j) in &scopes {
        for arc in [(i, j), (j, i)] {
            if queued.insert((arc.0.index(), arc.1.index())) {
                queue.push_back(arc);
            }
        }
    }
    while let Some((i, j)) = queue.pop_front() {
        queued.remove(&(i.index(), j.index()));
        let doomed: Vec<Val> = {
            let view = work.relation_view(i, j).expect("distinct scope");
            work.domain(i)
                .filter(|&a_i| {
                    let mut probes = 0;
                    let supported = view.partners(a_i).inspect(|_| probes += 1).next().is_some();
                    report.pair_checks += probes.max(1);
                    !supported
                })
                .collect()
        };
        if doomed.is_empty() {
            continue;
        }
        for a in doomed {
            work.remove_value(i, a);
            report
                .domain_removals
                .push(DomainRemoval { var: i, value: a });
        }
        if work.domain_size(i) == 0 {
            report.record_wipeout(Wipeout::Domain(i));
        }
        for &(a, b) in &scopes {
            let m = if a == i {
                Some(b)
            } else if b == i {
                Some(a)
            } else {
                None
            };
            if let Some(m) = m {
                if m != j && queued.insert((m.index(), i.index())) {
                    queue.push_back((m, i));
                }
            }
        }
    }
    (work, report)
}

/// One path-consistency revision of `R_ij` against `x_k`; shared by the
/// path and directional-path filters.
fn revise_pair_against(
    work: &mut Network,
    i: Var,
    j: Var,
    k: Var,
    report: &mut FilterReport,
) -> usize {
    report.triangle_checks += 1;
    let step = report.triangle_checks;
    let doomed: Vec<(Val, Val)> = {
        let ij = work.relation_view(i, j).expect("distinct scope");
        let ik = work.relation_view(i, k).expect("distinct scope");
        let jk = work.relation_view(j, k).expect("distinct scope");
        let ks: Vec<Val> = work.domain(k).collect();
        let mut checks = 0usize;
        let doomed: Vec<(Val, Val)> = ij
            .pairs()
            .into_iter()
            .filter(|&(a_i, a_j)| {
                checks += 1;
                !ks.iter()
                    .any(|&a_k| ik.contains(a_i, a_k) && jk.contains(a_j, a_k))
            })
            .collect();
        report.pair_checks += checks;
        doomed
    };
    if doomed.is_empty() {
        return 0;
    }
    if work.ensure_explicit(i, j) {
        report.constraints_created.push(CreatedConstraint {
            scope: canonical_scope(i, j),
            step,
        });
    }
    let removed = doomed.len();
    for (a_i, a_j) in doomed {
        work.remove_pair(i, j, a_i, a_j);
        let (scope, pair) = canonical_pair(i, j, a_i, a_j);
        report.pairs_removed.push(PairRemoval { scope, pair, step });
    }
    if work
        .relation_view(i, j)
        .expect("distinct scope")
        .pair_count()
        == 0
    {
        report.record_wipeout(Wipeout::Relation(canonical_scope(i, j)));
    }
    removed
}

/// Textbook path consistency: fixpoint over all triangles of the completed
/// constraint graph, materializing universal relations as pairs get
/// suppressed. Domains are left untouched.
pub fn path_consistency(net: &Network) -> (Network, FilterReport) {
    let mut work = net.clone();
    let mut report = FilterReport::new(FilterMethod::Pc);
    let n = work.var_count();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    if revise_pair_against(&mut work, Var(i), Var(j), Var(k), &mut report) > 0 {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    (work, report)
}

/// Directional path consistency: one sweep from the last variable of the
/// ordering down, revising each pair of earlier neighbors of `x_k`
/// (constraints created along the way are picked up by later, smaller
/// positions).
pub fn directional_path_consistency(
    net: &Network,
    ordering: &[Var],
) -> Result<(Network, FilterReport)> {
    let n = net.var_count();
    let distinct: BTreeSet<usize> = ordering.iter().map(|v| v.index()).collect();
    if ordering.len() != n || distinct.len() != n {
        return Err(Error::InvalidPlan(
            "ordering is not a permutation of the variables".into(),
        ));
    }
    let mut work = net.clone();
    let mut report = FilterReport::new(FilterMethod::Dpc);
    for pos_k in (0..n).rev() {
        let k = ordering[pos_k];
        let neighbors: Vec<Var> = ordering[..pos_k]
            .iter()
            .copied()
            .filter(|&j| work.has_constraint(j, k))
            .collect();
        for x in 0..neighbors.len() {
            for y in x + 1..neighbors.len() {
                revise_pair_against(&mut work, neighbors[x], neighbors[y], k, &mut report);
            }
        }
    }
    Ok((work, report))
}
