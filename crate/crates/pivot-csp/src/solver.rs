//! Solving by decomposition.
//!
//! [`solve_decomposed`] runs four phases: structural analysis (root set,
//! pivot candidates, ordering), pivot-consistent filtering, chronological
//! backtracking restricted to the root variables, and a linear extension of
//! each consistent root instantiation to a full solution. After a clean
//! filtering pass the extension never backtracks: each remaining variable
//! receives the functional image of its pivot origin.
//!
//! [`brute_force_solve`] is the independent oracle: depth-first enumeration
//! over all variables with direct constraint checks.

use std::time::{Duration, Instant};

use serde_json::json;

use crate::error::{Error, Result};
use crate::filtering::{pivot_filter, FilterReport};
use crate::network::{Instantiation, Network, Val, Var};
use crate::structure::{compute_pivot_plan, minimum_root_set, PivotPlan, TieBreak};

/// Search-space ceiling for the exhaustive oracle (product of domain
/// sizes).
pub const DEFAULT_ENUMERATION_BUDGET: f64 = 5e7;

/// A consistent total assignment, indexed by variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Solution {
    values: Vec<Val>,
}

impl Solution {
    pub fn value(&self, v: Var) -> Val {
        self.values[v.index()]
    }

    pub fn to_instantiation(&self) -> Instantiation {
        let mut inst = Instantiation::new();
        for (i, &a) in self.values.iter().enumerate() {
            inst.assign(Var(i), a);
        }
        inst
    }

    /// Value tokens in variable declaration order.
    pub fn tokens<'n>(&self, net: &'n Network) -> Vec<&'n str> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &a)| net.token(Var(i), a))
            .collect()
    }

    pub fn render(&self, net: &Network) -> String {
        format!("({})", self.tokens(net).join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    First,
    All,
    Count,
}

impl SolveMode {
    pub fn name(self) -> &'static str {
        match self {
            SolveMode::First => "first",
            SolveMode::All => "all",
            SolveMode::Count => "count",
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PhaseTimings {
    pub analyze: Duration,
    pub filter: Duration,
    pub root_search: Duration,
    pub extend: Duration,
}

/// Ledger of one decomposed solve.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub mode: SolveMode,
    pub plan: PivotPlan,
    pub filter: FilterReport,
    pub root_instantiations_found: usize,
    /// Constraint probes spent enumerating root instantiations.
    pub root_checks: usize,
    /// Stays zero: a pivot-consistent network never forces the extension
    /// phase to undo an assignment.
    pub extension_backtracks: usize,
    /// Total phase-4 assignments; exactly `n - r` per extended solution.
    pub assignment_steps: usize,
    pub solution_count: usize,
    pub solutions: Vec<Solution>,
    pub insoluble: bool,
    pub timings: PhaseTimings,
}

impl SolveReport {
    pub fn render_text(&self, net: &Network) -> String {
        let mut out = String::new();
        let names = |vars: &[Var]| {
            vars.iter()
                .map(|v| net.name(*v))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let roots: Vec<Var> = self.plan.roots().members().iter().copied().collect();
        out.push_str(&format!(
            "phase 1: roots {{{}}} (r = {})\n",
            names(&roots),
            roots.len()
        ));
        out.push_str(&format!(
            "         ordering {}\n",
            names(self.plan.ordering())
        ));
        for (origin, target) in self.plan.candidates() {
            out.push_str(&format!(
                "         candidate {} -> {}\n",
                net.name(origin),
                net.name(target)
            ));
        }
        out.push_str(&format!(
            "phase 2: {} created, {} modified, {} pairs removed, {} values pruned\n",
            self.filter.constraints_created.len(),
            self.filter.modified_scopes().len(),
            self.filter.pairs_removed.len(),
            self.filter.domain_removals.len(),
        ));
        if self.insoluble {
            out.push_str("verdict: insoluble\n");
        }
        out.push_str(&format!(
            "phase 3: {} consistent root instantiation(s)\n",
            self.root_instantiations_found
        ));
        match self.mode {
            SolveMode::Count => {
                out.push_str("phase 4: skipped (count mode)\n");
                out.push_str(&format!("solutions: {}\n", self.solution_count));
            }
            _ => {
                out.push_str(&format!(
                    "phase 4: {} extension step(s), {} backtrack(s)\n",
                    self.assignment_steps, self.extension_backtracks
                ));
                out.push_str(&format!("solutions: {}\n", self.solution_count));
                for s in &self.solutions {
                    out.push_str(&format!("  {}\n", s.render(net)));
                }
            }
        }
        out
    }

    pub fn to_json(&self, net: &Network) -> serde_json::Value {
        json!({
            "mode": self.mode.name(),
            "roots": self.plan.roots().members().iter().map(|v| net.name(*v)).collect::<Vec<_>>(),
            "ordering": self.plan.ordering().iter().map(|v| net.name(*v)).collect::<Vec<_>>(),
            "candidates": self.plan.candidates().map(|(o, t)| json!({
                "origin": net.name(o),
                "target": net.name(t),
            })).collect::<Vec<_>>(),
            "filter": self.filter.to_json(net),
            "root_instantiations_found": self.root_instantiations_found,
            "root_checks": self.root_checks,
            "extension_backtracks": self.extension_backtracks,
            "assignment_steps": self.assignment_steps,
            "solution_count": self.solution_count,
            "solutions": self.solutions.iter().map(|s| s.tokens(net)).collect::<Vec<_>>(),
            "insoluble": self.insoluble,
            "timings_us": {
                "analyze": self.timings.analyze.as_micros() as u64,
                "filter": self.timings.filter.as_micros() as u64,
                "root_search": self.timings.root_search.as_micros() as u64,
                "extend": self.timings.extend.as_micros() as u64,
            },
        })
    }
}

/// Lazy chronological backtracking over the root variables, in plan order,
/// checking each new value against the post-filtering relations to the
/// already assigned roots.
pub struct RootInstantiations<'a> {
    net: &'a Network,
    vars: Vec<Var>,
    domains: Vec<Vec<Val>>,
    cursor: Vec<usize>,
    chosen: Vec<usize>,
    depth: usize,
    emitted: bool,
    finished: bool,
    checks: usize,
}

impl<'a> RootInstantiations<'a> {
    fn new(net: &'a Network, plan: &PivotPlan) -> Self {
        let vars: Vec<Var> = plan.ordering()[..plan.r()].to_vec();
        let domains: Vec<Vec<Val>> = vars.iter().map(|&v| net.domain(v).collect()).collect();
        let n = vars.len();
        RootInstantiations {
            net,
            vars,
            domains,
            cursor: vec![0; n],
            chosen: vec![0; n],
            depth: 0,
            emitted: false,
            finished: false,
            checks: 0,
        }
    }

    /// Constraint probes performed so far.
    pub fn checks(&self) -> usize {
        self.checks
    }

    fn consistent_with_prefix(&mut self, depth: usize, val: Val) -> bool {
        for q in 0..depth {
            let other = self.vars[q];
            if !self.net.has_constraint(other, self.vars[depth]) {
                continue;
            }
            self.checks += 1;
            let view = self
                .net
                .relation_view(other, self.vars[depth])
                .expect("distinct roots");
            if !view.contains(self.domains[q][self.chosen[q]], val) {
                return false;
            }
        }
        true
    }
}

impl Iterator for RootInstantiations<'_> {
    type Item = Instantiation;

    fn next(&mut self) -> Option<Instantiation> {
        if self.finished {
            return None;
        }
        let n = self.vars.len();
        if n == 0 {
            self.finished = true;
            return Some(Instantiation::new());
        }
        if self.emitted {
            self.emitted = false;
            self.depth = n - 1;
        }
        loop {
            if self.depth == n {
                self.emitted = true;
                let mut inst = Instantiation::new();
                for (p, &var) in self.vars.iter().enumerate() {
                    inst.assign(var, self.domains[p][self.chosen[p]]);
                }
                return Some(inst);
            }
            let mut advanced = false;
            while self.cursor[self.depth] < self.domains[self.depth].len() {
                let idx = self.cursor[self.depth];
                self.cursor[self.depth] += 1;
                let val = self.domains[self.depth][idx];
                if self.consistent_with_prefix(self.depth, val) {
                    self.chosen[self.depth] = idx;
                    self.depth += 1;
                    if self.depth < n {
                        self.cursor[self.depth] = 0;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                if self.depth == 0 {
                    self.finished = true;
                    return None;
                }
                self.depth -= 1;
            }
        }
    }
}

/// Streams every consistent instantiation of the root set of `plan`,
/// against the relations of `netp` (normally the pivot-consistent
/// closure).
pub fn instantiate_root<'a>(netp: &'a Network, plan: &PivotPlan) -> RootInstantiations<'a> {
    RootInstantiations::new(netp, plan)
}

/// Extends a consistent root instantiation to a full solution in exactly
/// `n - r` assignments: each non-root variable, taken in ordering position,
/// receives the image of its pivot origin's value.
pub fn extend_backtrack_free(
    netp: &Network,
    plan: &PivotPlan,
    root_inst: &Instantiation,
) -> Result<Solution> {
    let n = plan.n();
    let mut values: Vec<Option<Val>> = vec![None; n];
    for root in plan.roots().members() {
        let Some(a) = root_inst.get(*root) else {
            return Err(Error::InvalidPlan(format!(
                "root instantiation misses `{}`",
                netp.name(*root)
            )));
        };
        values[root.index()] = Some(a);
    }
    for pos in plan.r()..n {
        let k = plan.ordering()[pos];
        let h = plan.candidate(k).expect("candidate per non-root");
        let a_h = values[h.index()].expect("origins precede their targets");
        match netp.image(h, k, a_h)? {
            Some(a_k) => values[k.index()] = Some(a_k),
            None => {
                return Err(Error::PivotImageMissing {
                    variable: netp.name(h).to_string(),
                    value: netp.token(h, a_h).to_string(),
                    target: netp.name(k).to_string(),
                })
            }
        }
    }
    Ok(Solution {
        values: values.into_iter().map(|v| v.expect("total")).collect(),
    })
}

/// Number of solutions of a pivot-consistent network: the count of its
/// consistent root instantiations, no extension materialized.
pub fn count_solutions(netp: &Network, plan: &PivotPlan) -> usize {
    instantiate_root(netp, plan).count()
}

/// Extends every root instantiation produced by an arbitrary search
/// engine. The chronological backtracking of [`instantiate_root`] is one
/// such engine; anything yielding consistent root assignments works.
pub fn extend_stream<I>(netp: &Network, plan: &PivotPlan, stream: I) -> Result<Vec<Solution>>
where
    I: IntoIterator<Item = Instantiation>,
{
    stream
        .into_iter()
        .map(|inst| extend_backtrack_free(netp, plan, &inst))
        .collect()
}

pub fn brute_force_solve(net: &Network) -> Result<Vec<Solution>> {
    brute_force_solve_with_budget(net, DEFAULT_ENUMERATION_BUDGET)
}

/// Depth-first enumeration of all solutions in variable declaration order,
/// refused up front when the domain-size product exceeds the budget.
pub fn brute_force_solve_with_budget(net: &Network, budget: f64) -> Result<Vec<Solution>> {
    let estimate: f64 = net
        .vars()
        .map(|v| (net.domain_size(v).max(1)) as f64)
        .product();
    if estimate > budget {
        return Err(Error::EnumerationBudget { estimate, budget });
    }

    fn dfs(net: &Network, stack: &mut Vec<Val>, out: &mut Vec<Solution>) {
        let depth = stack.len();
        if depth == net.var_count() {
            out.push(Solution {
                values: stack.clone(),
            });
            return;
        }
        let v = Var(depth);
        for a in net.domain(v).collect::<Vec<_>>() {
            let ok = (0..depth).all(|q| {
                let u = Var(q);
                !net.has_constraint(u, v)
                    || net
                        .relation_view(u, v)
                        .expect("distinct scope")
                        .contains(stack[q], a)
            });
            if ok {
                stack.push(a);
                dfs(net, stack, out);
                stack.pop();
            }
        }
    }

    let mut out = Vec::new();
    dfs(net, &mut Vec::new(), &mut out);
    Ok(out)
}

/// The four-phase method: analyze, filter, enumerate the root subproblem,
/// extend. Insolubility surfaces as an empty result, never as an error.
pub fn solve_decomposed(
    net: &Network,
    mode: SolveMode,
    tie_break: TieBreak,
) -> Result<SolveReport> {
    let t = Instant::now();
    let roots = minimum_root_set(net, tie_break);
    let plan = compute_pivot_plan(net, &roots, tie_break)?;
    let analyze = t.elapsed();

    let t = Instant::now();
    let (filtered, filter) = pivot_filter(net, &plan)?;
    let filter_time = t.elapsed();

    let mut report = SolveReport {
        mode,
        plan: plan.clone(),
        filter,
        root_instantiations_found: 0,
        root_checks: 0,
        extension_backtracks: 0,
        assignment_steps: 0,
        solution_count: 0,
        solutions: Vec::new(),
        insoluble: false,
        timings: PhaseTimings {
            analyze,
            filter: filter_time,
            ..PhaseTimings::default()
        },
    };

    if report.filter.wiped_out.is_some() {
        report.insoluble = true;
        return Ok(report);
    }

    let n_minus_r = plan.n() - plan.r();
    let mut stream = instantiate_root(&filtered, &plan);
    loop {
        let t = Instant::now();
        let next = stream.next();
        report.timings.root_search += t.elapsed();
        let Some(root_inst) = next else { break };
        report.root_instantiations_found += 1;
        match mode {
            SolveMode::Count => {
                report.solution_count += 1;
            }
            SolveMode::First | SolveMode::All => {
                let t = Instant::now();
                let solution = extend_backtrack_free(&filtered, &plan, &root_inst)?;
                report.timings.extend += t.elapsed();
                report.assignment_steps += n_minus_r;
                report.solution_count += 1;
                report.solutions.push(solution);
                if mode == SolveMode::First {
                    break;
                }
            }
        }
    }
    report.root_checks = stream.checks();
    report.insoluble = report.solution_count == 0;
    Ok(report)
}
