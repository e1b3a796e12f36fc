//! Diagnostic checks of structural and consistency properties, surfaced by
//! the `verify` subcommand: root-set coverage, ordering compatibility, plan
//! shape and pivot consistency, each with a witness on failure.

use std::collections::BTreeMap;

use serde_json::json;

use crate::filtering::{check_pivot_consistent, validate_plan};
use crate::network::{Network, Var};
use crate::structure::{
    functional_subgraph, r_compatibility_issue, uncovered_variables, OrderingIssue, PivotPlan,
    RootSet,
};

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{:<4} {:<24} {}\n",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        out.push_str(if self.all_passed() {
            "all checks passed\n"
        } else {
            "verification failed\n"
        });
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "all_passed": self.all_passed(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "passed": c.passed,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn run_verify(net: &Network, plan: &PivotPlan) -> VerifyReport {
    let candidates: BTreeMap<Var, Var> = plan.candidates().map(|(o, t)| (t, o)).collect();
    run_verify_parts(
        net,
        plan.roots().clone(),
        plan.ordering().to_vec(),
        candidates,
    )
}

/// Like [`run_verify`] but accepting raw plan parts, so that orderings and
/// candidate sets that do not even assemble into a valid plan still get a
/// named diagnosis instead of an up-front rejection.
pub fn run_verify_parts(
    net: &Network,
    roots: RootSet,
    ordering: Vec<Var>,
    candidates: BTreeMap<Var, Var>,
) -> VerifyReport {
    let mut checks = Vec::new();
    let g = functional_subgraph(net);

    let gap = uncovered_variables(net, roots.members());
    checks.push(CheckResult {
        name: "root-set",
        passed: gap.is_empty(),
        detail: if gap.is_empty() {
            format!("covers all {} variables", net.var_count())
        } else {
            format!(
                "unreachable: {}",
                gap.iter()
                    .map(|v| net.name(*v))
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        },
    });

    let issue = r_compatibility_issue(&ordering, &roots, &g);
    checks.push(CheckResult {
        name: "ordering-compatible",
        passed: issue.is_none(),
        detail: match issue {
            None => "prefixed by the roots, every later variable has a functional ancestor".into(),
            Some(OrderingIssue::NotPermutation) => {
                "ordering is not a permutation of the variables".into()
            }
            Some(OrderingIssue::NotPrefixed { variable }) => {
                format!("not prefixed by the root set: {}", net.name(variable))
            }
            Some(OrderingIssue::NoFunctionalAncestor { variable }) => {
                format!("{} has no earlier functional ancestor", net.name(variable))
            }
        },
    });

    let assembled = PivotPlan::from_parts(net, roots, ordering, candidates)
        .and_then(|plan| validate_plan(net, &plan).map(|()| plan));
    match assembled {
        Err(e) => {
            checks.push(CheckResult {
                name: "candidate-shape",
                passed: false,
                detail: e.to_string(),
            });
            checks.push(CheckResult {
                name: "pivot-consistency",
                passed: false,
                detail: "not evaluated: the candidate set does not form a checkable plan".into(),
            });
        }
        Ok(plan) => {
            checks.push(CheckResult {
                name: "candidate-shape",
                passed: true,
                detail: format!(
                    "{} functional candidates, one per non-root variable",
                    plan.candidates().count()
                ),
            });
            let witness = check_pivot_consistent(net, &plan);
            checks.push(CheckResult {
                name: "pivot-consistency",
                passed: witness.verdict,
                detail: match witness.counterexample {
                    None if witness.verdict => "every candidate is a pivot of its prefix".into(),
                    None => "plan shape does not match the network".into(),
                    Some(cx) => format!(
                        "pair ({}, {}) of {{{}, {}}} has no support in {}",
                        net.token(cx.i, cx.pair.0),
                        net.token(cx.j, cx.pair.1),
                        net.name(cx.i),
                        net.name(cx.j),
                        net.name(cx.k)
                    ),
                },
            });
        }
    }

    VerifyReport { checks }
}
