//! Side-by-side runs of the four filtering methods on one instance.

use std::time::{Duration, Instant};

use serde_json::json;

use crate::error::Result;
use crate::filtering::{
    arc_consistency, directional_path_consistency, path_consistency, pivot_filter, FilterMethod,
    FilterReport,
};
use crate::network::Network;
use crate::structure::{compute_pivot_plan, minimum_root_set, PivotPlan, TieBreak};

/// One method's outcome, kept with its full report.
#[derive(Clone, Debug)]
pub struct MethodRun {
    pub method: FilterMethod,
    pub report: FilterReport,
    pub filtered: Network,
    pub wall: Duration,
}

impl MethodRun {
    pub fn constraints_created(&self) -> usize {
        self.report.constraints_created.len()
    }

    pub fn constraints_modified(&self) -> usize {
        self.report.modified_scopes().len()
    }

    pub fn pairs_removed(&self) -> usize {
        self.report.pairs_removed.len()
    }

    pub fn domain_values_removed(&self) -> usize {
        self.report.domain_removals.len()
    }
}

#[derive(Clone, Debug)]
pub struct CompareReport {
    pub plan: PivotPlan,
    pub runs: Vec<MethodRun>,
}

impl CompareReport {
    pub fn run(&self, method: FilterMethod) -> &MethodRun {
        self.runs
            .iter()
            .find(|r| r.method == method)
            .expect("all four methods present")
    }

    pub fn render_text(&self, _net: &Network) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<6} {:>8} {:>9} {:>7} {:>7} {:>11} {:>11} {:>10}\n",
            "method", "created", "modified", "pairs", "values", "compatible", "triangles", "time"
        ));
        for r in &self.runs {
            out.push_str(&format!(
                "{:<6} {:>8} {:>9} {:>7} {:>7} {:>11} {:>11} {:>9.0?}\n",
                r.method.name(),
                r.constraints_created(),
                r.constraints_modified(),
                r.pairs_removed(),
                r.domain_values_removed(),
                r.report.compatible_calls,
                r.report.triangle_checks,
                r.wall,
            ));
        }
        out
    }

    pub fn to_json(&self, net: &Network) -> serde_json::Value {
        json!({
            "methods": self.runs.iter().map(|r| json!({
                "method": r.method.name(),
                "constraints_created": r.constraints_created(),
                "constraints_modified": r.constraints_modified(),
                "pairs_removed": r.pairs_removed(),
                "domain_values_removed": r.domain_values_removed(),
                "compatible_calls": r.report.compatible_calls,
                "triangle_checks": r.report.triangle_checks,
                "pair_checks": r.report.pair_checks,
                "wall_us": r.wall.as_micros() as u64,
                "wiped_out": r.report.wiped_out.is_some(),
                "report": r.report.to_json(net),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Runs pivot filtering, arc, path and directional path consistency on
/// independent copies of `net`, under one shared plan.
pub fn run_compare(net: &Network, tie_break: TieBreak) -> Result<CompareReport> {
    let roots = minimum_root_set(net, tie_break);
    let plan = compute_pivot_plan(net, &roots, tie_break)?;
    let mut runs = Vec::new();

    let t = Instant::now();
    let (filtered, report) = pivot_filter(net, &plan)?;
    runs.push(MethodRun {
        method: FilterMethod::Pivot,
        report,
        filtered,
        wall: t.elapsed(),
    });

    let t = Instant::now();
    let (filtered, report) = arc_consistency(net);
    runs.push(MethodRun {
        method: FilterMethod::Ac,
        report,
        filtered,
        wall: t.elapsed(),
    });

    let t = Instant::now();
    let (filtered, report) = path_consistency(net);
    runs.push(MethodRun {
        method: FilterMethod::Pc,
        report,
        filtered,
        wall: t.elapsed(),
    });

    let t = Instant::now();
    let (filtered, report) = directional_path_consistency(net, plan.ordering())?;
    runs.push(MethodRun {
        method: FilterMethod::Dpc,
        report,
        filtered,
        wall: t.elapsed(),
    });

    Ok(CompareReport { plan, runs })
}
