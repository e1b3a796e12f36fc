//! Instance and plan documents.
//!
//! An instance is one JSON document:
//!
//! ```json
//! {
//!   "variables": [
//!     {"name": "GUIDES", "domain": ["Alice", "Bob", "Chris"]}
//!   ],
//!   "constraints": [
//!     {"scope": ["GUIDES", "CITIES"], "pairs": [["Alice", "Paris"]]},
//!     {"scope": ["GUIDES", "CURRENCIES"], "universal": true}
//!   ],
//!   "metadata": {"comment": "anything, carried but not interpreted"}
//! }
//! ```
//!
//! Every constraint needs either a `pairs` list (possibly empty) or
//! `universal: true`. Saving a network emits live domain values and live
//! pairs, keeping universal relations symbolic, so a load/save round trip
//! is the identity on canonical forms.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Network, Var};
use crate::structure::{PivotPlan, RootSet};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub variables: Vec<VariableDecl>,
    #[serde(default)]
    pub constraints: Vec<ConstraintDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariableDecl {
    pub name: String,
    pub domain: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstraintDecl {
    pub scope: (String, String),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub universal: bool,
}

pub fn network_from_doc(doc: &InstanceDoc) -> Result<Network> {
    let mut builder = Network::builder();
    for v in &doc.variables {
        builder = builder.variable(v.name.clone(), v.domain.clone());
    }
    for c in &doc.constraints {
        let (ref a, ref b) = c.scope;
        match (&c.pairs, c.universal) {
            (Some(_), true) => {
                return Err(Error::InvalidInstance(format!(
                    "constraint [{a}, {b}] declares both pairs and universal"
                )))
            }
            (None, false) => {
                return Err(Error::InvalidInstance(format!(
                    "constraint [{a}, {b}] needs either pairs or universal: true"
                )))
            }
            (None, true) => builder = builder.universal(a.clone(), b.clone()),
            (Some(pairs), false) => {
                builder = builder.constraint(a.clone(), b.clone(), pairs.iter().cloned())
            }
        }
    }
    builder.finish()
}

pub fn doc_from_network(net: &Network) -> InstanceDoc {
    let variables = net
        .vars()
        .map(|v| VariableDecl {
            name: net.name(v).to_string(),
            domain: net.domain(v).map(|a| net.token(v, a).to_string()).collect(),
        })
        .collect();
    let constraints = net
        .constraints()
        .map(|(i, j)| {
            let view = net.relation_view(i, j).expect("distinct scope");
            let scope = (net.name(i).to_string(), net.name(j).to_string());
            if view.is_universal() {
                ConstraintDecl {
                    scope,
                    pairs: None,
                    universal: true,
                }
            } else {
                ConstraintDecl {
                    scope,
                    pairs: Some(
                        view.token_pairs()
                            .into_iter()
                            .map(|(a, b)| (a.to_string(), b.to_string()))
                            .collect(),
                    ),
                    universal: false,
                }
            }
        })
        .collect();
    InstanceDoc {
        variables,
        constraints,
        metadata: None,
    }
}

/// Parses an instance document; `origin` names the source in diagnostics.
pub fn parse_instance(text: &str, origin: &str) -> Result<Network> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    network_from_doc(&doc)
}

pub fn render_instance(net: &Network) -> String {
    serde_json::to_string_pretty(&doc_from_network(net)).expect("instance docs serialize")
}

pub fn load_instance<P: AsRef<Path>>(path: P) -> Result<Network> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text, &path.display().to_string())
}

pub fn save_instance<P: AsRef<Path>>(net: &Network, path: P) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_instance(net)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanDoc {
    pub roots: Vec<String>,
    pub ordering: Vec<String>,
    pub candidates: Vec<CandidateDecl>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateDecl {
    pub origin: String,
    pub target: String,
}

pub fn plan_from_doc(net: &Network, doc: &PlanDoc) -> Result<PivotPlan> {
    let (roots, ordering, candidates) = plan_parts_from_doc(net, doc)?;
    PivotPlan::from_parts(net, roots, ordering, candidates)
}

/// Resolves a plan document to variables without requiring the parts to
/// form a valid plan; used by the verify command to diagnose broken plans.
pub fn plan_parts_from_doc(
    net: &Network,
    doc: &PlanDoc,
) -> Result<(RootSet, Vec<Var>, BTreeMap<Var, Var>)> {
    let mut roots = Vec::new();
    for name in &doc.roots {
        roots.push(net.require_var(name)?);
    }
    let mut ordering = Vec::new();
    for name in &doc.ordering {
        ordering.push(net.require_var(name)?);
    }
    let mut candidates = BTreeMap::new();
    for c in &doc.candidates {
        let origin = net.require_var(&c.origin)?;
        let target = net.require_var(&c.target)?;
        if candidates.insert(target, origin).is_some() {
            return Err(Error::InvalidPlan(format!(
                "variable `{}` is the target of two candidates",
                c.target
            )));
        }
    }
    Ok((RootSet::from_vars(roots), ordering, candidates))
}

pub fn doc_from_plan(net: &Network, plan: &PivotPlan) -> PlanDoc {
    PlanDoc {
        roots: plan
            .roots()
            .members()
            .iter()
            .map(|v| net.name(*v).to_string())
            .collect(),
        ordering: plan
            .ordering()
            .iter()
            .map(|v| net.name(*v).to_string())
            .collect(),
        candidates: plan
            .candidates()
            .map(|(o, t)| CandidateDecl {
                origin: net.name(o).to_string(),
                target: net.name(t).to_string(),
            })
            .collect(),
    }
}

pub fn load_plan<P: AsRef<Path>>(net: &Network, path: P) -> Result<PivotPlan> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let doc: PlanDoc = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    plan_from_doc(net, &doc)
}

pub fn save_plan<P: AsRef<Path>>(net: &Network, plan: &PivotPlan, path: P) -> Result<()> {
    let path = path.as_ref();
    let text =
        serde_json::to_string_pretty(&doc_from_plan(net, plan)).expect("plan docs serialize");
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
