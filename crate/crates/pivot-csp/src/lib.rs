//! A binary constraint-satisfaction solver built around pivot consistency,
//! a directed local consistency for networks that contain functional
//! constraints.
//!
//! The solving pipeline has four phases:
//!
//! 1. **Structure** ([`structure`]): collect the functional subgraph,
//!    condense its strongly connected components, and take one
//!    representative per source component — a minimum *root set*. A single
//!    sweep then fixes one pivot-candidate arc per non-root variable and an
//!    assignment ordering prefixed by the roots.
//! 2. **Filtering** ([`filtering`]): make every candidate a pivot of the
//!    variables before it, suppressing relation pairs (and domain values)
//!    that cannot be extended through the candidate's functional image.
//!    This costs O((n² − r²)·d²) instead of the O(n³·d³) of path
//!    consistency since only one triangle per (earlier variable, target)
//!    pair is inspected.
//! 3. **Root search** ([`solver`]): enumerate consistent instantiations of
//!    the root variables by chronological backtracking over the filtered
//!    relations.
//! 4. **Extension** ([`solver`]): every consistent root instantiation
//!    extends to a full solution in exactly n − r backtrack-free steps, one
//!    functional image per remaining variable; the solution count equals
//!    the root instantiation count.
//!
//! Only some constraints need to be functional; the rest simply constrain
//! the root subproblem. Arc, path and directional path consistency are
//! included as reference filters, and [`generate`] produces seeded random
//! instances for comparisons against the brute-force oracle.
//!
//! ```
//! use pivot_csp::network::Network;
//! use pivot_csp::solver::{solve_decomposed, SolveMode};
//! use pivot_csp::structure::TieBreak;
//!
//! let net = Network::builder()
//!     .variable("person", ["ana", "luk"])
//!     .variable("city", ["rome", "oslo"])
//!     .variable("tongue", ["it", "no"])
//!     .constraint(
//!         "person",
//!         "city",
//!         [("ana", "rome"), ("luk", "rome"), ("luk", "oslo")],
//!     )
//!     .constraint("city", "tongue", [("rome", "it"), ("oslo", "no")])
//!     .finish()?;
//!
//! // city -> tongue is functional, so only {person, city} needs search;
//! // each of the three consistent root assignments extends directly.
//! let report = solve_decomposed(&net, SolveMode::All, TieBreak::Lex)?;
//! assert_eq!(report.plan.r(), 2);
//! assert_eq!(report.solution_count, 3);
//! assert_eq!(report.extension_backtracks, 0);
//! # Ok::<(), pivot_csp::Error>(())
//! ```

mod bits;
pub mod compare;
pub mod error;
pub mod filtering;
pub mod generate;
pub mod instance;
pub mod network;
pub mod solver;
pub mod structure;
pub mod verify;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use network::{
    FunctionalDirections, Instantiation, Network, NetworkBuilder, NetworkStats, RelationView, Val,
    Var,
};
pub use structure::{PivotPlan, RootSet, TieBreak};
