use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised while building, analyzing or solving a network.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("constraint scope uses variable `{0}` twice")]
    SelfScope(String),

    #[error("duplicate constraint between `{0}` and `{1}`")]
    DuplicateConstraint(String, String),

    #[error("value `{value}` is not in the domain of `{variable}`")]
    ValueNotInDomain { variable: String, value: String },

    #[error("no constraint between `{0}` and `{1}`")]
    MissingConstraint(String, String),

    #[error("relation is not functional from `{0}` to `{1}`")]
    NotFunctional(String, String),

    #[error("networks are defined over different variable sets")]
    VariableSetMismatch,

    #[error("{0} is not a subproblem of the base network")]
    NotSubproblem(&'static str),

    #[error("not a root set: unreachable variable(s) {}", .unreachable.join(", "))]
    NotRootSet { unreachable: Vec<String> },

    #[error("invalid pivot plan: {0}")]
    InvalidPlan(String),

    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),

    #[error("enumeration budget exceeded: search space ~{estimate:.2e} > budget {budget:.2e}")]
    EnumerationBudget { estimate: f64, budget: f64 },

    /// Raised when a backtrack-free extension meets a value without a pivot
    /// image; impossible on a properly filtered network, so it flags a bug
    /// or a tampered input rather than an unsatisfiable instance.
    #[error("pivot image missing while extending `{variable}` = `{value}` to `{target}`")]
    PivotImageMissing {
        variable: String,
        value: String,
        target: String,
    },

    #[error("failed to access `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("parse error in `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}
