use thiserror::Error;

use crate::descriptor::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed expression or descriptor shape (dimension clashes, empty lists, ...).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("invariant unavailable: {0}")]
    InvariantUnavailable(String),

    #[error("descriptor failed validation: {}", summarize(.0))]
    Validation(Vec<Violation>),

    /// A hypothesis of a construction or classification rule could not be discharged.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("invalid site: {0}")]
    Site(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("not separable at this site: {0}")]
    NotSeparable(String),

    #[error("no construction known: {0}")]
    NoConstruction(String),

    #[error("out of scope: {0}")]
    Scope(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("inconsistent data: {0}")]
    Inconsistent(String),
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
