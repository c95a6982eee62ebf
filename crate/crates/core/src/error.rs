use thiserror::Error;

use crate::model::VarId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("unknown value `{value}` for variable `{variable}`")]
    UnknownValue { variable: String, value: String },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("cpt of `{child}` row {row} sums to {sum}, expected 1")]
    RowSum { child: String, row: usize, sum: f64 },

    #[error("cpt of `{child}` has entry {value} outside [0, 1]")]
    EntryRange { child: String, value: f64 },

    #[error("network contains a directed cycle through `{0}`")]
    Cycle(String),

    #[error("invalid instantiation: {0}")]
    InvalidInstantiation(String),

    #[error("network has {states} joint states, enumeration limit is {limit}")]
    EnumerationGuard { states: u128, limit: u128 },

    #[error("structural error: {0}")]
    Structural(String),

    #[error("variable {child} is not a child of {parent}")]
    NotAChild { parent: VarId, child: VarId },

    #[error("variable {parent} is not a parent of {child}")]
    NotAParent { parent: VarId, child: VarId },

    #[error("abstraction is inconsistent: every value of `{0}` is impossible")]
    AbstractionInconsistent(String),

    #[error("epsilon {0} outside [0, 1)")]
    InvalidEpsilon(f64),

    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),

    #[error("cyclic message dependency at {0}")]
    CyclicDependency(String),
}

impl Error {
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            Error::Structural(_) | Error::NotAChild { .. } | Error::NotAParent { .. } | Error::CyclicDependency(_)
        )
    }
}
