use thiserror::Error;

use crate::graph::Colour;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid partition for colour {colour}: {reason}")]
    InvalidPartition { colour: Colour, reason: String },

    #[error("invalid irregular type: {0}")]
    InvalidIrregularType(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A leading block of the phi-chain is not invertible (1-based block index).
    #[error("not in the big cell: block {0} is not invertible")]
    NotInBigCell(usize),

    #[error("trailing block not invertible for colour {colour} at node {node}")]
    NotInvertible { colour: Colour, node: usize },

    /// Invertibility or rank fell inside the ambiguous tolerance band.
    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("ambiguous spectrum: {0}")]
    AmbiguousSpectrum(String),

    #[error("invalid marking: {0}")]
    InvalidMarking(String),

    #[error("empty conjugacy class: {0}")]
    EmptyClass(String),

    #[error("point is not reduced: moment residual {0:e}")]
    NotReduced(f64),

    #[error("reflection at node {node} rejected: parameter equals 1")]
    ReflectionRejected { node: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("counterexample: {0}")]
    Counterexample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
