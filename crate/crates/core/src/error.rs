// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::geom::position::PositionReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("points are affinely dependent")]
    AffinelyDependent,

    #[error("projection index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },

    #[error("invalid projection index set: {0}")]
    InvalidIndexSet(String),

    #[error("general-position violation: {0}")]
    Degenerate(Box<PositionReport>),

    #[error("degenerate configuration: {0}")]
    DegenerateConfig(String),

    #[error("malformed dataset: {0}")]
    Malformed(String),

    #[error("probability {0} is outside (0, 1]")]
    ProbOutOfRange(String),

    #[error("location probabilities of an uncertain point sum to {0} > 1")]
    SumExceedsOne(String),

    #[error("unknown location id {0}")]
    UnknownId(usize),

    #[error("location {0} is both required present and required absent")]
    ConflictingScenario(usize),

    #[error("unsupported dimension {0} for this operation")]
    UnsupportedDimension(usize),

    #[error("size guard exceeded: {what} = {value} > {limit}")]
    GuardRail { what: &'static str, value: u64, limit: u64 },

    #[error("instance is not separable")]
    Inseparable,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dataset contains {0}; use the objects engine")]
    NotAPointDataset(&'static str),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
