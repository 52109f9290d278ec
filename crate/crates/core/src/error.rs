use thiserror::Error;

use crate::modulus::ModulusResult;
use crate::sobolev::{CapacityResult, GradientResult};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("vertex index {0} out of range")]
    VertexIndex(usize),

    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),

    #[error("duplicate edge `{0}`-`{1}`")]
    DuplicateEdge(String, String),

    #[error("self-loop at `{0}`")]
    SelfLoop(String),

    #[error("edge `{u}`-`{v}` has non-positive or non-finite length {len}")]
    EdgeLength { u: String, v: String, len: f64 },

    #[error("vertex `{id}` has non-positive or non-finite measure {m}")]
    VertexMeasure { id: String, m: f64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },

    #[error("solver did not reach the requested gap")]
    NotConverged(Box<Unconverged>),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Best iterate of a solve that stopped before its duality gap met the tolerance.
#[derive(Debug, Clone, serde::Serialize)]
#[serde(untagged)]
pub enum Unconverged {
    Modulus(ModulusResult),
    Gradient(GradientResult),
    Capacity(CapacityResult),
}

impl Unconverged {
    pub fn gap(&self) -> f64 {
        match self {
            Unconverged::Modulus(r) => r.gap,
            Unconverged::Gradient(r) => r.gap,
            Unconverged::Capacity(r) => r.gap,
        }
    }
}

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        field,
        reason: reason.into(),
    }
}
