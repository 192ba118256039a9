use thiserror::Error;

use crate::model::{MemberId, NodeId};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown member {0}")]
    UnknownMember(MemberId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

impl ModelError {
    pub(crate) fn from_json(e: serde_json::Error) -> Self {
        ModelError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ActionError {
    #[error("action not applicable: {0}")]
    Inapplicable(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum VisualError {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("malformed graymap: {0}")]
    Pgm(String),
}
