use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("cycle in parent relation through node {0}")]
    Cycle(NodeId),
    #[error("instance exceeds oracle capacity: {what} = {size} > {limit}")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
