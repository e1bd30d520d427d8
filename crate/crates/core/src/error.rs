use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} is out of range for a universe of {universe} vertices")]
    VertexOutOfRange { vertex: usize, universe: usize },

    #[error("hypergraphs live on different universes ({left} vs {right} vertices)")]
    UniverseMismatch { left: usize, right: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown vertex name `{0}`")]
    UnknownVertex(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid matryoshka sequence: {0}")]
    InvalidSequence(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
