use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid moduli specification: {0}")]
    InvalidSpec(String),
    #[error("invalid descendent problem: {0}")]
    InvalidProblem(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Hodge kernel unsupported: genus {g}, lambda index {k}{context}")]
    HodgeUnsupported { g: u32, k: u32, context: String },
    #[error("invalid BC graph: {0}")]
    InvalidBc(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
