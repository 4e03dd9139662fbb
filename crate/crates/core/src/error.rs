use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    /// The input shape violates a geometric precondition.
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("degenerate geodesic arc: endpoints coincide")]
    DegenerateArc,
    #[error("solver error: {0}")]
    Solver(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
