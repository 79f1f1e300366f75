use thiserror::Error;

/// Errors surfaced by samplers, statistics and the experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The request exceeds what the sampler can materialize.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// Evaluation point collides with a singularity of the field.
    #[error("singular evaluation: {0}")]
    Singular(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown experiment `{name}`; registry: {known}")]
    UnknownExperiment { name: String, known: String },
    #[error("malformed data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn capacity<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capacity(msg.into()))
}
