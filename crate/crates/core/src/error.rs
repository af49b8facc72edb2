use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no semiclassical root: {0}")]
    NoSemiclassicalRoot(String),
    #[error("invalid boost velocity {0}: |v| must be below 1")]
    InvalidVelocity(f64),
    #[error("malformed closure table: {0}")]
    MalformedTable(String),
    #[error("integration failure: {0}")]
    IntegrationFailure(String),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
