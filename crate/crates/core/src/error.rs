use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix or vector has non-finite entries")]
    NonFinite,

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("gauge fixing failed: pivot magnitude {0:e} is below 1e-10")]
    GaugeFixing(f64),

    #[error("spectrum is degenerate (gap {0:e}); an eigensolver frame is not unique")]
    DegenerateSpectrum(f64),

    #[error("theta = {0} is too close to a pole of the sphere chart")]
    PoleProximity(f64),

    #[error("epsilon = {0} is not close to any level crossing")]
    NotDegenerate(f64),

    #[error("paths do not share endpoints")]
    EndpointMismatch,

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("path file line {line}: {msg}")]
    PathParse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("time step T/n = {0} exceeds the stability bound 0.1")]
    StepStability(f64),

    #[error("holonomy is not unitary (residual {0:e})")]
    NonUnitary(f64),
}

impl Error {
    /// Errors caused by malformed input as opposed to numerical preconditions.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidPath(_) | Error::PathParse { .. } | Error::InvalidConfig(_)
        )
    }
}
