use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation risk: {0}")]
    TruncationRisk(String),

    #[error("conditioning probability {probability:e} is below 1e-12")]
    ZeroProbability { probability: f64 },

    #[error("not converged: drift {drift:e} exceeds tolerance {tolerance:e} between dims {dims:?}")]
    NotConverged {
        drift: f64,
        tolerance: f64,
        dims: (usize, usize),
    },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("coupling diverges at flux bias {flux_bias} (|cos| = {cos_abs:e}) for a symmetric SQUID")]
    SingularBias { flux_bias: f64, cos_abs: f64 },

    #[error("time step too large: dt * max rate = {product} >= 0.05")]
    StepTooLarge { product: f64 },

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("under-resolved: {0}")]
    UnderResolved(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
