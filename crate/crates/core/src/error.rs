use thiserror::Error;

/// Errors raised by the plausibility engine, the closed-form constructions,
/// the regression baseline and the simulation harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConformalError {
    #[error("feature dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sample must contain at least one point")]
    EmptySample,

    #[error("non-finite value in {0}")]
    NonFiniteInput(&'static str),

    #[error("measure `{measure}` produced a non-finite score for point {index}")]
    NonFiniteScore { measure: String, index: usize },

    #[error("measure `{measure}` evaluated outside its domain: {detail}")]
    OutsideDomain { measure: String, detail: String },

    #[error("measure `{measure}` does not accept {setting} data")]
    UnsupportedSetting {
        measure: String,
        setting: &'static str,
    },

    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),

    #[error("region reaches the scan window edge near {edge}; widen the window")]
    WindowTooSmall { edge: f64 },

    #[error("invalid scan specification: {0}")]
    InvalidScan(String),

    #[error("eta = {eta} is below the admissible minimum {minimum}")]
    EtaBelowBound { eta: f64, minimum: f64 },

    #[error("kappa must be nonzero for the bounded unsupervised interval")]
    ZeroKappa,

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("{observations} observations cannot support {parameters} fitted coefficients")]
    TooFewObservations {
        observations: usize,
        parameters: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("replication {index} failed: {source}")]
    Replication {
        index: u64,
        #[source]
        source: Box<ConformalError>,
    },
}

pub type Result<T, E = ConformalError> = std::result::Result<T, E>;
