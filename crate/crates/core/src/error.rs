use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("frequency {f} Hz outside the admissible range {range}")]
    FrequencyOutOfRange { f: f64, range: String },

    #[error("integration did not reach tolerance {tolerance:e}: estimate {estimate}, error {error_estimate:e} after {intervals} subintervals")]
    IntegrationFailed {
        estimate: f64,
        error_estimate: f64,
        tolerance: f64,
        intervals: usize,
    },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("normalized correlation component {value} exceeds unit magnitude at ({row}, {col})")]
    CorrelationOutOfRange { row: usize, col: usize, value: f64 },

    #[error("linear system is singular or indefinite after regularization")]
    SingularMatrix,

    #[error("sweep point N = {n} failed: {source}")]
    SweepPoint {
        n: usize,
        #[source]
        source: Box<Error>,
    },
}
