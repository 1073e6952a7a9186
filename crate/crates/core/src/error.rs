use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QecError {
    #[error("no parties given")]
    NoParties,
    #[error("party {party} has dimension 0")]
    ZeroDimension { party: usize },
    #[error("total dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("squared norm {norm} is outside the accepted tolerance around 1")]
    NotNormalized { norm: f64 },
    #[error("party {party} out of range for a {n}-party system")]
    PartyOutOfRange { party: usize, n: usize },
    #[error("subsystem must be non-empty")]
    EmptySubsystem,
    #[error("matrix is not Hermitian (max |M - M^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("trace {trace} differs from 1")]
    TraceNotOne { trace: f64 },
    #[error("eigenvalue {value:e} lies outside the clipping window")]
    EigenvalueOutOfRange { value: f64 },
    #[error("Hermitian eigensolver did not converge")]
    EigenFailure,
    #[error("inconsistent party grouping: {0}")]
    InvalidGrouping(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("degenerate spectrum: {0}")]
    Degenerate(String),
    #[error("vector is outside the cone: {0}")]
    OutsideCone(String),
}

pub type Result<T> = std::result::Result<T, QecError>;
