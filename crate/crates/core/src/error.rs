use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max |H - H^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("zero-norm input")]
    ZeroNorm,

    #[error("parameter `{name}` = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid qubit selection: {0}")]
    Qubits(String),

    #[error("pulse program: {0}")]
    Program(String),

    #[error("rank-deficient tomography set: rank {rank} < {needed}; unobserved directions: {missing}")]
    RankDeficient {
        rank: usize,
        needed: usize,
        missing: String,
    },

    #[error("degenerate marginal spectrum (gap {gap:.3e} below {tol:.1e}); generalized GHZ states cannot be recovered from two-party marginals")]
    Degenerate { gap: f64, tol: f64 },

    #[error("marginals inconsistent with a common pure state (spectra differ by {diff:.3})")]
    Inconsistent { diff: f64 },

    #[error("relative Schmidt phase is indeterminate (cross block norm {norm:.3e})")]
    PhaseIndeterminate { norm: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
