use thiserror::Error;

/// Errors surfaced by matrix construction, map algebra and certificate checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix entries must be finite")]
    NonFiniteEntry,
    #[error("matrix is not Hermitian (max asymmetry {max_asymmetry:.3e})")]
    NotHermitian { max_asymmetry: f64 },
    #[error("invalid bipartite dimensions: {0}")]
    InvalidDims(String),
    #[error("invalid family parameters n={n}, k={k} (need n >= 3, 1 <= k <= n-1)")]
    InvalidFamily { n: usize, k: usize },
    #[error("probe vector has a zero entry at index {index}")]
    ZeroProbeEntry { index: usize },
    #[error("probe vector must be nonzero")]
    ZeroProbe,
    #[error("witness trace must be positive, got {trace:.6e}")]
    NonPositiveTrace { trace: f64 },
    #[error("operator is not an entanglement witness: {0}")]
    NotAWitness(String),
    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("separability certificate failed: reconstruction residual {residual:.3e}")]
    CertificateFailure { residual: f64 },
    #[error("decomposition construction mismatch: residual {residual:.3e}")]
    ConstructionMismatch { residual: f64 },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
