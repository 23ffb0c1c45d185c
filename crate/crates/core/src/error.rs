use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("total dimension {requested} exceeds the configured maximum {limit}")]
    DimensionOverflow { requested: usize, limit: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigendecomposition did not converge")]
    NoConvergence,

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystems(String),

    #[error("index {index} out of range for {len} entries")]
    OutOfRange { index: usize, len: usize },

    #[error("truncation inadequate: {0}")]
    TruncationInadequate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid coupling graph: {0}")]
    InvalidGraph(String),

    #[error("inconsistent layout: {0}")]
    InconsistentLayout(String),

    #[error("target detuning is not uniform across target qubits: {0}")]
    NonUniformDetuning(String),

    #[error("no real coupling nulls the local field (discriminant {discriminant:e})")]
    NoRealRoot { discriminant: f64 },

    #[error(
        "parameter hierarchy violated: |Delta|/max|J| = {detuning_ratio:.3} (need >= {r1}), \
         min|J|/|g| = {coupling_ratio:.3} (need >= {r2})"
    )]
    HierarchyViolation {
        detuning_ratio: f64,
        coupling_ratio: f64,
        r1: f64,
        r2: f64,
    },

    #[error("time grids differ: {0}")]
    GridMismatch(String),

    #[error("expected a real result, imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
