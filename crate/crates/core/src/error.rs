use thiserror::Error;

/// Errors raised by constructors, validators and dispatchers in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix shape {rows}x{cols} does not hold {len} entries")]
    Shape { rows: usize, cols: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid subsystem dimensions {0:?}: need at least one subsystem, each of dimension >= 2")]
    InvalidDims(Vec<usize>),

    #[error("matrix is not Hermitian (max |A_rs - conj(A_sr)| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid subsystem selection {keep:?} for {n} subsystems")]
    Selection { keep: Vec<usize>, n: usize },

    #[error("basis index {flat} out of range for dimension {dim}")]
    BasisIndex { dim: usize, flat: usize },

    #[error("multi-index {index:?} out of range for dimensions {dims:?}")]
    MultiIndex { dims: Vec<usize>, index: Vec<usize> },

    #[error("flat index {flat} out of range (length {len})")]
    FlatIndex { flat: usize, len: usize },

    #[error("level pair ({i}, {j}) invalid for dimension {dim}")]
    LevelPair { dim: usize, i: usize, j: usize },

    #[error("imaginary residue {residue:e} exceeds tolerance")]
    ImaginaryResidue { residue: f64 },

    #[error("identity component is {found}, expected {expected}")]
    Normalization { expected: f64, found: f64 },

    #[error("vector norm is {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("operation needs a bipartite state, got {0} subsystems")]
    NotBipartite(usize),

    #[error("operation needs all subsystems to be qubits, got {0:?}")]
    NotAllQubits(Vec<usize>),

    #[error("factor {subsystem} is not unitary (defect {defect:e})")]
    NotUnitary { subsystem: usize, defect: f64 },

    #[error("Kraus operators of subsystem {subsystem} are not complete (defect {defect:e})")]
    Incomplete { subsystem: usize, defect: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("picture {picture} is not applicable: {reason}")]
    Picture { picture: &'static str, reason: String },
}

impl Error {
    /// True for errors that mean "this matrix is not a valid state".
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::InvalidDims(_)
                | Error::NotHermitian { .. }
                | Error::TraceNotOne { .. }
                | Error::NotPositive { .. }
                | Error::NotUnitary { .. }
                | Error::Incomplete { .. }
                | Error::Normalization { .. }
                | Error::ImaginaryResidue { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
