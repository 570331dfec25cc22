use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix of {rows}x{cols} exceeds the dimension cap {cap}")]
    DimensionCap { rows: usize, cols: usize, cap: usize },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max defect {defect:e})")]
    NonHermitian { defect: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is singular (condition number {condition:e})")]
    Singular { condition: f64 },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    BadIndex { index: usize, count: usize },

    #[error("invalid bipartition: {0}")]
    BadCut(String),

    #[error("wrong subsystem dimensions: expected {expected:?}, got {got:?}")]
    WrongDims { expected: Vec<usize>, got: Vec<usize> },

    #[error("{name} = {value} is outside its allowed range {range}")]
    Range {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("map is not completely positive (min Choi eigenvalue {min_choi_eigenvalue:e})")]
    NotCp { min_choi_eigenvalue: f64 },

    #[error("map is not invertible (condition number {condition:e})")]
    NonInvertible { condition: f64 },

    #[error("final time {t_f} precedes initial time {t_i}")]
    BadTimes { t_i: f64, t_f: f64 },

    #[error("search budget too small: {0}")]
    BudgetTooSmall(String),
}

pub type Result<T> = std::result::Result<T, Error>;
