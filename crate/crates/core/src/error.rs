use thiserror::Error;

/// Crate-wide error type. Message strings for validation failures are part of
/// the CLI contract and stay stable.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("point outside box")]
    PointOutsideBox,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("box overflow: cell count exceeds addressable size")]
    BoxOverflow,
    #[error("box too large: requires extents {required:?} ({cells} cells, cap {cap})")]
    BoxTooLarge {
        required: Vec<u64>,
        cells: u128,
        cap: u64,
    },
    #[error("p out of range")]
    POutOfRange,
    #[error("region degenerate")]
    RegionDegenerate,
    #[error("region too large")]
    RegionTooLarge,
    #[error("upper bound undefined: log p^-1 must exceed 1")]
    UpperUndefined,
    #[error("residue class count {q} exceeds cap {cap}")]
    TooManyResidues { q: u128, cap: u64 },
    #[error("operation requires a semigroup closure grid")]
    InvalidKind,
    #[error("embedding dimension requires certificate")]
    CertificateRequired,
    #[error("fewer than 5 fit points")]
    TooFewFitPoints,
    #[error("partition budget {budget} beyond table capacity {cap}")]
    BudgetTooLarge { budget: u64, cap: u64 },
    #[error("box does not cover the outer region")]
    BoxDoesNotCoverRegion,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable process exit code for the CLI: 2 = usage/validation, 3 = resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BoxTooLarge { .. }
            | Error::RegionTooLarge
            | Error::TooManyResidues { .. }
            | Error::BudgetTooLarge { .. } => 3,
            _ => 2,
        }
    }
}
