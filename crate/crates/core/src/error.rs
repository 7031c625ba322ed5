use thiserror::Error;

use crate::notation::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero has no valuation")]
    ZeroValuation,
    #[error("residue {0} is even, expected an odd unit")]
    EvenResidue(u8),
    #[error("degenerate form")]
    Degenerate,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix must have positive dimension and {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("block is not unimodular: {0}")]
    NotUnimodular(String),
    #[error("illegal symbol: {0}")]
    IllegalSymbol(String),
    #[error("illegal sign walk: {0}")]
    IllegalSignWalk(String),
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("illegal oddity fusion: {0}")]
    IllegalFusion(String),
    #[error("term index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("precision must be between 1 and 62, got {0}")]
    Precision(u32),
    #[error("entry is not a 2-adic integer: {0}")]
    NotIntegral(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("malformed record: {0}")]
    Record(String),
}
