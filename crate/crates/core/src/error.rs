use thiserror::Error;

/// Errors raised by the exact and numeric layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime below 2^16")]
    NotPrime(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("every element of Z_2 is a square; no non-residue exists")]
    NoNonresidue,
    #[error("{d} is a quadratic residue mod {p}")]
    NotNonresidue { d: u32, p: u32 },
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("vectors are linearly dependent")]
    DependentVectors,
    #[error("matrix is singular mod {0}")]
    Singular(u32),
    #[error("subspace meets F0 or F1 nontrivially")]
    NotInS,
    #[error("matrix is not in SL2")]
    NotSL2,
    #[error("A_(i,j) requires j != 0")]
    ZeroJ,
    #[error("B_i requires i != 0")]
    ZeroI,
    #[error("recombination requires p = 1 (mod 4), got p = {0}")]
    WrongResidueClass(u32),
    #[error("subgroup search exhausted after {attempts} attempts at p = {p}")]
    SearchExhausted { p: u32, attempts: u64 },
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("subalgebra is not a MASA")]
    NotAMasa,
    #[error("subalgebra is not a factor")]
    NotAFactor,
    #[error("eigenvalue splitting stayed degenerate after {0} attempts")]
    DegenerateSplit(usize),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format_version {found:?}, expected \"1\"")]
    VersionMismatch { found: String },
    #[error("invalid file contents: {0}")]
    Format(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
