use alloc::string::String;
use core::fmt;

/// Everything that can go wrong short of a programming error. Contract
/// violations inside the solvers (broken invariants, blown work bounds)
/// panic instead; they are bugs, not conditions a caller should handle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Graph text was malformed; `line` is 1-based.
    Parse { line: usize, msg: String },
    /// An operation requiring pairwise distinct weights saw this one twice.
    DuplicateWeight { weight: i64 },
    /// Directed graph passed to an undirected routine or vice versa.
    Orientation { expected: &'static str },
    /// A lifted result referenced a synthetic weight the reduction never made.
    UnknownSyntheticWeight { weight: i64 },
    /// Index outside a dynamic string. `len` is the string length.
    Position { pos: usize, len: usize },
    /// Mismatch search requires equally long strings.
    LengthMismatch { left: usize, right: usize },
    /// A request that cannot be satisfied (e.g. more simple edges than pairs).
    Invalid { msg: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { line, msg } => write!(f, "parse error on line {line}: {msg}"),
            Error::DuplicateWeight { weight } => {
                write!(f, "weight {weight} occurs more than once")
            }
            Error::Orientation { expected } => write!(f, "graph must be {expected}"),
            Error::UnknownSyntheticWeight { weight } => {
                write!(f, "no original weight behind synthetic weight {weight}")
            }
            Error::Position { pos, len } => {
                write!(f, "position {pos} out of range for string of length {len}")
            }
            Error::LengthMismatch { left, right } => {
                write!(f, "string lengths differ: {left} vs {right}")
            }
            Error::Invalid { msg } => f.write_str(msg),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
