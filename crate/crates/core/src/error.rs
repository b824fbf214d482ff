use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("basis of {modes} modes with photon cap {cap} has {size} states, above the limit of {limit}")]
    BasisTooLarge {
        modes: usize,
        cap: usize,
        size: usize,
        limit: usize,
    },

    #[error("a basis needs at least one mode")]
    NoModes,

    #[error("mode sets overlap on mode {0}")]
    OverlappingModes(usize),

    #[error("mode {0} is not part of the basis")]
    UnknownMode(usize),

    #[error("duplicate mode {0} in mode list")]
    DuplicateMode(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("occupation {0:?} is not in the basis")]
    OccupationOutsideBasis(Vec<u32>),

    #[error("projector must be normalized, norm is {0}")]
    NotNormalized(f64),

    #[error("operands live on different bases")]
    BasisMismatch,

    #[error("mode transform must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("mode transform is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("mode transform amplifies: largest singular value {max_singular_value}")]
    NotContractive { max_singular_value: f64 },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("meter setting phi = 0 gives infinite gain and zero success probability")]
    InfiniteGain,

    #[error("truncation weight {weight:e} exceeds the bound {bound:e}")]
    TruncationExceeded { weight: f64, bound: f64 },

    #[error("fringe fit failed: {0}")]
    FitFailed(&'static str),

    #[error("expected count {0:e} is too large to sample")]
    CountOverflow(f64),

    #[error("serialization failed: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
