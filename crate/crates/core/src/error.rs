use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("filter half-length m = {m} is too small (minimum {min})")]
    HalfLengthTooSmall { m: usize, min: usize },
    #[error("future reach q = {q} must be below m = {m} for an asymmetric filter")]
    FutureReachOutOfRange { m: usize, q: usize },
    #[error("bandwidth {bandwidth} must exceed m = {m}")]
    InadmissibleBandwidth { m: usize, bandwidth: f64 },
    #[error("truncation point {0} outside (-1, 1]")]
    TruncationOutOfRange(f64),
    #[error("I/C ratio must be positive, got {0}")]
    NonPositiveIcRatio(f64),
    #[error("singular {0}x{0} system")]
    SingularSystem(usize),
    #[error("frequency grid needs at least {min} points, got {got}")]
    GridTooCoarse { got: usize, min: usize },
    #[error("filters do not share half-length ({left} vs {right})")]
    HalfLengthMismatch { left: usize, right: usize },
    #[error("reference filter must be symmetric (q = m)")]
    ReferenceNotSymmetric,
    #[error("no published bandwidth table for m = {m} and criterion {criterion}")]
    NoBuiltinTable { m: usize, criterion: &'static str },
    #[error("objective is flat across the search bracket for q = {q}")]
    FlatObjective { q: usize },
    #[error("series of length {len} is too short (need at least {min})")]
    SeriesTooShort { len: usize, min: usize },
    #[error("series contains a non-finite value at index {0}")]
    NonFiniteValue(usize),
    #[error("series trend has no variation; I/C ratio is undefined")]
    DegenerateRatio,
    #[error("sequences have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("index {index} is not a turning point of the final trend")]
    NotATurningPoint { index: usize },
    #[error("index {index} out of range for series of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
}
