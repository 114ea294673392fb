use std::io;

/// Every failure the library can report.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid exponent {0}: must be positive")]
    InvalidExponent(f64),
    #[error("degree {degree} exceeds cap {cap}")]
    CapExceeded { degree: usize, cap: usize },
    #[error("bad magic")]
    BadMagic,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("shift too large: |eps| = {eps} must stay below K/2 = {limit}")]
    ShiftTooLarge { eps: f64, limit: f64 },
    #[error("epsilon must be nonzero")]
    ZeroEpsilon,
    #[error("grid too large for direct summation: M = {0} > 64 (pass the size override)")]
    GridTooLarge(usize),
    #[error("w-resolution {n_w} is below 2K = {min}: the lattice sum would alias")]
    Aliasing { n_w: usize, min: usize },
    #[error("resolution mismatch: {0}")]
    ResolutionMismatch(String),
    #[error("window has (near-)zero Zak transform: not an exact frame (min |G| = {min_abs:e}, guard = {guard:e})")]
    NotAFrame { min_abs: f64, guard: f64 },
    #[error("loop passes too near a zero (|G| = {0:e})")]
    NearZero(f64),
    #[error("phase step too large after max refinement ({0:.3} rad)")]
    PhaseStep(f64),
    #[error("incommensurate {what}: {value} is not a multiple of the grid step {step}")]
    Incommensurate {
        what: &'static str,
        value: f64,
        step: f64,
    },
    #[error("range violation: {0}")]
    Range(String),
    #[error("margin violation: {0}")]
    Margin(String),
    #[error("truncation K = {k} too small: needs K >= {needed}")]
    TruncationTooSmall { k: usize, needed: usize },
    #[error("plateau rule violates the constraints at k = {0}")]
    Constraint(usize),
    #[error("levels must be strictly increasing")]
    NonMonotoneLevels,
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("insufficient point coverage: {0}")]
    Coverage(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
