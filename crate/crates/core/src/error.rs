use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A value lies outside the domain where an operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("grid is not square: axes differ")]
    NonSquareGrid,

    /// Too much of the two-photon amplitude sits next to the grid boundary.
    #[error("support truncated: {fraction:.3e} of the L2 mass lies within 2 samples of the grid edge")]
    SupportTruncated { fraction: f64 },

    #[error("root finder failed: {0}")]
    Solver(String),

    #[error("HOM dip not resolved: {0}")]
    UnresolvedDip(String),

    #[error("comb teeth not resolved: {0}")]
    UnresolvedTeeth(String),

    #[error("distribution has zero total mass")]
    ZeroMass,

    #[error("out of band: {0}")]
    OutOfBand(String),

    /// Mapped arrival times do not fit inside one trigger period.
    #[error("trigger period {period_ns} ns shorter than mapped span {span_ns} ns")]
    Wraparound { period_ns: f64, span_ns: f64 },

    #[error("operation requires a real amplitude")]
    ComplexAmplitude,

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures caused by insufficient numerical resolution
    /// (grid too coarse, scan too narrow, support cut off).
    pub fn is_resolution(&self) -> bool {
        matches!(self, Error::UnresolvedDip(_) | Error::UnresolvedTeeth(_) | Error::SupportTruncated { .. })
    }
}
