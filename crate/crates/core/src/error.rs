use thiserror::Error;

/// Errors raised by the physics layer (element transport, packet catalog,
/// source calculators). Lattice-file syntax problems use
/// [`crate::lattice::ParseError`] instead so that line/column information
/// survives.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("unknown species `{0}` (built-ins: electron, proton, hminus)")]
    UnknownSpecies(String),

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumbers(String),

    #[error("operation `{op}` does not apply to packet family {family}")]
    UnsupportedFamily {
        op: &'static str,
        family: &'static str,
    },

    #[error("nonphysical input: {0}")]
    NonPhysical(String),

    #[error("degenerate phase space: {0}")]
    Degenerate(String),

    #[error("missing input: {0}")]
    MissingInput(&'static str),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("{0}")]
    OutOfScope(String),
}

pub type Result<T> = std::result::Result<T, Error>;
