use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("source and observation points coincide (separation {0:e})")]
    SelfInteraction(f64),

    #[error("eigendecomposition failed: {0}")]
    Diagonalization(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("antisymmetrized product of mode {0} with itself vanishes")]
    DegenerateAnsatz(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operand does not belong to this basis: {0}")]
    BasisMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("integration became unstable at t = {time}: {reason}")]
    Stability { time: f64, reason: String },

    #[error("shaped drive profile requires the single-excitation modes")]
    MissingModes,

    #[error("all dipole coherences vanish; no radiated field")]
    ZeroField,

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    /// Short machine-readable tag, used by the command-line error record.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Geometry(_) => "geometry",
            Error::SelfInteraction(_) => "self_interaction",
            Error::Diagonalization(_) => "diagonalization",
            Error::IndexOutOfRange(_) => "index_out_of_range",
            Error::Domain(_) => "domain",
            Error::DegenerateAnsatz(_) => "degenerate_ansatz",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::BasisMismatch(_) => "basis_mismatch",
            Error::Config(_) => "config",
            Error::Stability { .. } => "stability",
            Error::MissingModes => "missing_modes",
            Error::ZeroField => "zero_field",
            Error::Inconclusive(_) => "inconclusive",
            Error::Io { .. } => "io",
            Error::Serialization(_) => "serialization",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
