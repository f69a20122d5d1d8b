use thiserror::Error;

use crate::free_energy::FreeEnergyResult;
use crate::gibbs::KsEntropy;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generators {first} and {second} share a common factor in coordinate {coordinate}")]
    CoprimalityViolation {
        coordinate: usize,
        first: usize,
        second: usize,
    },
    #[error("generator {index} is the all-ones vector")]
    DegenerateGenerator { index: usize },
    #[error("generator {index} has a zero entry")]
    ZeroEntry { index: usize },
    #[error("generator {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("direction {direction} is outside 1..={dim}")]
    InvalidDirection { direction: usize, dim: usize },
    #[error(
        "direction {direction} does not order the semigroup: generator {generator} has entry 1 there"
    )]
    OrderAmbiguity { direction: usize, generator: usize },
    #[error("bias r={0} is outside (0,1)")]
    BiasOutOfRange(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("block must contain at least one spin")]
    EmptyBlock,
    #[error("spin value {0} is not +1 or -1")]
    InvalidSpin(i64),
    #[error("transfer-matrix eigenvector degenerates at beta={beta}, h={h}")]
    DegenerateEigenvector { beta: f64, h: f64 },
    #[error("tolerance {requested:e} not reached within the term cap (tail bound {achieved:e})")]
    ToleranceTooTight {
        requested: f64,
        achieved: f64,
        best_effort: Box<FreeEnergyResult>,
    },
    #[error("entropy tolerance {requested:e} not reached within the term cap (remainder {achieved:e}); pass a looser tolerance")]
    EntropyToleranceTooTight {
        requested: f64,
        achieved: f64,
        best_effort: KsEntropy,
    },
    #[error("no bracket for F'(eta)={x} in [{lo}, {hi}] (F' at ends: {slope_lo}, {slope_hi})")]
    BracketFailure {
        x: f64,
        lo: f64,
        hi: f64,
        slope_lo: f64,
        slope_hi: f64,
    },
    #[error("{sites} involved sites exceed the enumeration limit of {limit}")]
    TooLargeForEnumeration { sites: usize, limit: usize },
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the failure stems from user input rather than from a computation.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::CoprimalityViolation { .. }
                | Error::DegenerateGenerator { .. }
                | Error::ZeroEntry { .. }
                | Error::DimensionMismatch { .. }
                | Error::NoGenerators
                | Error::InvalidDirection { .. }
                | Error::OrderAmbiguity { .. }
                | Error::BiasOutOfRange(_)
                | Error::InvalidParameter(_)
                | Error::InvalidSpin(_)
                | Error::InvalidEvent(_)
                | Error::Config(_)
                | Error::Json(_)
        )
    }
}
