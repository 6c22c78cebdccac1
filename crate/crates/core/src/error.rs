use core::fmt;

/// Errors produced by the partitioning, resampling and filtering routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A weight vector with no entries.
    EmptyWeights,
    /// A weight that is NaN or infinite.
    NonFiniteWeight { index: usize, value: f64 },
    /// A weight below zero.
    NegativeWeight { index: usize, value: f64 },
    /// Weights whose sum is further than the tolerance from one.
    WeightSum { sum: f64, tolerance: f64 },
    /// The number of units to distribute was zero.
    ZeroTotal,
    /// Two sequences that must be the same length were not.
    LengthMismatch { expected: usize, found: usize },
    /// Exhaustive enumeration would visit more compositions than allowed.
    SearchSpaceTooLarge { compositions: u128, limit: u128 },
    /// A model or benchmark parameter outside its valid range.
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// Every particle weight vanished after the likelihood update.
    ParticleCollapse { step: u32 },
    /// A particle collapse inside a Monte Carlo run.
    RunCollapse { run: usize, step: u32 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyWeights => write!(f, "weight vector is empty"),
            Error::NonFiniteWeight { index, value } => {
                write!(f, "weight at index {index} is not finite ({value})")
            }
            Error::NegativeWeight { index, value } => {
                write!(f, "weight at index {index} is negative ({value})")
            }
            Error::WeightSum { sum, tolerance } => write!(
                f,
                "weights sum to {sum}, which is not within {tolerance:e} of 1"
            ),
            Error::ZeroTotal => write!(f, "number of units must be at least 1"),
            Error::LengthMismatch { expected, found } => {
                write!(
                    f,
                    "length mismatch: expected {expected} entries, found {found}"
                )
            }
            Error::SearchSpaceTooLarge {
                compositions,
                limit,
            } => write!(
                f,
                "exhaustive search would enumerate {compositions} compositions (limit {limit}); \
                 shrink the number of units or bins"
            ),
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::ParticleCollapse { step } => {
                write!(
                    f,
                    "particle set collapsed at step {step}: all weights are zero"
                )
            }
            Error::RunCollapse { run, step } => write!(
                f,
                "particle set collapsed in run {run} at step {step}: all weights are zero"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
