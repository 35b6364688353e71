//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad class of a failure, used by callers (the CLI in particular) to map
/// errors onto exit codes: input problems versus violated statistical
/// preconditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    InvalidInput,
    StatisticalPrecondition,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {value} is outside [0, 1]")]
    ProbabilityOutOfRange { value: String },

    #[error("tolerance must be nonnegative, got {value}")]
    NegativeTolerance { value: String },

    #[error("significance level must lie strictly between 0 and 1, got {value}")]
    InvalidLevel { value: String },

    #[error("grid step must lie in (0, 1], got {value}")]
    InvalidGridStep { value: String },

    #[error("joint outcomes are only defined for three-player models; the two experiments of a two-player test are not correlated")]
    JointOutcomeUndefined,

    #[error("human correct-identification probability is zero; the humanness ratio is undefined")]
    DegenerateHumanBaseline,

    #[error("inverted bounds: {lo} > {hi}")]
    InvertedBounds { lo: String, hi: String },

    #[error("humanness threshold must be positive, got {value}")]
    NonpositiveThreshold { value: String },

    #[error("denominator must be positive, got {value}")]
    ZeroDenominator { value: String },

    #[error("observation requires n >= 1 and k <= n, got n={n}, k={k}")]
    InvalidObservation { n: u64, k: u64 },

    #[error("simulation config: {message}")]
    InvalidSimulationConfig { message: String },

    #[error("dataset contains no trials")]
    EmptyDataset,

    #[error("dataset has no {kind} sessions")]
    MissingRespondentKind { kind: String },

    #[error("line {line}: {message}")]
    ParseLine { line: usize, message: String },

    #[error("invalid number {input:?}: {message}")]
    ParseNumber { input: String, message: String },

    #[error("trial {trial_id:?}: {message}")]
    InvalidTrial { trial_id: String, message: String },

    #[error("duplicate trial id {trial_id:?}")]
    DuplicateTrialId { trial_id: String },

    #[error("dataset mixes test formats: found both {first} and {second}")]
    MixedFormats { first: String, second: String },

    #[error("expected a {expected} dataset, found {found}")]
    FormatHintMismatch { expected: String, found: String },

    #[error("{stage}: {source}")]
    Pipeline {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Tags an error with the pipeline stage it came from.
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Pipeline {
            stage,
            source: Box::new(self),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::ProbabilityOutOfRange { .. }
            | Error::NegativeTolerance { .. }
            | Error::InvalidLevel { .. }
            | Error::InvalidGridStep { .. }
            | Error::JointOutcomeUndefined
            | Error::DegenerateHumanBaseline
            | Error::InvertedBounds { .. }
            | Error::NonpositiveThreshold { .. }
            | Error::ZeroDenominator { .. }
            | Error::InvalidObservation { .. }
            | Error::InvalidSimulationConfig { .. }
            | Error::MissingRespondentKind { .. } => ErrorClass::StatisticalPrecondition,
            Error::EmptyDataset
            | Error::ParseLine { .. }
            | Error::ParseNumber { .. }
            | Error::InvalidTrial { .. }
            | Error::DuplicateTrialId { .. }
            | Error::MixedFormats { .. }
            | Error::FormatHintMismatch { .. }
            | Error::Io(_) => ErrorClass::InvalidInput,
            Error::Pipeline { source, .. } => source.class(),
        }
    }
}
