use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// [`Error::code`] gives the stable upper-case identifier printed by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset is empty (needs at least one instance, one view and one feature per view)")]
    EmptyDataset,
    #[error("psi = {psi} is too small; at least two samples are needed to define a radius")]
    PsiTooSmall { psi: usize },
    #[error("psi = {psi} exceeds the number of instances ({n})")]
    PsiExceedsN { psi: usize, n: usize },
    #[error("k = {k} exceeds psi = {psi}")]
    KExceedsPsi { k: usize, psi: usize },
    #[error("k must be at least 1")]
    KZero,
    #[error("ensemble size t must be at least 1")]
    EnsembleSizeZero,
    #[error("fewer than two sample points ({count}); radius is undefined")]
    FewerThanTwoSamples { count: usize },
    #[error("k = {k} exceeds the number of instances ({n})")]
    KExceedsN { k: usize, n: usize },
    #[error("model was fitted on a different dataset (expected {expected}, got {actual})")]
    FingerprintMismatch { expected: String, actual: String },
    #[error("inconsistent dataset: {0}")]
    InconsistentDataset(String),
    #[error("non-finite value in {location}")]
    NonFiniteValue { location: String },
    #[error("instance {index} out of range for dataset of {n} instances")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid generator configuration: {0}")]
    BadConfig(String),
    #[error("count {count} exceeds the {available} eligible instances")]
    CountExceedsN { count: usize, available: usize },
    #[error("{pairs} pairs need {needed} eligible instances but only {available} are available")]
    PairsExceedN {
        pairs: usize,
        needed: usize,
        available: usize,
    },
    #[error("class anomalies need at least two views")]
    SingleViewDataset,
    #[error("cannot split {features} features into {views} views")]
    TooFewFeatures { features: usize, views: usize },
    #[error("generator is degenerate: all probability mass sits at one point")]
    DegenerateGenerator,
    #[error("consistent-neighbor set of instance {index} is empty")]
    EmptyConsistentSet { index: usize },

    #[error("AUC needs at least one positive and one negative instance")]
    SingleClass,
    #[error("{0}")]
    Usage(String),

    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("row count mismatch: {} has {found} rows, expected {expected}", .path.display())]
    RowCountMismatch {
        path: PathBuf,
        expected: usize,
        found: usize,
    },
    #[error("parse error in {}:{line}: {message}", .path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("model file version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u32, found: String },
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyDataset => "EMPTY_DATASET",
            Error::PsiTooSmall { .. } => "PSI_TOO_SMALL",
            Error::PsiExceedsN { .. } => "PSI_EXCEEDS_N",
            Error::KExceedsPsi { .. } => "K_EXCEEDS_PSI",
            Error::KZero => "K_ZERO",
            Error::EnsembleSizeZero => "ENSEMBLE_SIZE_ZERO",
            Error::FewerThanTwoSamples { .. } => "FEWER_THAN_TWO_SAMPLES",
            Error::KExceedsN { .. } => "K_EXCEEDS_N",
            Error::FingerprintMismatch { .. } => "FINGERPRINT_MISMATCH",
            Error::InconsistentDataset(_) => "INCONSISTENT_DATASET",
            Error::NonFiniteValue { .. } => "NON_FINITE_VALUE",
            Error::IndexOutOfRange { .. } => "INDEX_OUT_OF_RANGE",
            Error::BadConfig(_) => "BAD_CONFIG",
            Error::CountExceedsN { .. } => "COUNT_EXCEEDS_N",
            Error::PairsExceedN { .. } => "PAIRS_EXCEED_N",
            Error::SingleViewDataset => "SINGLE_VIEW_DATASET",
            Error::TooFewFeatures { .. } => "TOO_FEW_FEATURES",
            Error::DegenerateGenerator => "DEGENERATE_GENERATOR",
            Error::EmptyConsistentSet { .. } => "EMPTY_CONSISTENT_SET",
            Error::SingleClass => "SINGLE_CLASS",
            Error::Usage(_) => "USAGE",
            Error::MissingFile(_) => "MISSING_FILE",
            Error::RowCountMismatch { .. } => "ROW_COUNT_MISMATCH",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::VersionMismatch { .. } => "VERSION_MISMATCH",
            Error::CorruptModel(_) => "CORRUPT_MODEL",
            Error::Io(_) => "IO_ERROR",
            Error::Invariant(_) => "INVARIANT_VIOLATION",
        }
    }

    /// Process exit status: 1 usage, 2 data, 3 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PsiTooSmall { .. }
            | Error::PsiExceedsN { .. }
            | Error::KExceedsPsi { .. }
            | Error::KZero
            | Error::EnsembleSizeZero
            | Error::KExceedsN { .. }
            | Error::BadConfig(_)
            | Error::Usage(_) => 1,
            Error::Invariant(_) => 3,
            _ => 2,
        }
    }
}
