use std::path::PathBuf;

/// Errors shared across the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-positive activity duration {0} min; all four activities must be strictly positive")]
    NonPositiveComponent(f64),

    #[error("a week plan needs exactly 7 days, got {0}")]
    WeekLength(usize),

    #[error("unknown day structure `{0}` (expected one of STD, SPD, ASJD, SPWD, STWD, WWD)")]
    UnknownDayStructure(String),

    #[error("week mixture index {0} out of range 1..=6")]
    UnknownWeekMixture(u8),

    #[error("unknown outcome `{0}` (expected f1/bmi, f2/cognition, f3/life-satisfaction, f4/fitness)")]
    UnknownOutcome(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("objective subset must contain 2 to 4 distinct outcomes, got {0}")]
    ObjectiveSubset(usize),

    #[error("objective vectors have mismatched outcome subsets")]
    MismatchedObjectives,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("singular design matrix: {0}")]
    SingularDesign(String),

    #[error("failed to parse config: {0}")]
    ConfigParse(String),

    #[error("malformed input at {path}: {message}")]
    MalformedInput { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
