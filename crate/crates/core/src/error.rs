use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("no admissible window: {0}")]
    NoAdmissibleWindow(String),

    #[error("cannot aggregate an empty interval")]
    EmptyInterval,

    #[error("degenerate class balance: {positives} positive and {negatives} negative samples")]
    DegenerateClasses { positives: usize, negatives: usize },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
