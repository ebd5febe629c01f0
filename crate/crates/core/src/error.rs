use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse braid word: {0}")]
    Parse(String),

    #[error("invalid strand interval [{i}, {j}]")]
    InvalidInterval { i: usize, j: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("word is not homogeneous for the given sign pattern")]
    NotHomogeneous,

    #[error("budget of {budget} letters is below the required {need}")]
    Budget { budget: usize, need: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("search exceeded {0} visited words")]
    SearchBound(usize),

    #[error("template: {0}")]
    Template(String),

    #[error("unknown crossing {0}")]
    UnknownCrossing(usize),

    #[error("unknown component {0}")]
    UnknownComponent(usize),

    #[error("unknown circle {0}")]
    UnknownCircle(usize),

    #[error("segment does not border the outer face")]
    NotOuterSegment,

    #[error("diagram has {got} crossings, above the cap of {cap}")]
    CrossingCap { got: usize, cap: usize },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Errors caused by malformed or unsuitable input, as opposed to engine bugs.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Invariant(_) | Error::SearchBound(_))
    }
}
