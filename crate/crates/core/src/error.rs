use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid device parameters: {0}")]
    InvalidParams(String),

    #[error("VTC solver did not converge at v_in = {v_in} V")]
    NumericalFailure { v_in: f64 },

    /// `lambda_n + lambda_p == 0`: the small-signal gain is unbounded.
    #[error("ideal device: lambda_n + lambda_p = 0, gain is unbounded")]
    IdealDevice,

    #[error("temperature {t_c} degC drives a threshold voltage out of model range")]
    OutOfModelRange { t_c: f64 },

    #[error("resolution must be >= 2")]
    DegenerateResolution,

    #[error("infeasible ladder: {0}")]
    InfeasibleLadder(String),

    #[error("invalid width grid: {0}")]
    InvalidGrid(String),

    #[error("candidate thresholds do not cover ladder rungs {uncovered:?}")]
    Coverage { uncovered: Vec<usize> },

    #[error("insufficient resolution: {needed} rungs but only {available} distinct candidate thresholds")]
    InsufficientResolution { needed: usize, available: usize },

    /// Thermometer code with a set bit above a cleared one.
    #[error("bubble in thermometer code at bit {index}")]
    Bubble { index: usize },

    #[error("bubble in thermometer code at bit {index} (sample {sample})")]
    BubbleAtSample { sample: usize, index: usize },

    #[error("invalid one-hot code: {set} bits set")]
    InvalidOneHot { set: usize },

    #[error("arity mismatch: expected {expected} inputs, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("invalid stimulus: {0}")]
    InvalidStimulus(String),

    #[error("invalid identifier `{0}`: must be non-empty alphanumeric or underscore")]
    InvalidIdentifier(String),

    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// True when the error stems from invalid user input rather than a
    /// failed computation.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NumericalFailure { .. }
                | Error::Coverage { .. }
                | Error::InsufficientResolution { .. }
                | Error::BubbleAtSample { .. }
                | Error::OutOfModelRange { .. }
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
