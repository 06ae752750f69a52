use thiserror::Error;

/// Errors raised across the analytic, simulation and reporting layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numeric failure in {context}: achieved error bound {achieved:e}")]
    NumericFailure { context: String, achieved: f64 },

    #[error("scale function step {step:e} too coarse: estimated error {estimated:e} above tolerance {tolerance:e}")]
    RefinementNeeded { step: f64, estimated: f64, tolerance: f64 },

    #[error("unsupported measure: {0}")]
    UnsupportedMeasure(String),

    #[error("not implemented: {what}; registered presets: {presets}")]
    NotImplemented { what: String, presets: String },

    #[error("precision failure: achieved standard error {achieved_se:e}, requested {requested:e}")]
    Precision { achieved_se: f64, requested: f64 },

    #[error("too few uncensored samples: {got} (need {need})")]
    TooFewSamples { got: usize, need: usize },

    #[error("horizon too short: censored fraction {fraction:.4} exceeds {limit:.4}")]
    HorizonTooShort { fraction: f64, limit: f64 },

    #[error("usage: {0}")]
    Usage(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code: 2 usage, 3 numeric or precision failure, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Usage(_) | Error::InvalidInput(_) | Error::NotImplemented { .. } => 2,
            Error::NumericFailure { .. }
            | Error::RefinementNeeded { .. }
            | Error::Precision { .. }
            | Error::TooFewSamples { .. }
            | Error::HorizonTooShort { .. } => 3,
            _ => 1,
        }
    }
}
