use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration at `{field}`: {reason}")]
    ConfigInvalid { field: String, reason: String },

    #[error("degenerate detuning: |{which}| = {value:.3e} Hz is below the 1 kHz floor")]
    DegenerateDetuning { which: &'static str, value: f64 },

    #[error("frame error: {0}")]
    Frame(String),

    #[error("step size {step:.3e} s resolves only {cycles:.3} cycles per step (limit 0.05)")]
    StepTooLarge { step: f64, cycles: f64 },

    #[error("rotation fit degenerate: trajectory variance {variance:.2e} on every axis")]
    FitDegenerate { variance: f64 },

    #[error("calibration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("cancellation has not converged; classical cross-talk cannot be extracted")]
    NotConverged,

    #[error("{parameter} sweep: crossing {value:.4e} outside swept range [{lo:.4e}, {hi:.4e}]")]
    CrossingOutOfRange {
        parameter: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("process reconstruction is ill-conditioned")]
    ReconstructionIllConditioned,

    #[error("randomized benchmarking fit failed: {0}")]
    FitFailure(String),

    #[error("reference decay p_ref = {0:.3e} too small for interleaved estimate")]
    DivisionDegenerate(f64),

    #[error("stage `{stage}` failed: {source}")]
    StageFailed {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::ConfigInvalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
