use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit label {0} is outside 1..=4")]
    InvalidQubit(u8),

    #[error("no spin sector with projection {0} (expected -2..=2)")]
    InvalidSector(i32),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("step size underflow at t = {t:.6e} s (h = {h:.3e} s, error estimate {err:.3e})")]
    StepSizeUnderflow { t: f64, h: f64, err: f64 },

    #[error("step budget of {steps} exhausted at t = {t:.6e} s")]
    StepBudgetExhausted { steps: usize, t: f64 },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inverse capacitance entry ({0},{1}) is required but was not supplied")]
    MissingInverseCapacitance(usize, usize),

    #[error("capacitance matrix is singular or not positive definite")]
    SingularCapacitance,

    #[error("cannot parse quantity `{input}`: {reason}")]
    Quantity { input: String, reason: String },

    #[error("config: {0}")]
    Config(String),

    #[error("malformed trace CSV at line {line}: {reason}")]
    TraceFormat { line: usize, reason: String },

    #[error("plot: {0}")]
    Plot(String),

    #[error("scenario `{name}`: {source}")]
    Scenario {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_scenario(self, name: &str) -> Self {
        Error::Scenario {
            name: name.to_string(),
            source: Box::new(self),
        }
    }
}
