use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid modulus {0}: {1}")]
    InvalidModulus(u64, &'static str),

    #[error("entry {value} at index {index} is not a residue modulo {p}")]
    ResidueOutOfRange { index: usize, value: u64, p: u64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("integer range too large: {0}")]
    RangeTooLarge(String),

    #[error("rejection sampling exhausted after {attempts} attempts ({stage})")]
    RetryExhausted { stage: String, attempts: u32 },

    #[error("fibre step {step}: {source}")]
    FibreStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("basis vectors are linearly dependent over F_p")]
    DependentBasis,

    #[error("matrix is singular over F_p")]
    SingularMatrix,

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("overflow: {0}")]
    Overflow(&'static str),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: entry {value} is not a residue modulo {p}")]
    Range { line: usize, value: u64, p: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
