use thiserror::Error;

/// Errors produced by the arithmetic, group-action and protocol layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("operands belong to different prime fields")]
    ModulusMismatch,
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("invalid prime modulus: {0}")]
    InvalidModulus(String),
    #[error("random source failure: {0}")]
    Rng(String),

    #[error("singular curve (A^2 = 4)")]
    SingularCurve,
    #[error("curve is not supersingular")]
    NotSupersingular,
    #[error("{ell} does not divide p + 1")]
    PrimeNotInCurveOrder { ell: u64 },
    #[error("no point of order {ell} found after {attempts} attempts")]
    PointSamplingExhausted { ell: u64, attempts: usize },
    #[error("kernel generator does not have order {ell}")]
    BadKernel { ell: u64 },

    #[error("exponent vector has length {got}, expected {expected}")]
    ExponentLength { expected: usize, got: usize },
    #[error("operation needs the toy isogeny backend")]
    BackendMismatch,
    #[error("orbit did not close within {0} steps")]
    OrbitTooLong(usize),
    #[error("orbit revisited an element before returning to the base at step {0}")]
    OrbitNotFree(usize),
    #[error("no generator of the full class group found (class number {class_number})")]
    NoGenerator { class_number: u64 },
    #[error("set element is not in the orbit of the base element")]
    ForeignElement,
    #[error("scalar out of range [0, N)")]
    ScalarOutOfRange,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("shape mismatch: expected {expected} components, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("query budget of {0} exhausted")]
    QueryBudgetExceeded(usize),
    #[error("oracle query not allowed in this phase: {0}")]
    PhaseViolation(&'static str),

    #[error("malformed encoding: {0}")]
    Encoding(String),
}

pub type Result<T> = std::result::Result<T, Error>;
