use thiserror::Error;

/// Errors produced by circuit parsing, network construction and the
/// fidelity algorithms.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("gate `{name}` expects {expected} parameter(s), got {got}")]
    GateParams {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("gate `{name}` acts on {expected} qubit(s), got {got}")]
    GateArity {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("qubit index {qubit} out of range for a {num_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("qubit {0} listed more than once in a single instruction")]
    DuplicateQubit(usize),

    #[error("unknown noise channel `{0}`")]
    UnknownChannel(String),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("instruction position {position} out of range for {len} instructions")]
    PositionOutOfRange { position: usize, len: usize },

    #[error("circuit must have at least one qubit")]
    NoQubits,

    #[error("operation requires an ideal (noise-free) circuit")]
    NoisyCircuit,

    #[error("matrix for `{0}` is not unitary")]
    NotUnitary(String),

    #[error("circuits act on different qubit counts: {0} vs {1}")]
    QubitCountMismatch(usize, usize),

    #[error("{total} Kraus terms exceed the per-term algorithm limit (2^31); use the collective algorithm")]
    TooManyTerms { total: u128 },

    #[error("a Kraus choice is required for each of the {expected} noise placements, got {got}")]
    KrausChoiceCount { expected: usize, got: usize },

    #[error("Kraus choice {choice} out of range for channel with {len} operators")]
    KrausChoiceRange { choice: usize, len: usize },

    #[error("index label `{0}` missing from the session's global order")]
    UnknownLabel(String),

    #[error("tensor has a nonempty index set; scalar value undefined")]
    NotScalar,

    #[error("oracle limit exceeded: {what} is {got}, limit {limit}")]
    OracleBound {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("oracle routes disagree: trace formula {trace_route} vs Choi route {choi_route}")]
    OracleDisagreement { trace_route: f64, choi_route: f64 },

    #[error("contracted scalar has residual imaginary part {imag} (|scalar| = {magnitude}); miter wiring bug")]
    ResidualImaginary { imag: f64, magnitude: f64 },

    #[error("bad noise specification: {0}")]
    NoiseSpec(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
