use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix side {side} does not match subsystem dims {dims:?}")]
    DimsMismatch { side: usize, dims: Vec<usize> },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("operators have incompatible dims {0:?} and {1:?}")]
    IncompatibleDims(Vec<usize>, Vec<usize>),

    #[error("subsystem index {index} out of range for {n} subsystems")]
    SubsystemOutOfRange { index: usize, n: usize },

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("Pauli decomposition needs qubit subsystems, got dims {0:?}")]
    NotQubits(Vec<usize>),

    #[error("invalid Pauli string {0:?}")]
    InvalidPauliString(String),

    #[error("expected dims {expected:?}, got {got:?}")]
    WrongDims { expected: Vec<usize>, got: Vec<usize> },

    #[error("parameter {name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("reduced ordered process violates: {}", .0.join("; "))]
    InvalidReduced(Vec<String>),

    #[error("operator is not of the {0} ordered form")]
    NotOrdered(&'static str),

    #[error("Kraus operators for input x={x} are not complete (deviation {deviation:.3e})")]
    IncompleteKraus { x: usize, deviation: f64 },

    #[error("probability p({a},{b}|{x},{y}) = {value:.3e} is negative beyond tolerance")]
    NegativeProbability {
        a: usize,
        b: usize,
        x: usize,
        y: usize,
        value: f64,
    },

    #[error("outcome probabilities for x={x}, y={y} sum to {sum}")]
    NotNormalized { x: usize, y: usize, sum: f64 },

    #[error("input distribution is not normalized (sum {0})")]
    BadDistribution(f64),

    #[error("operator is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("state has negative eigenvalue {0:.3e}")]
    NegativeEigenvalue(f64),

    #[error("eigenvalues of the final state do not match the probability table (deviation {0:.3e})")]
    SpectrumMismatch(f64),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid process matrix: {0}")]
    InvalidProcess(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
