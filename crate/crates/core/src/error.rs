use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sector: {particles} particles on {qubits} qubits")]
    InvalidSector { qubits: usize, particles: usize },

    #[error("sector ({qubits}, {particles}) has dimension above the budget of {limit}")]
    DimensionOverflow {
        qubits: usize,
        particles: usize,
        limit: u128,
    },

    #[error("pattern has popcount {found}, sector expects {expected}")]
    WrongPopcount { expected: usize, found: usize },

    #[error("qubit index {index} out of range for {qubits} qubits")]
    QubitOutOfRange { index: usize, qubits: usize },

    #[error("qubit pair ({0}, {0}) is not a pair")]
    SameQubit(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("zero vector: {0}")]
    ZeroVector(&'static str),

    #[error("invalid coupling matrix: {0}")]
    InvalidCouplings(String),

    #[error("eigensolver did not converge for a {0}x{0} matrix")]
    NonConvergence(usize),

    #[error("singular normal matrix in least-squares fit")]
    SingularNormalMatrix,

    #[error("invalid fit input: {0}")]
    InvalidFitInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error stems from user-supplied parameters rather than a
    /// numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidSector { .. }
                | Error::DimensionOverflow { .. }
                | Error::QubitOutOfRange { .. }
                | Error::InvalidConfig(_)
                | Error::InvalidFitInput(_)
        )
    }
}
