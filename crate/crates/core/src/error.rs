use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: expected {expected}, got {actual}")]
    QubitMismatch { expected: usize, actual: usize },

    #[error("qubit count {0} is outside the supported range 1..=64")]
    QubitCount(usize),

    #[error("refusing to build a dense {n_qubits}-qubit matrix (limit is {limit} qubits)")]
    DenseLimit { n_qubits: usize, limit: usize },

    #[error("index {index} out of range for {len} {what}")]
    IndexOutOfRange {
        index: usize,
        len: usize,
        what: &'static str,
    },

    #[error("coefficient is not finite: {0}")]
    NonFiniteCoefficient(String),

    #[error("cannot parse Pauli term `{0}`")]
    Parse(String),

    #[error("operator is not Hermitian: imaginary part {0:e} exceeds tolerance")]
    NonHermitian(f64),

    #[error("gate is not unitary: deviation {0:e}")]
    NonUnitary(f64),

    #[error("gate qubits must differ (got {0} twice)")]
    QubitClash(usize),

    #[error("state is not normalized: norm^2 = {0}")]
    NotNormalized(f64),

    #[error("parameter vector has length {actual}, ansatz expects {expected}")]
    ParameterCount { expected: usize, actual: usize },

    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),

    #[error("objective is not finite at gradient component {component}")]
    NonFiniteGradient { component: usize },

    #[error("objective is not finite at the starting point")]
    NonFiniteObjective,

    #[error("invalid optimizer options: {0}")]
    InvalidOptions(String),

    #[error("Hamiltonian does not conserve particle number (commutator norm {0:e})")]
    NotNumberConserving(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Invalid(String),
}
