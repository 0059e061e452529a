use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("state is not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("amplitude list of length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("unknown state preset `{0}`")]
    UnknownPreset(String),

    #[error("unknown observable `{0}`")]
    UnknownName(String),

    #[error("not a density operator: {0}")]
    NotDensityOperator(String),

    #[error("mixture weights sum to {sum}, expected 1")]
    WeightSumInvalid { sum: f64 },

    #[error("invalid subsystem selection {indices:?} for a {qubits}-qubit system")]
    InvalidSubsystem { indices: Vec<usize>, qubits: usize },

    #[error("projector set is not a complete orthogonal resolution of the identity: {0}")]
    IncompleteProjectorSet(String),

    #[error("observable is not dichotomic (max |O^2 - 1| = {deviation:e})")]
    DichotomyViolated { deviation: f64 },

    #[error("not a probability distribution: {0}")]
    NotADistribution(String),

    #[error("invalid correlation vector: {0}")]
    InvalidCorrelations(String),

    #[error("reconstructed matrix is not positive (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid bipartition {first:?} | {second:?} of a {qubits}-qubit system")]
    InvalidBipartition {
        first: Vec<usize>,
        second: Vec<usize>,
        qubits: usize,
    },

    #[error("invalid dimension {0}; must be at least 2")]
    InvalidDimension(u64),

    #[error("shot plan needs at least one shot per setting")]
    EmptyShotPlan,

    #[error("invalid Pauli word `{0}`")]
    InvalidPauliWord(String),
}
