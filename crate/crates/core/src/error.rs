use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {dim} is below the minimum of {min}")]
    Dimension { dim: usize, min: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("qubit index {index} out of range for {qubits} qubits")]
    QubitIndex { index: usize, qubits: usize },
    #[error("gate uses qubit {index} more than once")]
    RepeatedQubit { index: usize },
    #[error("{qubits} qubits exceeds the realization cap of {cap}")]
    DimensionCap { qubits: usize, cap: usize },
    #[error("eigensolver did not converge for a {dim}x{dim} matrix")]
    EigenNoConvergence { dim: usize },
    #[error("eigenvalue modulus {modulus} deviates from 1; input is not unitary")]
    NotUnitary { modulus: f64 },
    #[error("matrix has residual {residual:e} against the group constraint")]
    GroupResidual { residual: f64 },
    #[error("matrix entry ({row}, {col}) has a nonzero imaginary part")]
    NotReal { row: usize, col: usize },
    #[error("orthogonal moment exponents must all be even, got ({0}, {1}, {2})")]
    OddMoment(u32, u32, u32),
    #[error("argument {value} outside the domain [{lower}, {upper}]")]
    Domain { value: f64, lower: f64, upper: f64 },
    #[error("histogram binnings differ")]
    BinningMismatch,
    #[error("histogram holds no samples")]
    EmptyHistogram,
    #[error("{got} samples supplied, at least {need} required")]
    TooFewSamples { got: usize, need: usize },
    #[error("{got} curve points inside the fit window, at least 2 required")]
    FitWindow { got: usize },
    #[error("failed to parse gate line {line}: {reason}")]
    GateParse { line: usize, reason: String },
}
