use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:.3e})")]
    NotHermitian(f64),
    #[error("Jacobi eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("spectrum has no nonzero eigenvalue")]
    AllZeroSpectrum,
    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("expected a {expected}-qubit state, got {got} qubits")]
    QubitCount { expected: usize, got: usize },
    #[error("parameter {value} is outside the valid range {range} of family {family}")]
    ParameterOutOfRange {
        family: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("vector norm is {0}, expected 1")]
    NotUnitVector(f64),
    #[error("observable spectrum lies outside [-1, 1]")]
    ObservableOutOfRange,
    #[error("CHSH expectation {0} exceeds 2*sqrt(2)")]
    ExpectationOutOfRange(f64),
    #[error("state has zero negativity")]
    ZeroNegativity,
    #[error("nonpositive denominator in the r cap")]
    NonPositiveDenominator,
    #[error("r = {r} is outside [0, {cap})")]
    ROutOfRange { r: f64, cap: f64 },
    #[error("operation requires the {expected} regime")]
    RegimeMismatch { expected: &'static str },
    #[error("parameter {0} must lie in (0, 1]")]
    InvalidOperatorParameter(&'static str),
    #[error("singular quantity: {0}")]
    Singular(&'static str),
    #[error("product spectrum is not real (residual {0:.3e})")]
    ComplexSpectrum(f64),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
