use thiserror::Error;

/// Errors raised by the geometry, operator, analytic and numerics layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate geometry: |R(x)| = {r:e} at x = {x}")]
    DegenerateGeometry { x: f64, r: f64 },
    #[error("gauge family requires a nonzero charge")]
    ChargeZero,
    #[error("Fermi velocity vanishes at x = {x} (|V_F| = {value:e})")]
    VelocityZero { x: f64, value: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("field family mismatch: expected {expected}, found {found}")]
    FamilyMismatch { expected: &'static str, found: &'static str },
    #[error("domain singularity near x = {x}")]
    DomainSingularity { x: f64 },
    #[error("non-terminating 2F1 requested at |s| = {modulus} >= 1")]
    DomainUnsupported { modulus: f64 },
    #[error("2F1 lower parameter c = {c} is a pole of the series")]
    PoleAtC { c: f64 },
    #[error("singular parameter combination: {0}")]
    SingularParameter(String),
    #[error("no root in bracket: {0}")]
    NoRootInBracket(String),
    #[error("potential is complex at x = {x} (Im V = {imag:e}); use residual checks instead")]
    ComplexPotential { x: f64, imag: f64 },
    #[error("iteration did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("shooting problem is not confining: {0}")]
    NotConfining(String),
    #[error("Simpson rule needs an odd number of samples, got {0}")]
    EvenSampleCount(usize),
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
