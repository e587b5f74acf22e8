use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("zero detuning: the primary scaling is singular, use the alternative scaling")]
    ZeroDetuning,
    #[error("no off-origin wells for these parameters")]
    NoWells,
    #[error("degenerate well: {0}")]
    DegenerateWell(String),
    #[error("value out of the valid range: {0}")]
    OutOfRange(String),
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("period detection failed at g = {0}")]
    Period(f64),
    #[error("eigensolver failure: {0}")]
    Eigen(String),
    #[error("ambiguous Wannier sign choice at level {0}")]
    WannierSign(usize),
    #[error("reducible rate matrix: {0}")]
    Reducible(String),
    #[error("missing R' segment: {0}")]
    MissingSegment(String),
    #[error("step size guard violated: {0}")]
    StepSize(String),
    #[error("no metastable state: {0}")]
    NoMetastableState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
