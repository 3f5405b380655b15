use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),
    #[error("gate is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("duplicate qubit label '{0}'")]
    DuplicateLabel(char),
    #[error("unknown qubit label '{0}'")]
    UnknownLabel(char),
    #[error("partial trace must keep at least one qubit")]
    EmptyKeepSet,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid bitstring '{0}'")]
    InvalidBits(String),
    #[error("{name} = {value} is outside {range}")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("{0}")]
    Domain(String),
    #[error("basis is not orthonormal (max deviation {0:e})")]
    BasisNotOrthonormal(f64),
    #[error("clone states are not orthonormal (max deviation {0:e})")]
    InputsNotOrthonormal(f64),
    #[error("sigma is singular after regularization (min eigenvalue {0:e})")]
    SingularSigma(f64),
    #[error("no-signaling audit failed for {party}: max deviation from I/2 is {deviation:e}")]
    AuditFailure {
        party: &'static str,
        deviation: f64,
        matrix: Vec<[f64; 2]>,
    },
    #[error("transcript: {0}")]
    Transcript(String),
    #[error("parse error: {0}")]
    Parse(String),
}
