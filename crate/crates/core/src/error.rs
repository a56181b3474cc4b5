use thiserror::Error;

use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("rational function has a pole at the origin")]
    PoleAtOrigin,
    #[error("rational function is not a function of psi^-{k}")]
    NotInvariantUnderMuK { k: u32 },
    #[error("polynomial is not weighted homogeneous")]
    NotHomogeneous,
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("normal form of the numerator is not proportional to the reference normal form (pole order {pole_order})")]
    NonProportionalNormalForm { pole_order: u32 },
    #[error("degree bookkeeping violated: expected weighted degree {expected}, found {found}")]
    InternalDegreeError { expected: u32, found: u32 },
    #[error("operator is not maximally unipotent at z = 0 (B_{index}(0) = {value})")]
    NotMaximallyUnipotent { index: usize, value: Rational },
    #[error("unsupported singularity structure: {0}")]
    UnsupportedSingularityStructure(String),
    #[error("series has zero constant term and is not invertible")]
    NotAUnit,
    #[error("bad constant term for {0}")]
    BadConstantTerm(&'static str),
    #[error("system has no regular solution normalized at e1")]
    NoRegularSolution,
    #[error("inhomogeneous system is inconsistent at order {0}")]
    NoSolution(usize),
    #[error("series order exhausted: coefficient {requested} requested, valid through {valid}")]
    OrderExhausted { requested: usize, valid: usize },
    #[error("non-integral instanton number n_{index} = {value}")]
    NonIntegralInstanton { index: usize, value: Rational },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::PoleAtOrigin => "PoleAtOrigin",
            Error::NotInvariantUnderMuK { .. } => "NotInvariantUnderMuK",
            Error::NotHomogeneous => "NotHomogeneous",
            Error::InvalidFamily(_) => "InvalidFamily",
            Error::NonProportionalNormalForm { .. } => "NonProportionalNormalForm",
            Error::InternalDegreeError { .. } => "InternalDegreeError",
            Error::NotMaximallyUnipotent { .. } => "NotMaximallyUnipotent",
            Error::UnsupportedSingularityStructure(_) => "UnsupportedSingularityStructure",
            Error::NotAUnit => "NotAUnit",
            Error::BadConstantTerm(_) => "BadConstantTerm",
            Error::NoRegularSolution => "NoRegularSolution",
            Error::NoSolution(_) => "NoSolution",
            Error::OrderExhausted { .. } => "OrderExhausted",
            Error::NonIntegralInstanton { .. } => "NonIntegralInstanton",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
