use thiserror::Error;

/// Crate-wide error type. The leading token of each message is stable and is
/// what the CLI prints on stderr before mapping to an exit code.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("InvalidBase: {0}")]
    InvalidBase(String),

    #[error("NonFinite: {0} is not a finite number")]
    NonFinite(&'static str),

    #[error("OutOfDomain: {what} = {value} lies outside [{lo}, {hi}]")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("DomainMismatch: domains end at {0} and {1}")]
    DomainMismatch(f64, f64),

    #[error("ZeroIntegral: integral {0} is not positive")]
    ZeroIntegral(f64),

    #[error("NotNormalized: integral {0} differs from 1")]
    NotNormalized(f64),

    #[error("BreakpointOverflow: {count} breakpoints exceed the cap {cap}")]
    BreakpointOverflow { count: usize, cap: usize },

    #[error("NoSolution: {0}")]
    NoSolution(String),

    #[error("NotStrict: base satisfies q0 + q1 = q0*q1; operation requires strict inequality")]
    NotStrict,

    #[error("NotFound: no full-return depth m <= {0}; retry with a larger bound")]
    NotFound(usize),

    #[error("BranchOverflow: enumeration exceeds {0} words")]
    BranchOverflow(usize),

    #[error("EmptyCylinder: word {0} has empty image")]
    EmptyCylinder(String),

    #[error("Unsupported: {0}")]
    Unsupported(&'static str),

    #[error("Parse: {0}")]
    Parse(String),

    #[error("Io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
