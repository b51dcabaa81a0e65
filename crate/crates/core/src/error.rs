use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("negative part bound violated: sup of a_- is {neg_sup:.6e}, bound min_k |k - flux|^2 is {bound:.6e}")]
    NegativePartBound { neg_sup: f64, bound: f64 },
    #[error("resonant flux {0} is a half-integer; this check requires a non-resonant flux")]
    ResonantFlux(f64),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("under-resolved oscillation: {0}")]
    Resolution(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
