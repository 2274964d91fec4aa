use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("jet order exhausted: cannot differentiate a jet trusted only to order 0")]
    JetOrderExhausted,
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("inverse of a non-constant exact polynomial needs an explicit truncation order")]
    UnboundedInverse,
    #[error("degenerate metric: det g vanishes at the basepoint")]
    DegenerateMetric,
    #[error("metric is not Hermitian: {0}")]
    NonHermitianMetric(String),
    #[error("metric is not Kaehler: {0}")]
    NonKaehlerMetric(String),
    #[error("negative power of lambda: {0}")]
    NegativeLambdaPower(String),
    #[error("two-form is not closed: {0}")]
    NonClosedOmega(String),
    #[error("two-form is not of type (1,1): {0}")]
    NonTypeOneOne(String),
    #[error("two-form has a lambda^0 component; it must start at lambda^1")]
    OmegaMissingLambda,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("bundle error: {0}")]
    Bundle(String),
    #[error("missing fibre metric: {0}")]
    MissingFibreMetric(String),
    #[error("jet order {given} below the required minimum {required}")]
    JetOrderTooLow { given: u32, required: u32 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
