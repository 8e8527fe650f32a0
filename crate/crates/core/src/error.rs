use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("total degree {degree} exceeds the cap of {cap}")]
    DegreeCapExceeded { degree: u32, cap: u32 },

    #[error("exponent is not integrable: real-part matrix is not positive definite")]
    NotIntegrable,

    #[error("operands carry different Gaussian exponents")]
    ExponentMismatch,

    #[error("index {index} out of range for {len} operators")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("operator coefficients are not affine: {0}")]
    NonAffine(String),

    #[error("couplings must all equal 1/sqrt(2) for this construction")]
    UnsupportedCouplings,

    #[error("series truncation {requested} exceeds the family table size {available}")]
    TruncationTooLarge { requested: usize, available: usize },

    #[error("quadrature grid too coarse: refinement changed the result by {delta:e} (limit {limit:e})")]
    GridTooCoarse { delta: f64, limit: f64 },

    #[error("ratio constraint not satisfied (residual {0:e})")]
    ConstraintNotSatisfied(f64),
}
