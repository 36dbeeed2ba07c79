use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not anti-Hermitian (residual {residual:e})")]
    NotAntiHermitian { residual: f64 },

    #[error("matrix is not in Sp(m) (unitarity residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("vector lies outside the subalgebra {subspace} (residual {residual:e})")]
    OutsideSubspace { subspace: &'static str, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point ({theta}, {alpha}) is not admissible: {reason}")]
    InadmissiblePoint { theta: f64, alpha: f64, reason: &'static str },

    #[error("variable `{0}` has no image under the ring map")]
    UnassignedVariable(String),

    #[error("polynomial is not expressible in the target ring: {0}")]
    NotInRing(String),
}

pub type Result<T> = std::result::Result<T, Error>;
