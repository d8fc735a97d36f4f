use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("lattice basis is not full rank")]
    NotFullRank,
    #[error("lattice basis vectors are linearly dependent")]
    DependentBasis,
    #[error("bracket table is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("degenerate central direction: {0}")]
    Degenerate(String),
    #[error("state is not generic: {0}")]
    NonGeneric(String),
    #[error("rotation condition fails at the given period (residual {0:e})")]
    RotationViolated(f64),
    #[error("closed geodesic construction failed: {0}")]
    Construction(String),
    #[error("unsupported manifold for this operation: {0}")]
    Unsupported(String),
    #[error("invalid manifold selector `{0}`")]
    BadSelector(String),
}

pub type Result<T> = core::result::Result<T, Error>;
