use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    #[error("point outside the domain: |<z,w>| = {0} >= 1")]
    Domain(f64),

    #[error("unknown sample label `{0}`")]
    UnknownLabel(String),

    #[error("irreducibility violated: {0}")]
    Irreducible(String),

    #[error("sample is not consistent with a complete Nevanlinna-Pick kernel (min eigenvalue {min_eig:e})")]
    NotCnp { min_eig: f64 },

    #[error("embedding inconsistent: point {index} has norm {norm} >= 1")]
    OutsideBall { index: usize, norm: f64 },

    #[error("Gram matrix is not positive definite (min eigenvalue {min_eig:e})")]
    Conditioning { min_eig: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("degree window exceeded: degree {degree} > window {window}")]
    Window { degree: usize, window: usize },

    #[error("classification error: expected rank 1, found rank {0}")]
    Classification(usize),

    #[error("division by zero: {0}")]
    Division(String),
}
