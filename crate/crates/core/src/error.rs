use thiserror::Error;

/// Errors shared across all modules of the crate.
#[derive(Debug, Error)]
pub enum CcError {
    #[error("quadrature budget exceeded ({0} evaluations)")]
    QuadratureBudgetExceeded(u64),
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),
    #[error("degenerate geometry persists after perturbation")]
    DegenerateAfterPerturbation,
    #[error("invalid control: {0}")]
    InvalidControl(String),
    #[error("invalid stockyard: {0}")]
    InvalidStockyard(String),
    #[error("traversal graph is not Eulerian (internal corruption)")]
    NotEulerian,
    #[error("derivative order {0} exceeds supported cap {1}")]
    UnsupportedOrder(usize, usize),
    #[error("value {0} outside the tabulated range (max {1})")]
    OutOfTableRange(f64, f64),
    #[error("cylinder coordinates outside B(0,1) x (-1,1)")]
    OutOfCylinder,
    #[error("field kind cannot certify a bounded Hessian")]
    HessianUnbounded,
    #[error("invalid field: {0}")]
    InvalidField(String),
}

pub type Result<T> = std::result::Result<T, CcError>;
