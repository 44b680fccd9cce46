use thiserror::Error;

/// Errors raised by the spectral search pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (max defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance has {vertices} vertices, above the size cap of {cap}")]
    SizeCap { vertices: usize, cap: usize },

    #[error("graph is disconnected: top eigenvalue is not simple (gap {gap:.3e})")]
    Disconnected { gap: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("assumption violated: {0}")]
    Assumption(String),

    #[error("evaluation point {x} lies within {distance:.3e} of the secular pole {pole}")]
    PoleProximity { x: f64, pole: f64, distance: f64 },

    #[error("no sign change of the secular function on [{lo}, {hi}] (g = {g_lo:.3e}, {g_hi:.3e})")]
    BracketFailure { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("degenerate gap between the two top perturbed eigenvalues ({0:.3e})")]
    DegenerateGap(f64),

    #[error("linear algebra backend failure: {0}")]
    Backend(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
