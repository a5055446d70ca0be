use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("convention mismatch: {0}")]
    Convention(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("singular Toeplitz system for Padé orders [{p}/{q}]")]
    DegenerateTable { p: usize, q: usize },

    #[error("root finder did not converge after {iterations} iterations on polynomial [{}]", .coeffs.join(", "))]
    RootFinding { iterations: usize, coeffs: Vec<String> },

    #[error("evaluation point {0} lies within pole proximity")]
    PoleProximity(String),

    #[error("pole on the integration contour at u = {0}; use the principal-value or a lateral prescription")]
    PoleOnContour(String),

    #[error("unsupported singularity: {0}")]
    UnsupportedSingularity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("growth-law classification failed: {0}")]
    Classification(String),

    #[error("level {state} is degenerate or nearly so (gap {gap:e})")]
    Degeneracy { state: usize, gap: f64 },

    #[error("finite-difference phase alignment failed (overlap {0:.6}); reduce the step")]
    StepSize(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
