use thiserror::Error;

/// Errors surfaced by the geometry kernel and the meshing pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no such triangle: angle sum {0} >= pi")]
    NoSuchTriangle(f64),

    #[error("no such quadrilateral: sinh(a)*sinh(b) = {0} > 1")]
    NoSuchQuadrilateral(f64),

    #[error("tessellation resolution exhausted: {0}")]
    Resolution(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("interface mismatch: {0}")]
    Interface(String),

    #[error("non-simple polygon: {0}")]
    NonSimple(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
