use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid Lipschitz patch: {0}")]
    InvalidPatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A geometric hypothesis of a construction does not hold for the given input.
    #[error("hypothesis failure: {0}")]
    Hypothesis(String),
    #[error("meshing failed: {0}")]
    Meshing(String),
    #[error("degenerate triangle {index} in assembly")]
    DegenerateTriangle { index: usize },
    #[error("eigensolver did not converge after {iterations} iterations (best residual {best_residual:.3e})")]
    NoConvergence { iterations: usize, best_residual: f64 },
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
    #[error("empty intersection: {0}")]
    EmptyIntersection(String),
    #[error("mass underflow: field is effectively zero on the ball ({0:.3e})")]
    Underflow(f64),
    #[error("field does not vanish on the boundary piece (max |h| = {0:.3e})")]
    NotVanishing(f64),
    #[error("resolution {resolution} is too coarse for a domain of diameter {diameter}")]
    TooCoarse { resolution: f64, diameter: f64 },
    #[error("path construction failed: {0}")]
    Path(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema violation in {what}: {detail}")]
    Schema { what: &'static str, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
