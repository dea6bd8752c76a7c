use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("refinement needed: spectral tail ratio {tail:.3e} exceeds {threshold:.1e} ({what})")]
    RefinementNeeded {
        what: &'static str,
        tail: f64,
        threshold: f64,
    },

    #[error("curve self-intersects: chord-arc constant {c0:.3e} between s = {s1:.6} and s = {s2:.6}")]
    SelfIntersection { c0: f64, s1: f64, s2: f64 },

    #[error("point ({x:.6}, {y:.6}) lies outside the layer")]
    Domain { x: f64, y: f64 },

    #[error("interface violates the depth margin: clearance {clearance:.3e} < {required:.3e}")]
    DepthMargin { clearance: f64, required: f64 },

    #[error("normal coordinates degenerate: jacobian {j:.6} at s = {s:.6}, r = {r:.6}")]
    JacobianDegenerate { s: f64, r: f64, j: f64 },

    #[error(
        "normal coordinates not injective: ({s1:.6}, {r1:.6}) and ({s2:.6}, {r2:.6}) map within {distance:.3e}"
    )]
    Collision {
        s1: f64,
        r1: f64,
        s2: f64,
        r2: f64,
        distance: f64,
    },

    #[error("criterion inapplicable: {0}")]
    Inapplicable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("fixed point did not converge after {iterations} iterations (residuals {trace:?})")]
    NoConvergence { iterations: usize, trace: Vec<f64> },

    #[error("grid mismatch: {left} vs {right} samples")]
    GridMismatch { left: usize, right: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
