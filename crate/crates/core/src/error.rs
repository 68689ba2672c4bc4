use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation must be at least 2, got {0}")]
    TruncationTooSmall(usize),

    #[error("{samples} samples cannot resolve truncation {truncation} (need at least {needed})")]
    TooFewSamples {
        samples: usize,
        truncation: usize,
        needed: usize,
    },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("polygon is not strictly convex and counterclockwise at vertices ({0}, {1}, {2})")]
    NonConvexPolygon(usize, usize, usize),

    #[error("initial curve fails convexity validation (min radius of curvature {min_radius:e} at theta={theta})")]
    NotConvex { min_radius: f64, theta: f64 },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("kernel representation needs t > 0, got {0}")]
    NonPositiveTime(f64),

    #[error("length must be positive and finite, got {0}")]
    InvalidLength(f64),

    #[error("nonlocal term undefined at L={length}, A={area}")]
    OutsideDomain { length: f64, area: f64 },

    #[error("unknown flow term `{0}` (expected pan-yang | lin-tsai | ma-cheng | const:<c> | powersum:<c,p,q>[;...])")]
    UnknownFlowTerm(String),

    #[error("malformed flow term `{term}`: {reason}")]
    MalformedFlowTerm { term: String, reason: String },

    #[error("invalid integrator controls: {0}")]
    InvalidControls(String),
}

pub type Result<T> = std::result::Result<T, Error>;
