use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    // -- graph construction --------------------------------------------------
    #[error("edge ({i}, {j}) endpoint out of range for {n} vertices")]
    EdgeOutOfRange { i: usize, j: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("edge ({i}, {j}) has non-positive weight {w}")]
    NonPositiveWeight { i: usize, j: usize, w: f64 },

    #[error("vertex {0} is isolated (zero degree); the normalized Laplacian is undefined")]
    IsolatedVertex(usize),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    // -- spectral -------------------------------------------------------------
    #[error("matrix is not symmetric: max |H - H^T| = {max_asym:e} exceeds tolerance {tol:e}")]
    NotSymmetric { max_asym: f64, tol: f64 },

    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("eigensolver failed to converge")]
    SolverFailure,

    #[error("grouping tolerance {0} must be finite and nonnegative")]
    InvalidTolerance(f64),

    #[error("spectrum has a single distinct eigenvalue; the spectral gap is undefined")]
    SingleEigenvalue,

    // -- measures ---------------------------------------------------------
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("masses sum to {0}, expected 1 within 1e-9")]
    MassMismatch(f64),

    #[error("mass {0} is negative beyond the -1e-12 clamping floor")]
    NegativeMass(f64),

    #[error("quantile argument t = {0} outside (0, 1]")]
    OutOfDomain(f64),

    #[error("Wasserstein exponent p = {0} must be >= 1")]
    InvalidExponent(f64),

    #[error("operation requires a probability measure")]
    NotProbability,

    #[error("measure has empty support")]
    EmptySupport,

    // -- signatures -----------------------------------------------------------
    #[error("vertex function has zero norm")]
    ZeroFunction,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("missing spectrum for pair ({0}, {1})")]
    MissingPair(usize, usize),

    #[error("pair spectra come from different decompositions")]
    SourceMismatch,

    #[error("diffusion distance requires two distinct vertices, got x = y = {0}")]
    SameVertex(usize),

    // -- diffusion --------------------------------------------------------
    #[error("point cloud must contain at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("point cloud rows have inconsistent dimensions")]
    RaggedPointCloud,

    #[error("kernel bandwidth epsilon = {0} must be positive")]
    BadBandwidth(f64),

    #[error("normalization exponent alpha = {0} must lie in [0, 1]")]
    BadAlpha(f64),

    #[error("kernel weight underflowed to zero at point {0}; epsilon is far too small")]
    DegenerateWeight(usize),

    #[error("torus radii must satisfy 0 < r < R, got R = {major}, r = {minor}")]
    BadRadii { major: f64, minor: f64 },

    // -- stability / analysis ------------------------------------------------
    #[error("sigma is not a permutation of 0..{0}")]
    InvalidPermutation(usize),

    #[error("correlation undefined: input vector has zero variance")]
    ZeroVariance,

    #[error("correlation requires equal lengths >= 2, got {left} and {right}")]
    BadCorrelationInput { left: usize, right: usize },

    // -- io --------------------------------------------------------------
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
