use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({0}, {1}) has non-positive weight {2}")]
    NonpositiveWeight(usize, usize, f64),

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("graph is disconnected ({0} vertices unreachable from vertex 0)")]
    DisconnectedGraph(usize),

    #[error("vertex index {index} out of range for graph with {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("matrix is not symmetric at ({0}, {1})")]
    NonSymmetric(usize, usize),

    #[error("off-diagonal sign pattern violated at ({0}, {1}): {2}")]
    InvalidSignPattern(usize, usize, f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("graph with {0} vertices exceeds the dense eigensolver guard of {1}")]
    TooLarge(usize, usize),

    #[error("norm exponent p = {0} is invalid (requires p >= 1)")]
    InvalidP(f64),

    #[error("bandwidth K = {k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },

    #[error("node set is empty")]
    EmptyNodeSet,

    #[error("induced subgraph is disconnected")]
    DisconnectedSubgraph,

    #[error("start vertex {0} is not in the sampling set")]
    StartNotInW(usize),

    #[error("requested {j} centers but the sampling set has only {available} nodes")]
    JTooLarge { j: usize, available: usize },

    #[error("center set is empty")]
    EmptyCenterSet,

    #[error("{0} candidate subsets exceed the brute-force guard of {1}")]
    CombinatorialBlowup(u128, u128),

    #[error("augmentation radius {0} is negative")]
    NegativeRadius(f64),

    #[error("Shepard weights sum to zero at vertex {0}")]
    ZeroTotalWeight(usize),

    #[error("spline shift epsilon = {eps} must exceed -lambda_1 = {min_required}")]
    EpsilonTooSmall { eps: f64, min_required: f64 },

    #[error("spline exponent s = {0} must be positive")]
    NonpositiveSplineOrder(f64),

    #[error("kernel node {index} out of range for spectrum of size {n}")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("linear system solve broke down (matrix numerically singular)")]
    SingularSystem,

    #[error("sample nodes contain duplicate vertex {0}")]
    DuplicateSample(usize),

    #[error("sample value at vertex {0} is not finite")]
    NonFiniteSample(usize),

    #[error("subdomain {0} contains no sampling node")]
    EmptyLocalSampleSet(usize),

    #[error("reference signal has zero norm")]
    ZeroReference,

    #[error("global bound {line} violated: measured {measured} > bound {bound}")]
    BoundViolated {
        line: &'static str,
        measured: f64,
        bound: f64,
    },

    #[error("file error for {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path} line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
