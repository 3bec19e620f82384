use thiserror::Error;

/// Errors produced by hypergraph construction, the solvers and the verifiers.
///
/// Vertex ids inside error values are 1-based, matching the text formats.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("uniformity k = {0} is below the minimum of 2")]
    UniformityTooSmall(usize),
    #[error("vertex count n = {n} is smaller than the uniformity k = {k}")]
    TooFewVertices { n: usize, k: usize },
    #[error("vertex {vertex} is out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge has {found} vertices, expected {expected}")]
    WrongArity { expected: usize, found: usize },
    #[error("edge repeats vertex {0}")]
    RepeatedVertex(usize),
    #[error("instance too large to index: n = {n}, k = {k}")]
    TooLarge { n: usize, k: usize },
    #[error("joint degree needs two distinct vertices, got {0} twice")]
    SameVertex(usize),
    #[error("vertex {0} must not belong to the target set")]
    VertexInSet(usize),
    #[error("link set has size {found}; allowed sizes are 1 and k - 2 = {allowed}")]
    BadLinkSize { found: usize, allowed: usize },
    #[error("vertex sets must be nonempty and disjoint")]
    EmptyOrOverlappingSets,
    #[error("partition has length {found}, expected {expected}")]
    PartitionLength { expected: usize, found: usize },
    #[error("partition has an empty side")]
    DegeneratePartition,
    #[error("expected a {expected}-uniform hypergraph, got k = {found}")]
    WrongUniformity { expected: usize, found: usize },
    #[error("hypergraph is not bipartite")]
    NotBipartite,
    #[error("{what}: n = {n} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("no partition into at most {r_cap} independent classes exists")]
    NoPartitionWithinCap { r_cap: usize },
    #[error("time budget exceeded during {0}")]
    BudgetExceeded(&'static str),
    #[error("rejection sampling gave up after {0} attempts")]
    RejectionCap(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
