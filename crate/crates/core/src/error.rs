use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(usize, usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("no path between {0} and {1}")]
    Unreachable(usize, usize),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("portal set is empty")]
    EmptyPortals,
    #[error("cluster {0} cannot be reached from the portal clusters in the quotient graph")]
    DisconnectedCluster(usize),
    #[error("graph is not a tree")]
    NotATree,
    #[error("component is not a rectangle of the generated grid")]
    NotAGeneratedGrid,
    #[error("separator oracle failure: {0}")]
    OracleFailure(String),
    #[error("{terminals} terminals exceed the cap of {cap}")]
    TerminalCapExceeded { terminals: usize, cap: usize },
    #[error("exhaustive evaluation needs n <= {cap}, got {n}")]
    TooLarge { n: usize, cap: usize },
    #[error("generator gave up after {0} attempts to produce a connected graph")]
    RetryExhausted(usize),
    #[error("not a spanning tree: {0}")]
    NotSpanningTree(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
