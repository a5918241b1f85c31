use crate::graph::NodeId;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("node {node} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("graph is not a tree")]
    NotATree,
    #[error("empty component")]
    EmptyComponent,
    #[error("node set is not a connected component of the graph")]
    NotAComponent,
    #[error("node {0} is not in the component")]
    OutsideComponent(NodeId),
    #[error("no centroid exists for the component")]
    NoCentroid,
    #[error("invalid game instance: {0}")]
    InvalidInstance(String),
    #[error("profile has {got} strategies, instance has {expected} agents")]
    ProfileLength { expected: usize, got: usize },
    #[error("agent {0} buys an edge to itself")]
    SelfPurchase(NodeId),
    #[error("agent {0} out of range")]
    AgentOutOfRange(NodeId),
    #[error("invalid f-table: {0}")]
    InvalidFTable(String),
    #[error("component size {size} outside f-table range 0..={max}")]
    SizeOutOfRange { size: usize, max: usize },
    #[error("region index {0} is not a vulnerable region")]
    InvalidRegion(usize),
    #[error("n = {n} exceeds the cap of {cap} for {what}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("fixture self-check failed: {0}")]
    FixtureCheck(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
