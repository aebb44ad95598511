use thiserror::Error;

use crate::game::Priority;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("vertex {id} has no successors")]
    Sink { id: usize },
    #[error("vertex {id} has successor {successor}, which is not a vertex")]
    DanglingSuccessor { id: usize, successor: usize },
    #[error("line {line}: vertex {id} is declared twice")]
    DuplicateId { line: usize, id: usize },
    #[error("vertex {id} has priority {priority}, outside 1..=d")]
    PriorityOutOfRange { id: usize, priority: Priority },
    #[error("vertex {id} has a name containing a quote or newline")]
    BadName { id: usize },
    #[error("per-vertex arrays have different lengths")]
    Shape,
    #[error("malformed strategy: {0}")]
    MalformedStrategy(String),
    #[error("enumeration would produce {size} games, above the cap of {cap}")]
    CapExceeded { size: u128, cap: u128 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("tree would have {size} nodes, above the cap of {cap}")]
    TooLarge { size: u128, cap: u128 },
    #[error("trees differ in flavor or height")]
    Mismatch,
    #[error("invalid tree: {0}")]
    Invalid(String),
    #[error("enumeration of small trees exceeds the cap of {cap}")]
    EnumerationCap { cap: usize },
    #[error("bad tree choice {0:?}; expected complete:<branching> or succinct:<n>")]
    BadChoice(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabellingError {
    #[error("position {pos} is not admissible for vertex {vertex} of priority {priority}")]
    Inadmissible { vertex: usize, pos: u32, priority: Priority },
    #[error("lift of vertex {vertex} to {target} is not strictly above its position {current}")]
    NotIncreasing { vertex: usize, current: u32, target: u32 },
    #[error("lift of vertex {vertex} to {target} overshoots its destination {destination}")]
    BeyondDestination { vertex: usize, target: u32, destination: u32 },
    #[error("labellings are over different spaces or flavors")]
    Mismatch,
    #[error("vertex {0} is invalid, so the labelling is not an attractor decomposition")]
    InvalidVertex(usize),
    #[error("position {0} is the top position, which has no successor")]
    NoSuccessor(u32),
    #[error("position {0} is lazy")]
    LazyPosition(u32),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Labelling(#[from] LabellingError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("tree of height {height} (d = {tree_d}) cannot host priorities up to {max_priority}")]
    TreeTooShallow { height: u32, tree_d: u32, max_priority: Priority },
    #[error("the two trees have different heights")]
    HeightMismatch,
    #[error("tree flavor does not match the requested player")]
    FlavorMismatch,
    #[error("recursive call budget of {cap} exceeded")]
    CallCap { cap: u64 },
    #[error("oracle would enumerate {size} strategies, above the cap of {cap}")]
    OracleCap { size: u128, cap: u128 },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
