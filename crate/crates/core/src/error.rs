use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("item classification by utility column is undefined for general utilities")]
    GeneralModel,

    #[error("item {item} is already in the bundle")]
    ItemInBundle { item: String },

    #[error("search space of {required} exceeds the enumeration cap of {cap}")]
    TooLarge { required: String, cap: u128 },

    #[error("agent {agent} values the grand bundle at 0")]
    ZeroTotal { agent: usize },

    #[error("scaling agent {agent} to the target would flip their preferences")]
    SignMismatch { agent: usize },

    #[error("jealousy needs two distinct agents, got {agent} twice")]
    SameAgent { agent: usize },

    #[error("item {item} (round {round}) is mixed: no greedy branch applies")]
    MixedItemEncountered { round: usize, item: String },

    #[error("{items} items cannot go one-each to {agents} agents")]
    TooManyItems { items: usize, agents: usize },

    #[error("bad reduction parameters: {0}")]
    BadParameters(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("no instance of the requested class after {attempts} samples")]
    RejectionCapExceeded { attempts: usize },

    #[error("implication chain broken: {0}")]
    ChainViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
