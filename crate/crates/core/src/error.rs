use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("hypergraph has no interactions")]
    NoInteractions,
    #[error("node count must be positive")]
    NoNodes,
    #[error("interaction {interaction} is empty")]
    EmptyInteraction { interaction: usize },
    #[error("interaction {interaction} references node {node}, outside 1..={n}")]
    NodeOutOfRange { interaction: usize, node: usize, n: usize },
    #[error("interaction {interaction} repeats node {node}")]
    DuplicateNode { interaction: usize, node: usize },
    #[error("{what} index {index} out of range (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
    #[error("invalid block model: {0}")]
    InvalidBlockModel(&'static str),
    #[error("type count {count} for class {class} exceeds class size {size} (interaction {interaction})")]
    TypeExceedsClass {
        interaction: usize,
        class: usize,
        count: u32,
        size: usize,
    },
    #[error("invalid weights: {0}")]
    InvalidWeights(&'static str),
    #[error("cannot draw {k} items from a support of {support}")]
    SupportTooSmall { k: usize, support: usize },
    #[error("invalid size law: {0}")]
    InvalidSizeLaw(&'static str),
    #[error("invalid simulation design: {0}")]
    InvalidDesign(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("embedding dimension {d} exceeds available {available}")]
    DimensionTooLarge { d: usize, available: usize },
    #[error("expected {expected} eigenvalues outside the bulk intervals, found {found}")]
    SelectionMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate in point {point}")]
    NonFinite { point: usize },
    #[error("partition lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
