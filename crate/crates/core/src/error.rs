use thiserror::Error;

use crate::graph::RegularityPair;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty list of cyclic orders")]
    EmptySpec,

    #[error("cyclic order {0} is out of range (must be 2..={max})", max = crate::abelian::MAX_CYCLIC_ORDER)]
    BadOrder(u64),

    #[error("{what} is {size}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("|A| = {0} is odd; the base group must have even order")]
    OddOrder(usize),

    #[error("b^2 = {0} is not an involution of A")]
    NotInvolution(String),

    #[error("element {0} does not belong to this group")]
    ForeignElement(String),

    #[error("index {index} out of range (group has {len} cyclic factors)")]
    FactorIndex { index: usize, len: usize },

    #[error("operands come from different abelian groups")]
    SpecMismatch,

    #[error("not a valid subgroup: {0}")]
    NotSubgroup(String),

    #[error("invalid connection set: {0}")]
    InvalidConnectionSet(String),

    #[error("({alpha},{beta}) is not in the feasible region of {subgroup}")]
    Infeasible {
        subgroup: String,
        alpha: usize,
        beta: usize,
    },

    #[error("construction unavailable: {0}")]
    RecipeUnavailable(String),

    #[error(
        "closed-form and composed regions disagree for {subgroup}: \
         only closed-form {only_stated:?}, only composed {only_composed:?}"
    )]
    RegionMismatch {
        subgroup: String,
        only_stated: Vec<RegularityPair>,
        only_composed: Vec<RegularityPair>,
    },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}
