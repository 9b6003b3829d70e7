//! Generalized dicyclic groups `G = <A, b>` and `(alpha, beta)`-regular
//! subgroups of their Cayley sum graphs.
//!
//! ```
//! use caysum::{catalog, oracle, subgroup};
//!
//! let g = catalog::by_name("Q8").unwrap().build().unwrap();
//! let subs = subgroup::enumerate_all_subgroups(&g, 128).unwrap();
//! assert_eq!(subs.len(), 6);
//! let region = oracle::region(&g, &subs[1]).unwrap();
//! assert_eq!(region.pairs.len(), 1);
//! ```

pub mod abelian;
pub mod catalog;

pub mod construct;
pub mod error;
pub mod formats;
pub mod graph;
pub mod group;
pub mod oracle;
pub mod subgroup;
pub mod verify;

pub use abelian::{normalize_spec, AbelianElement, AbelianSpec, SubgroupA};
pub use graph::{build_caysum, CaySumGraph, Profile, RegularityPair};
pub use construct::{construct_s, Witness};
pub use error::{Error, Result};
pub use group::{make_group, validate_connection_set, ConnectionSet, DicyclicGroup, GroupElement};
pub use oracle::{region, FeasibleRegion};
pub use subgroup::{enumerate_all_subgroups, Subgroup, SubgroupKind};
pub use verify::{crosscheck, CrosscheckOptions, CrosscheckReport};
