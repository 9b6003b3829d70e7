//! JSON file formats. Every parser returns an error rather than panicking.

use serde::{Deserialize, Serialize};

use crate::abelian::{checked_subgroup_closure, normalize_spec, AbelianElement};
use crate::graph::RegularityPair;
use crate::construct::{ConstructionRecipe, DecompositionPlan, Witness};
use crate::error::{Error, Result};
use crate::group::{make_group, validate_connection_set, ConnectionSet, DicyclicGroup, GroupElement};
use crate::oracle::FeasibleRegion;
use crate::subgroup::{Subgroup, SubgroupKind};

/// `{"abelian": [2, 4], "b_squared": [0, 2]}`; `b_squared` is in the
/// coordinates of the listed factors, before normalization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpecFile {
    pub abelian: Vec<u64>,
    pub b_squared: Vec<i64>,
}

impl GroupSpecFile {
    pub fn build(&self) -> Result<DicyclicGroup> {
        let spec = normalize_spec(&self.abelian)?;
        let b2 = spec.from_user_coords(&self.b_squared)?;
        make_group(spec, b2)
    }

    /// Describe an existing group in the same format (user coordinates).
    pub fn from_group(g: &DicyclicGroup) -> Self {
        GroupSpecFile {
            abelian: g.spec().user_orders().to_vec(),
            b_squared: g.spec().to_user_coords(g.b_squared()).into_iter().map(|x| x as i64).collect(),
        }
    }
}

/// Subgroup JSON, with generators in canonical coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum SubgroupSpec {
    A { gens: Vec<Vec<i64>> },
    #[serde(rename = "zb")]
    Zb {
        #[serde(rename = "H_gens")]
        h_gens: Vec<Vec<i64>>,
        z: Vec<i64>,
    },
}

fn to_i64(x: &AbelianElement) -> Vec<i64> {
    x.exps().iter().map(|&e| e as i64).collect()
}

impl SubgroupSpec {
    pub fn build(&self, g: &DicyclicGroup) -> Result<Subgroup> {
        let spec = g.spec();
        let elems = |v: &[Vec<i64>]| v.iter().map(|x| spec.element(x)).collect::<Result<Vec<_>>>();
        match self {
            SubgroupSpec::A { gens } => Subgroup::type_a(g, checked_subgroup_closure(spec, &elems(gens)?)?),
            SubgroupSpec::Zb { h_gens, z } => {
                let h = checked_subgroup_closure(spec, &elems(h_gens)?)?;
                Subgroup::type_zb(g, h, &spec.element(z)?)
            }
        }
    }

    pub fn from_subgroup(k: &Subgroup) -> Self {
        let gens = k.h().generators().iter().map(to_i64).collect();
        match k.kind() {
            SubgroupKind::TypeA => SubgroupSpec::A { gens },
            SubgroupKind::TypeZb => SubgroupSpec::Zb {
                h_gens: gens,
                z: k.z().map(to_i64).unwrap_or_default(),
            },
        }
    }
}

/// `{"elements": [[[1],0], [[3],0]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionSetFile {
    pub elements: Vec<GroupElement>,
}

impl ConnectionSetFile {
    pub fn from_set(s: &ConnectionSet) -> Self {
        ConnectionSetFile { elements: s.elements().to_vec() }
    }

    pub fn build(&self, g: &DicyclicGroup) -> Result<ConnectionSet> {
        validate_connection_set(g, &self.elements)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionFile {
    pub subgroup: String,
    pub case: String,
    pub pairs: Vec<RegularityPair>,
    /// Present only when the closed form disagrees with `pairs`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stated_pairs: Option<Vec<RegularityPair>>,
}

impl RegionFile {
    pub fn new(k: &Subgroup, region: &FeasibleRegion, stated: Option<&crate::oracle::PairSet>) -> Self {
        RegionFile {
            subgroup: k.label(),
            case: region.case_label.clone(),
            pairs: region.pairs.iter().copied().collect(),
            stated_pairs: stated.filter(|s| **s != region.pairs).map(|s| s.iter().copied().collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub subgroup: SubgroupSpec,
    pub alpha: usize,
    pub beta: usize,
    #[serde(rename = "S")]
    pub s: ConnectionSetFile,
    #[serde(default)]
    pub plan: Option<DecompositionPlan>,
    #[serde(default)]
    pub recipes: Vec<ConstructionRecipe>,
}

impl WitnessFile {
    pub fn from_witness(w: &Witness) -> Self {
        WitnessFile {
            subgroup: SubgroupSpec::from_subgroup(&w.subgroup),
            alpha: w.pair.alpha,
            beta: w.pair.beta,
            s: ConnectionSetFile::from_set(&w.set),
            plan: w.plan,
            recipes: w.recipes.clone(),
        }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn parse_group_spec(text: &str) -> Result<DicyclicGroup> {
    parse::<GroupSpecFile>(text)?.build()
}

pub fn parse_subgroup_spec(g: &DicyclicGroup, text: &str) -> Result<Subgroup> {
    parse::<SubgroupSpec>(text)?.build(g)
}

/// Accepts either a bare `{"elements": ...}` or a full witness file.
pub fn parse_connection_set(g: &DicyclicGroup, text: &str) -> Result<ConnectionSet> {
    let value: serde_json::Value = parse(text)?;
    let file: ConnectionSetFile = match value.get("S") {
        Some(inner) => serde_json::from_value(inner.clone()),
        None => serde_json::from_value(value),
    }
    .map_err(|e| Error::Malformed(e.to_string()))?;
    file.build(g)
}

pub fn parse_witness(text: &str) -> Result<WitnessFile> {
    parse(text)
}
