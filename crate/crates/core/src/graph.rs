//! Cayley sum graphs and `(alpha, beta)`-regularity of vertex subsets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::group::{ConnectionSet, DicyclicGroup, GroupElement};
use crate::subgroup::{right_coset_ids, Subgroup};

/// Serialized as `[alpha, beta]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct RegularityPair {
    pub alpha: usize,
    pub beta: usize,
}

impl RegularityPair {
    pub const fn new(alpha: usize, beta: usize) -> Self {
        RegularityPair { alpha, beta }
    }

    pub fn is_zero(&self) -> bool {
        self.alpha == 0 && self.beta == 0
    }
}

impl From<[usize; 2]> for RegularityPair {
    fn from(v: [usize; 2]) -> Self {
        RegularityPair::new(v[0], v[1])
    }
}

impl From<RegularityPair> for [usize; 2] {
    fn from(p: RegularityPair) -> Self {
        [p.alpha, p.beta]
    }
}

impl fmt::Display for RegularityPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.alpha, self.beta)
    }
}

/// Outcome of a regularity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Profile {
    /// `whole_group` is set when `C = G`; then `beta` is reported as 0.
    Regular { alpha: usize, beta: usize, whole_group: bool },
    /// `witness` has `count` neighbours in `C` where `expected` was required.
    NotRegular {
        witness: GroupElement,
        inside: bool,
        count: usize,
        expected: usize,
    },
}

impl Profile {
    pub fn pair(&self) -> Option<RegularityPair> {
        match self {
            Profile::Regular { alpha, beta, .. } => Some(RegularityPair::new(*alpha, *beta)),
            Profile::NotRegular { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CaySumGraph<'g> {
    group: &'g DicyclicGroup,
    s: ConnectionSet,
    adjacency: Vec<Vec<usize>>,
}

/// `x ~ y` iff `x != y` and `xy in S`.
pub fn build_caysum<'g>(g: &'g DicyclicGroup, s: &ConnectionSet) -> Result<CaySumGraph<'g>> {
    s.require_valid()?;
    let adjacency = (0..g.order())
        .map(|x| {
            let xinv = g.inv_idx(x);
            let mut nb: Vec<usize> = s
                .indices()
                .iter()
                .map(|&t| g.mul_idx(xinv, t))
                .filter(|&y| y != x)
                .collect();
            nb.sort_unstable();
            nb
        })
        .collect();
    Ok(CaySumGraph { group: g, s: s.clone(), adjacency })
}

impl<'g> CaySumGraph<'g> {
    pub fn group(&self) -> &DicyclicGroup {
        self.group
    }

    pub fn connection_set(&self) -> &ConnectionSet {
        &self.s
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.adjacency[x]
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Adjacency lists as element pairs, for debugging output.
    pub fn adjacency_json(&self) -> serde_json::Value {
        let g = self.group;
        serde_json::Value::Array(
            self.adjacency
                .iter()
                .enumerate()
                .map(|(x, nb)| {
                    serde_json::json!({
                        "vertex": g.element_at(x),
                        "neighbors": nb.iter().map(|&y| g.element_at(y)).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }
}

/// Definition-level check: count neighbours in `C` for every vertex.
pub fn regular_profile(graph: &CaySumGraph<'_>, c: &[GroupElement]) -> Result<Profile> {
    let g = graph.group;
    let mut member = vec![false; g.order()];
    for x in c {
        g.check(x)?;
        member[g.index_of(x)] = true;
    }
    Ok(regular_profile_idx(graph, &member))
}

pub fn regular_profile_idx(graph: &CaySumGraph<'_>, member: &[bool]) -> Profile {
    let g = graph.group;
    let (mut alpha, mut beta) = (None, None);
    for x in 0..g.order() {
        let count = graph.adjacency[x].iter().filter(|&&y| member[y]).count();
        let slot = if member[x] { &mut alpha } else { &mut beta };
        match *slot {
            None => *slot = Some(count),
            Some(expected) if expected != count => {
                return Profile::NotRegular {
                    witness: g.element_at(x),
                    inside: member[x],
                    count,
                    expected,
                };
            }
            _ => {}
        }
    }
    Profile::Regular {
        alpha: alpha.unwrap_or(0),
        beta: beta.unwrap_or(0),
        whole_group: beta.is_none() && alpha.is_some(),
    }
}

/// Coset-counting check for a subgroup: `alpha = |S n K|` and
/// `beta = |S n Kx|`, which must be the same for every `Kx != K`.
pub fn subgroup_profile_fast(g: &DicyclicGroup, s: &ConnectionSet, k: &Subgroup) -> Result<Profile> {
    s.require_valid()?;
    Ok(subgroup_profile_counts(g, s.indices(), k))
}

/// As [`subgroup_profile_fast`] but without the validity precondition.
pub fn subgroup_profile_counts(g: &DicyclicGroup, s: &[usize], k: &Subgroup) -> Profile {
    let (ids, n) = right_coset_ids(g, k.indices());
    let mut counts = vec![0usize; n];
    for &x in s {
        counts[ids[x]] += 1;
    }
    if n == 1 {
        return Profile::Regular { alpha: counts[0], beta: 0, whole_group: true };
    }
    let beta = counts[1];
    if let Some(bad) = (2..n).find(|&c| counts[c] != beta) {
        let witness = (0..g.order()).find(|&x| ids[x] == bad).unwrap_or(0);
        return Profile::NotRegular {
            witness: g.element_at(witness),
            inside: false,
            count: counts[bad],
            expected: beta,
        };
    }
    Profile::Regular { alpha: counts[0], beta, whole_group: false }
}

/// Convenience: build the graph and run the definition-level check on `K`.
pub fn subgroup_profile_slow(g: &DicyclicGroup, s: &ConnectionSet, k: &Subgroup) -> Result<Profile> {
    let graph = build_caysum(g, s)?;
    let mut member = vec![false; g.order()];
    for &x in k.indices() {
        member[x] = true;
    }
    Ok(regular_profile_idx(&graph, &member))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{normalize_spec, subgroup_closure};
    use crate::group::{make_group, validate_connection_set};

    fn q8() -> DicyclicGroup {
        let spec = normalize_spec(&[4]).unwrap();
        let b2 = spec.element(&[2]).unwrap();
        make_group(spec, b2).unwrap()
    }

    fn ge(g: &DicyclicGroup, a: i64, f: bool) -> GroupElement {
        GroupElement::new(g.spec().element(&[a]).unwrap(), f)
    }

    fn nsq(g: &DicyclicGroup) -> ConnectionSet {
        let all: Vec<GroupElement> = g.elements().into_iter().filter(|x| !g.square_set().contains(x)).collect();
        validate_connection_set(g, &all).unwrap()
    }

    fn sub_a(g: &DicyclicGroup, x: i64) -> Subgroup {
        let h = subgroup_closure(g.spec(), &[g.spec().element(&[x]).unwrap()]);
        Subgroup::type_a(g, h).unwrap()
    }

    #[test]
    fn degrees() {
        let g = q8();
        let s = validate_connection_set(&g, &[ge(&g, 1, false), ge(&g, 3, false)]).unwrap();
        let gr = build_caysum(&g, &s).unwrap();
        assert!((0..8).all(|x| gr.neighbors(x).len() == 2));
        let empty = validate_connection_set(&g, &[]).unwrap();
        let gr = build_caysum(&g, &empty).unwrap();
        assert!((0..8).all(|x| gr.neighbors(x).is_empty()));
        let full = nsq(&g);
        assert_eq!(full.len(), 6);
        let gr = build_caysum(&g, &full).unwrap();
        assert!((0..8).all(|x| gr.neighbors(x).len() == 6));
    }

    #[test]
    fn invalid_set_is_refused() {
        let g = q8();
        let s = validate_connection_set(&g, &[ge(&g, 1, false)]).unwrap();
        assert!(build_caysum(&g, &s).is_err());
    }

    #[test]
    fn q8_profiles() {
        let g = q8();
        let full = nsq(&g);
        let gr = build_caysum(&g, &full).unwrap();
        let c = [ge(&g, 0, false), ge(&g, 2, false)];
        assert_eq!(regular_profile(&gr, &c).unwrap().pair(), Some(RegularityPair::new(0, 2)));
        assert_eq!(regular_profile(&gr, &[]).unwrap().pair(), Some(RegularityPair::new(0, 0)));

        let s = validate_connection_set(&g, &[ge(&g, 1, false), ge(&g, 3, false)]).unwrap();
        let gr = build_caysum(&g, &s).unwrap();
        let p = regular_profile(&gr, &[ge(&g, 0, false), ge(&g, 1, false)]).unwrap();
        assert!(matches!(p, Profile::NotRegular { .. }));
    }

    #[test]
    fn q8_fast_profiles() {
        let g = q8();
        let k = sub_a(&g, 2);
        assert_eq!(subgroup_profile_fast(&g, &nsq(&g), &k).unwrap().pair(), Some(RegularityPair::new(0, 2)));

        let h = subgroup_closure(g.spec(), &[g.spec().element(&[2]).unwrap()]);
        let kb = Subgroup::type_zb(&g, h, &g.spec().identity()).unwrap();
        let s = validate_connection_set(&g, &[ge(&g, 0, true), ge(&g, 2, true)]).unwrap();
        assert_eq!(subgroup_profile_fast(&g, &s, &kb).unwrap().pair(), Some(RegularityPair::new(2, 0)));
        let s = validate_connection_set(&g, &[ge(&g, 1, false), ge(&g, 3, false)]).unwrap();
        assert_eq!(subgroup_profile_fast(&g, &s, &kb).unwrap().pair(), Some(RegularityPair::new(0, 2)));
    }

    #[test]
    fn whole_group_convention() {
        let g = q8();
        let s = nsq(&g);
        let gr = build_caysum(&g, &s).unwrap();
        let p = regular_profile(&gr, &g.elements()).unwrap();
        assert_eq!(p, Profile::Regular { alpha: 6, beta: 0, whole_group: true });
    }

    #[test]
    fn pair_json() {
        let p = RegularityPair::new(2, 4);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[2,4]");
        assert_eq!(serde_json::from_str::<RegularityPair>("[2,4]").unwrap(), p);
    }
}
