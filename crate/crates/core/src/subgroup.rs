//! Subgroups of `G` and the invariants the feasibility rules consume.
//!
//! Every subgroup of `G` is either some `H <= A` or `<H, zb> = H u Hzb` with
//! `b^2 in H`. The invariants `l`, `m`, `r` and the unit `|H|/2^l` are
//! computed intrinsically:
//!
//! * `2^l     = |H : H n B|`
//! * `2^m     = |H n A'|`
//! * `2^(m-r) = |H n A' n B|`
//!
//! For subgroups that split along the canonical basis these coincide with the
//! coordinate-projection definitions (`L = {i : phi_i(H) = <a_i>}` and so on),
//! which are reported alongside in [`ProjectionInvariants`]. For subgroups
//! such as `<(1,1)>` in `Z2 x Z4` the projection numbers stop satisfying the
//! counting identities, while the intrinsic ones always do.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::abelian::{coset_ids, enumerate_subgroups, AbelianElement, SubgroupA};
use crate::error::{Error, Result};
use crate::group::{DicyclicGroup, GroupElement};

/// Default cap on `|G|` for enumerating all subgroups.
pub const DEFAULT_SUBGROUP_CAP_G: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SubgroupKind {
    #[serde(rename = "A")]
    TypeA,
    #[serde(rename = "zb")]
    TypeZb,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    kind: SubgroupKind,
    h: SubgroupA,
    z: Option<AbelianElement>,
    indices: Vec<usize>,
}

impl Subgroup {
    pub fn type_a(g: &DicyclicGroup, h: SubgroupA) -> Result<Self> {
        check_in_a(g, &h)?;
        let indices = h.indices().to_vec();
        Ok(Subgroup { kind: SubgroupKind::TypeA, h, z: None, indices })
    }

    /// `<H, zb>`. Requires `b^2 in H`; `z` is replaced by the smallest element
    /// of its coset `Hz`, so equal subgroups get equal encodings.
    pub fn type_zb(g: &DicyclicGroup, h: SubgroupA, z: &AbelianElement) -> Result<Self> {
        check_in_a(g, &h)?;
        g.spec().check(z)?;
        if !h.contains_idx(g.b_squared_idx()) {
            return Err(Error::NotSubgroup(format!(
                "<H,zb> with H={} needs b^2={} in H",
                h.label(),
                g.b_squared()
            )));
        }
        let s = g.spec();
        let zi = s.index_of(z);
        let zmin = h.indices().iter().map(|&x| s.add_idx(x, zi)).min().unwrap_or(zi);
        let n = g.order_a();
        let mut indices = h.indices().to_vec();
        indices.extend(h.indices().iter().map(|&x| n + s.add_idx(x, zmin)));
        indices.sort_unstable();
        Ok(Subgroup {
            kind: SubgroupKind::TypeZb,
            h,
            z: Some(s.element_at(zmin)),
            indices,
        })
    }

    pub fn kind(&self) -> SubgroupKind {
        self.kind
    }

    /// `K n A`.
    pub fn h(&self) -> &SubgroupA {
        &self.h
    }

    pub fn z(&self) -> Option<&AbelianElement> {
        self.z.as_ref()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn elements(&self, g: &DicyclicGroup) -> Vec<GroupElement> {
        self.indices.iter().map(|&i| g.element_at(i)).collect()
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn contains_idx(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_whole_group(&self, g: &DicyclicGroup) -> bool {
        self.order() == g.order()
    }

    pub fn label(&self) -> String {
        match &self.z {
            None => self.h.label(),
            Some(z) => {
                let inner = self.h.label();
                let inner = &inner[1..inner.len() - 1];
                if inner.is_empty() {
                    format!("<{z}b>")
                } else {
                    format!("<{inner},{z}b>")
                }
            }
        }
    }
}

fn check_in_a(g: &DicyclicGroup, h: &SubgroupA) -> Result<()> {
    if h.indices().iter().any(|&i| i >= g.order_a())
        || h.elements().iter().any(|x| !g.spec().contains(x))
    {
        return Err(Error::NotSubgroup(format!("{} is not inside A", h.label())));
    }
    Ok(())
}

/// All subgroups: the subgroups of `A` in canonical order, then for each
/// `H` containing `b^2` one `<H, zb>` per coset `Hz`.
pub fn enumerate_all_subgroups(g: &DicyclicGroup, cap: usize) -> Result<Vec<Subgroup>> {
    if g.order() > cap {
        return Err(Error::CapExceeded {
            what: "|G| for subgroup enumeration",
            size: g.order(),
            cap,
        });
    }
    let hs = enumerate_subgroups(g.spec(), cap / 2)?;
    let mut out: Vec<Subgroup> = hs
        .iter()
        .map(|h| Subgroup::type_a(g, h.clone()))
        .collect::<Result<_>>()?;
    for h in &hs {
        if !h.contains_idx(g.b_squared_idx()) {
            continue;
        }
        let (ids, n) = coset_ids(g.spec(), h);
        let mut first = vec![usize::MAX; n];
        for (x, &c) in ids.iter().enumerate() {
            if first[c] == usize::MAX {
                first[c] = x;
            }
        }
        for z in first {
            out.push(Subgroup::type_zb(g, h.clone(), &g.spec().element_at(z))?);
        }
    }
    Ok(out)
}

/// Right cosets `Kx` of `K` in `G`: coset id per element index (coset 0 is
/// `K`), plus the number of cosets.
pub fn right_coset_ids(g: &DicyclicGroup, k: &[usize]) -> (Vec<usize>, usize) {
    let mut id = vec![usize::MAX; g.order()];
    let mut next = 0;
    for x in 0..g.order() {
        if id[x] != usize::MAX {
            continue;
        }
        for &y in k {
            id[g.mul_idx(y, x)] = next;
        }
        next += 1;
    }
    (id, next)
}

/// Which of the four square-placement situations `H` is in. This single
/// split drives the `beta` grid bound, the closed form of `L(H)`, and the
/// square-freeness of translated transversals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareClause {
    /// `B u {b^2} <= H`
    AllSquaresInH,
    /// `B <= H`, `b^2 not in H`
    BInHB2Outside,
    /// `B not<= H`, `b^2 not in H u B`, `Hb^2 n B` nonempty
    B2Straddles,
    /// `B not<= H`, and `b^2 in H u B` or `Hb^2 n B` empty
    BNotInH,
}

impl SquareClause {
    pub fn eps_bar(self) -> u8 {
        match self {
            SquareClause::AllSquaresInH => 0,
            SquareClause::B2Straddles => 2,
            SquareClause::BInHB2Outside | SquareClause::BNotInH => 1,
        }
    }
}

pub fn square_clause(g: &DicyclicGroup, h: &SubgroupA) -> SquareClause {
    let b_in_h = g.b_subgroup().is_subset_of(h);
    let b2 = g.b_squared_idx();
    let b2_in_h = h.contains_idx(b2);
    if b_in_h {
        return if b2_in_h { SquareClause::AllSquaresInH } else { SquareClause::BInHB2Outside };
    }
    let b2_in_b = g.b_subgroup().contains_idx(b2);
    let straddles = h
        .indices()
        .iter()
        .any(|&x| g.b_subgroup().contains_idx(g.spec().add_idx(x, b2)));
    if !b2_in_h && !b2_in_b && straddles {
        SquareClause::B2Straddles
    } else {
        SquareClause::BNotInH
    }
}

/// The `eps_bar` used by the `beta` bound for subgroups of `A`: 0, 1 or 2.
pub fn eps_bar(g: &DicyclicGroup, h: &SubgroupA) -> u8 {
    square_clause(g, h).eps_bar()
}

/// The `eps_bar` used for `<H, zb>`: 0 iff `B <= H`.
pub fn eps_bar_zb(g: &DicyclicGroup, h: &SubgroupA) -> u8 {
    if g.b_subgroup().is_subset_of(h) {
        0
    } else {
        1
    }
}

/// The four-way split controlling which `alpha` are reachable with `S <= H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaClause {
    /// `m = l = 1`, `b^2 in H \ B`: even `alpha <= |H|/2 - 1`.
    B2OnlyInvolution,
    /// `b^2 in H \ B` otherwise: every `alpha <= (2^l - 1)u - 1`.
    B2InHOutsideB,
    /// `r = 0`, `b^2 not in H \ B`: even `alpha <= (2^l - 1)u`.
    NoFreeInvolution,
    /// `r > 0`, `b^2 not in H \ B`: every `alpha <= (2^l - 1)u`.
    FreeInvolution,
}

impl AlphaClause {
    pub fn number(self) -> u8 {
        match self {
            AlphaClause::B2OnlyInvolution => 1,
            AlphaClause::B2InHOutsideB => 2,
            AlphaClause::NoFreeInvolution => 3,
            AlphaClause::FreeInvolution => 4,
        }
    }
}

/// Intrinsic core numbers of `H <= A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreNumbers {
    pub order: usize,
    /// `l`, with `2^l = |H : H n B|`.
    pub l: u32,
    pub m: u32,
    pub r: u32,
    /// `|H n B| = |H| / 2^l`.
    pub unit: usize,
    pub b_in_h: bool,
    pub b2_in_h: bool,
    pub b2_in_b: bool,
}

impl CoreNumbers {
    pub fn b2_in_h_minus_b(&self) -> bool {
        self.b2_in_h && !self.b2_in_b
    }

    pub fn two_l(&self) -> usize {
        1 << self.l
    }

    pub fn alpha_clause(&self) -> AlphaClause {
        if self.b2_in_h_minus_b() {
            if self.m == 1 && self.l == 1 {
                AlphaClause::B2OnlyInvolution
            } else {
                AlphaClause::B2InHOutsideB
            }
        } else if self.r == 0 {
            AlphaClause::NoFreeInvolution
        } else {
            AlphaClause::FreeInvolution
        }
    }
}

fn log2_exact(n: usize) -> u32 {
    debug_assert!(n.is_power_of_two(), "{n} is not a power of two");
    n.trailing_zeros()
}

pub fn core_numbers(g: &DicyclicGroup, h: &SubgroupA) -> CoreNumbers {
    let b = g.b_subgroup();
    let ap = g.a_prime();
    let hb = h.intersection_count(b);
    let ha = h.intersection_count(ap);
    let hab = h.indices().iter().filter(|&&x| b.contains_idx(x) && ap.contains_idx(x)).count();
    let m = log2_exact(ha);
    let b2 = g.b_squared_idx();
    CoreNumbers {
        order: h.order(),
        l: log2_exact(h.order() / hb),
        m,
        r: m - log2_exact(hab),
        unit: hb,
        b_in_h: b.is_subset_of(h),
        b2_in_h: h.contains_idx(b2),
        b2_in_b: b.contains_idx(b2),
    }
}

/// Coordinate-projection versions of `L`, `T`, `m`, `r` (0-based factor
/// indices among the first `lambda`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionInvariants {
    pub l_set: Vec<usize>,
    pub t_set: Vec<usize>,
    pub m: u32,
    pub r: u32,
}

pub fn projection_invariants(g: &DicyclicGroup, h: &SubgroupA) -> ProjectionInvariants {
    let spec = g.spec();
    let (mut l_set, mut t_set) = (Vec::new(), Vec::new());
    let (mut m, mut r) = (0, 0);
    for i in 0..spec.lambda() {
        let image: BTreeSet<u32> = h.elements().iter().map(|x| x.exps()[i]).collect();
        let full = image.len() == spec.moduli()[i] as usize;
        if full {
            l_set.push(i);
            if i < spec.k() {
                r += 1;
            }
        } else {
            t_set.push(i);
        }
        if image.len() > 1 {
            m += 1;
        }
    }
    ProjectionInvariants { l_set, t_set, m, r }
}

/// `J`: the union of the cosets `Ha != H` with `Ha = Ha^-1` and no involution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JSet {
    pub elements: Vec<AbelianElement>,
    pub cosets: Vec<Vec<AbelianElement>>,
}

impl JSet {
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Coset ids (relative to [`coset_ids`]) of the cosets making up `J`.
pub fn j_coset_ids(g: &DicyclicGroup, h: &SubgroupA) -> Vec<usize> {
    let spec = g.spec();
    let (ids, n) = coset_ids(spec, h);
    let mut self_inverse = vec![false; n];
    let mut has_involution = vec![false; n];
    let mut rep = vec![usize::MAX; n];
    for x in 0..spec.order() {
        let c = ids[x];
        if rep[c] == usize::MAX {
            rep[c] = x;
            self_inverse[c] = ids[spec.neg_idx(x)] == c;
        }
        if g.a_prime().contains_idx(x) {
            has_involution[c] = true;
        }
    }
    (1..n).filter(|&c| self_inverse[c] && !has_involution[c]).collect()
}

pub fn compute_j(g: &DicyclicGroup, h: &SubgroupA) -> JSet {
    let spec = g.spec();
    let (ids, _) = coset_ids(spec, h);
    let js = j_coset_ids(g, h);
    let cosets: Vec<Vec<AbelianElement>> = js
        .iter()
        .map(|&c| {
            (0..spec.order())
                .filter(|&x| ids[x] == c)
                .map(|x| spec.element_at(x))
                .collect()
        })
        .collect();
    let mut elements: Vec<AbelianElement> = cosets.iter().flatten().cloned().collect();
    elements.sort();
    JSet { elements, cosets }
}

/// `L(K)`: fewest non-squares in any coset `Kx != K`. For `K = G` this is
/// `|G|` by convention.
pub fn script_l(g: &DicyclicGroup, k: &Subgroup) -> usize {
    if k.is_whole_group(g) {
        return k.order();
    }
    let (ids, n) = right_coset_ids(g, k.indices());
    let mut counts = vec![0usize; n];
    for x in 0..g.order() {
        if !g.is_square_idx(x) {
            counts[ids[x]] += 1;
        }
    }
    counts[1..].iter().copied().min().unwrap_or(0)
}

/// Closed form of `L(H)` for `H <= A`.
pub fn script_l_closed_form(c: &CoreNumbers, clause: SquareClause) -> usize {
    let off = (c.two_l() - 1) * c.unit;
    match clause {
        SquareClause::AllSquaresInH => c.order,
        SquareClause::BInHB2Outside => c.order - 1,
        SquareClause::B2Straddles => off - 1,
        SquareClause::BNotInH => off,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupInvariants {
    pub kind: SubgroupKind,
    pub label: String,
    pub order: usize,
    pub l: u32,
    pub m: u32,
    pub r: u32,
    pub h_unit: usize,
    pub b_in_h: bool,
    pub b2_in_h_minus_b: bool,
    pub eps_bar: u8,
    pub square_clause: SquareClause,
    pub alpha_clause: AlphaClause,
    pub case_label: String,
    pub script_l: usize,
    pub j: JSet,
    pub projection: ProjectionInvariants,
    /// Whether the projection numbers agree with the intrinsic ones.
    pub projection_agrees: bool,
}

/// Case label of the region rule that applies to `k`.
pub fn case_label(g: &DicyclicGroup, k: &Subgroup) -> String {
    let c = core_numbers(g, k.h());
    match k.kind() {
        SubgroupKind::TypeA => format!("A({})", c.alpha_clause().number()),
        SubgroupKind::TypeZb if k.is_whole_group(g) => "zb(whole)".to_string(),
        SubgroupKind::TypeZb => {
            let n = match (c.b2_in_h_minus_b(), c.m > c.l, c.r > 0) {
                (true, true, _) => 1,
                (true, false, _) => 2,
                (false, true, false) => 3,
                (false, true, true) => 4,
                (false, false, _) => 5,
            };
            format!("zb({n})")
        }
    }
}

pub fn subgroup_invariants(g: &DicyclicGroup, k: &Subgroup) -> SubgroupInvariants {
    let h = k.h();
    let c = core_numbers(g, h);
    let proj = projection_invariants(g, h);
    let clause = square_clause(g, h);
    let agrees = proj.l_set.len() as u32 == c.l && proj.m == c.m && proj.r == c.r;
    SubgroupInvariants {
        kind: k.kind(),
        label: k.label(),
        order: k.order(),
        l: c.l,
        m: c.m,
        r: c.r,
        h_unit: c.unit,
        b_in_h: c.b_in_h,
        b2_in_h_minus_b: c.b2_in_h_minus_b(),
        eps_bar: match k.kind() {
            SubgroupKind::TypeA => clause.eps_bar(),
            SubgroupKind::TypeZb => eps_bar_zb(g, h),
        },
        square_clause: clause,
        alpha_clause: c.alpha_clause(),
        case_label: case_label(g, k),
        script_l: script_l(g, k),
        j: compute_j(g, h),
        projection: proj,
        projection_agrees: agrees,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{normalize_spec, subgroup_closure};
    use crate::group::make_group;

    fn grp(orders: &[u64], b2: &[i64]) -> DicyclicGroup {
        let spec = normalize_spec(orders).unwrap();
        let b2 = spec.from_user_coords(b2).unwrap();
        make_group(spec, b2).unwrap()
    }

    fn h_of(g: &DicyclicGroup, gens: &[&[i64]]) -> SubgroupA {
        let gens: Vec<_> = gens.iter().map(|v| g.spec().element(v).unwrap()).collect();
        subgroup_closure(g.spec(), &gens)
    }

    #[test]
    fn q8_has_six_subgroups() {
        let g = grp(&[4], &[2]);
        let all = enumerate_all_subgroups(&g, DEFAULT_SUBGROUP_CAP_G).unwrap();
        assert_eq!(all.len(), 6);
        assert_eq!(all.iter().filter(|k| k.kind() == SubgroupKind::TypeA).count(), 3);
        let zb: Vec<String> = all
            .iter()
            .filter(|k| k.kind() == SubgroupKind::TypeZb)
            .map(|k| k.label())
            .collect();
        assert_eq!(zb, ["<[2],[0]b>", "<[2],[1]b>", "<[1],[0]b>"]);
        assert!(all.last().unwrap().is_whole_group(&g));
    }

    #[test]
    fn zb_needs_b2_in_h() {
        let g = grp(&[4], &[2]);
        let triv = h_of(&g, &[]);
        assert!(Subgroup::type_zb(&g, triv, &g.spec().identity()).is_err());
    }

    #[test]
    fn zb_normalizes_z() {
        let g = grp(&[4], &[2]);
        let h = h_of(&g, &[&[2]]);
        let k1 = Subgroup::type_zb(&g, h.clone(), &g.spec().element(&[3]).unwrap()).unwrap();
        let k2 = Subgroup::type_zb(&g, h, &g.spec().element(&[1]).unwrap()).unwrap();
        assert_eq!(k1, k2);
        assert_eq!(k1.z().unwrap().exps(), &[1]);
    }

    #[test]
    fn q8_invariants() {
        let g = grp(&[4], &[2]);
        let inv = |gens: &[&[i64]]| {
            let k = Subgroup::type_a(&g, h_of(&g, gens)).unwrap();
            subgroup_invariants(&g, &k)
        };
        let a = inv(&[&[1]]);
        assert_eq!((a.projection.l_set.clone(), a.m, a.r, a.h_unit), (vec![0], 1, 0, 2));
        assert!(!a.b2_in_h_minus_b);
        assert_eq!(a.eps_bar, 0);
        assert_eq!(a.script_l, 4);
        assert!(a.j.is_empty());

        let a2 = inv(&[&[2]]);
        assert_eq!((a2.l, a2.m, a2.r, a2.h_unit, a2.eps_bar), (0, 1, 0, 2, 0));
        assert_eq!(a2.script_l, 2);
        let z4 = |x: i64| g.spec().element(&[x]).unwrap();
        assert_eq!(a2.j.elements, vec![z4(1), z4(3)]);

        let e = inv(&[]);
        assert_eq!((e.l, e.m, e.r, e.h_unit, e.eps_bar), (0, 0, 0, 1, 1));
        assert_eq!(e.script_l, 0);
    }

    #[test]
    fn j_is_empty_when_m_equals_l() {
        let g = grp(&[2, 4], &[0, 2]);
        let h = h_of(&g, &[&[0, 1]]);
        let c = core_numbers(&g, &h);
        assert_eq!(c.m, c.l);
        assert!(compute_j(&g, &h).is_empty());
    }

    #[test]
    fn non_aligned_subgroup_is_flagged() {
        let g = grp(&[2, 4], &[0, 2]);
        let h = h_of(&g, &[&[1, 1]]);
        let k = Subgroup::type_a(&g, h).unwrap();
        let inv = subgroup_invariants(&g, &k);
        assert_eq!((inv.l, inv.m, inv.r, inv.h_unit), (1, 1, 0, 2));
        assert_eq!(inv.projection.l_set, vec![0, 1]);
        assert!(!inv.projection_agrees);
    }

    #[test]
    fn script_l_matches_closed_form_small() {
        for (o, b2) in [(&[4u64][..], &[2i64][..]), (&[2, 4], &[1, 0]), (&[12], &[6])] {
            let g = grp(o, b2);
            for h in enumerate_subgroups(g.spec(), 64).unwrap() {
                let k = Subgroup::type_a(&g, h.clone()).unwrap();
                let c = core_numbers(&g, &h);
                assert_eq!(script_l(&g, &k), script_l_closed_form(&c, square_clause(&g, &h)));
            }
        }
    }
}
