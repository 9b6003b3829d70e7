//! Witness connection sets for feasible `(alpha, beta)`.
//!
//! A witness is assembled from up to three disjoint parts: a piece inside
//! `H` (sets the `alpha` contributed by `A`), a piece in `A \ H` or spread
//! over translated transversals (sets `beta` on the `A`-cosets), and a union
//! of `B`-coset classes in `Ab`. Every emitted set is re-validated and its
//! profile recomputed before it is returned.
//!
//! The `Ab` pieces are organised by a [`QuotientFrame`]: `A/B` is an
//! elementary abelian 2-group, `V` is the image of `H` in it, and `W` is a
//! fixed complement, so the `Ab` classes `B x b` are grouped into blocks
//! `(v + W) b` that meet each coset `Hyb` in exactly `|H n B|` elements.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::abelian::{coset_ids, AbelianElement, SubgroupA};
use crate::graph::{subgroup_profile_counts, Profile, RegularityPair};
use crate::error::{Error, Result};
use crate::group::{connection_set_from_indices, ConnectionSet, DicyclicGroup, GroupElement};
use crate::oracle::{
    alpha_only_set, beta_only_set_h, composed_region, zb_ab_pairs, zb_beta_in_a,
};
use crate::subgroup::{
    core_numbers, j_coset_ids, square_clause, AlphaClause, SquareClause, Subgroup, SubgroupKind,
};

/// One representative per coset of `H` in `A`, chosen so that
/// `I \ J` is inverse-closed and square-meeting cosets get square reps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transversal {
    /// Representative (as an `A`-index) of each coset, by coset id.
    reps: Vec<usize>,
    j_cosets: Vec<usize>,
}

impl Transversal {
    pub fn rep_indices(&self) -> &[usize] {
        &self.reps
    }

    pub fn reps(&self, g: &DicyclicGroup) -> Vec<AbelianElement> {
        let mut v: Vec<AbelianElement> = self.reps.iter().map(|&i| g.spec().element_at(i)).collect();
        v.sort();
        v
    }

    /// `I \ {e}`, sorted.
    pub fn without_identity(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.reps[1..].to_vec();
        v.sort_unstable();
        v
    }

    /// `I \ (J u {e})`, sorted.
    pub fn without_j(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (1..self.reps.len())
            .filter(|c| self.j_cosets.binary_search(c).is_err())
            .map(|c| self.reps[c])
            .collect();
        v.sort_unstable();
        v
    }
}

pub fn build_transversal(g: &DicyclicGroup, h: &SubgroupA) -> Result<Transversal> {
    let spec = g.spec();
    let (ids, n) = coset_ids(spec, h);
    let mut members = vec![Vec::new(); n];
    for x in 0..spec.order() {
        members[ids[x]].push(x);
    }
    let ap = g.a_prime();
    let mut reps = vec![usize::MAX; n];
    reps[0] = 0;
    for c in 1..n {
        if reps[c] != usize::MAX {
            continue;
        }
        let elems = &members[c];
        let inv_c = ids[spec.neg_idx(elems[0])];
        let first_square = elems.iter().copied().find(|&x| g.is_square_a(x));
        if inv_c != c {
            let x = first_square.unwrap_or(elems[0]);
            reps[c] = x;
            reps[inv_c] = spec.neg_idx(x);
            continue;
        }
        let inv_elems: Vec<usize> = elems.iter().copied().filter(|&x| ap.contains_idx(x)).collect();
        reps[c] = if inv_elems.is_empty() {
            first_square.unwrap_or(elems[0])
        } else if first_square.is_some() {
            inv_elems
                .iter()
                .copied()
                .find(|&x| g.is_square_a(x))
                .ok_or_else(|| {
                    unavailable(format!(
                        "coset of {} meets A' and Sq(G) but not their intersection",
                        spec.element_at(elems[0])
                    ))
                })?
        } else {
            inv_elems[0]
        };
    }
    Ok(Transversal { reps, j_cosets: j_coset_ids(g, h) })
}

/// Check every transversal invariant; returns a description of the first
/// violation.
pub fn check_transversal(g: &DicyclicGroup, h: &SubgroupA, t: &Transversal) -> Result<()> {
    let spec = g.spec();
    let (ids, n) = coset_ids(spec, h);
    let fail = |m: String| Err(Error::Internal(m));
    if t.reps.len() != n || t.reps[0] != 0 {
        return fail("wrong shape or identity missing".into());
    }
    for (c, &x) in t.reps.iter().enumerate() {
        if ids[x] != c {
            return fail(format!("rep {} not in its coset", spec.element_at(x)));
        }
    }
    let mut meets_sq = vec![false; n];
    let mut meets_ap = vec![false; n];
    for x in 0..spec.order() {
        meets_sq[ids[x]] |= g.is_square_a(x);
        meets_ap[ids[x]] |= g.a_prime().contains_idx(x);
    }
    for c in 0..n {
        let x = t.reps[c];
        if meets_sq[c] && !g.is_square_a(x) {
            return fail(format!("coset of {} meets Sq(G) but rep is not square", spec.element_at(x)));
        }
        let self_inv = ids[spec.neg_idx(x)] == c;
        if c > 0 && self_inv && meets_ap[c] && !g.a_prime().contains_idx(x) {
            return fail(format!("self-inverse coset of {} has rep outside A'", spec.element_at(x)));
        }
    }
    let core: BTreeSet<usize> = t.without_j().into_iter().chain([0]).collect();
    if core.iter().any(|&x| !core.contains(&spec.neg_idx(x))) {
        return fail("I \\ J is not inverse-closed".into());
    }
    Ok(())
}

/// `A/B` with the image `V` of `H` and a complement `W`.
#[derive(Clone, Debug)]
pub struct QuotientFrame {
    bcoset_of: Vec<usize>,
    bcosets: Vec<Vec<usize>>,
    v: Vec<usize>,
    w: Vec<usize>,
}

impl QuotientFrame {
    pub fn new(g: &DicyclicGroup, h: &SubgroupA) -> Self {
        let spec = g.spec();
        let (bcoset_of, nq) = coset_ids(spec, g.b_subgroup());
        let mut bcosets = vec![Vec::new(); nq];
        for x in 0..spec.order() {
            bcosets[bcoset_of[x]].push(x);
        }
        let v: Vec<usize> = h
            .indices()
            .iter()
            .map(|&x| bcoset_of[x])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut frame = QuotientFrame { bcoset_of, bcosets, v, w: vec![0] };
        let mut covered = vec![false; nq];
        for &q in &frame.v {
            covered[q] = true;
        }
        for q in 0..nq {
            if covered[q] {
                continue;
            }
            let shifted: Vec<usize> = frame.w.iter().map(|&w| frame.add(g, w, q)).collect();
            frame.w.extend(shifted);
            for &w in &frame.w {
                for &v in &frame.v {
                    covered[frame.add(g, v, w)] = true;
                }
            }
        }
        frame.w.sort_unstable();
        frame
    }

    fn add(&self, g: &DicyclicGroup, p: usize, q: usize) -> usize {
        self.bcoset_of[g.spec().add_idx(self.bcosets[p][0], self.bcosets[q][0])]
    }

    pub fn bcoset_of(&self, x: usize) -> usize {
        self.bcoset_of[x]
    }

    pub fn bcoset(&self, q: usize) -> &[usize] {
        &self.bcosets[q]
    }

    /// `B`-cosets meeting `H`, ascending; `v[0]` is `B` itself.
    pub fn v(&self) -> &[usize] {
        &self.v
    }

    pub fn w(&self) -> &[usize] {
        &self.w
    }

    /// `A`-indices of `U_{w in W} B(v + w)`.
    pub fn block(&self, g: &DicyclicGroup, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .w
            .iter()
            .flat_map(|&w| self.bcosets[self.add(g, v, w)].iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    /// `{a'}` with `a'` an involution.
    Involution,
    /// `{a, a^-1}`.
    InversePair,
    /// `I' x` for a translation `x in H`.
    TranslatedTransversal,
    /// `I' a u I' a^-1`.
    TranslatedPair,
    /// `{y, y^-1}` inside a coset of `J`.
    JCosetPair,
    /// A single class `B x b`.
    BCosetClass,
    /// `U_{w} B(v + w) b`.
    Block,
    /// `G \ H`.
    Complement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub kind: PieceKind,
    pub elements: Vec<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionRecipe {
    pub case_id: String,
    /// Parity `(1 - (-1)^n) / 2` of the count this recipe targets.
    pub sigma_parity: u8,
    /// `1` iff `m = r`.
    pub delta_mr: u8,
    pub pieces: Vec<Piece>,
}

/// A constructed part: its element indices plus the recipe that made it.
#[derive(Clone, Debug)]
pub struct Part {
    pub indices: Vec<usize>,
    pub recipe: ConstructionRecipe,
}

impl Part {
    pub fn connection_set(&self, g: &DicyclicGroup) -> ConnectionSet {
        connection_set_from_indices(g, self.indices.clone())
    }
}

struct Builder<'g> {
    g: &'g DicyclicGroup,
    case_id: String,
    sigma: u8,
    delta: u8,
    pieces: Vec<(PieceKind, Vec<usize>)>,
}

impl<'g> Builder<'g> {
    fn new(g: &'g DicyclicGroup, case_id: impl Into<String>, target: usize, delta: bool) -> Self {
        Builder { g, case_id: case_id.into(), sigma: (target % 2) as u8, delta: delta as u8, pieces: Vec::new() }
    }

    fn push_a(&mut self, kind: PieceKind, a_idx: impl IntoIterator<Item = usize>) {
        self.pieces.push((kind, a_idx.into_iter().collect()));
    }

    fn push_ab(&mut self, kind: PieceKind, a_idx: impl IntoIterator<Item = usize>) {
        let n = self.g.order_a();
        self.pieces.push((kind, a_idx.into_iter().map(|x| n + x).collect()));
    }

    fn finish(self) -> Result<Part> {
        let mut all: Vec<usize> = self.pieces.iter().flat_map(|(_, v)| v.iter().copied()).collect();
        let total = all.len();
        all.sort_unstable();
        all.dedup();
        if all.len() != total {
            return Err(Error::Internal(format!("{}: pieces overlap", self.case_id)));
        }
        let g = self.g;
        Ok(Part {
            indices: all,
            recipe: ConstructionRecipe {
                case_id: self.case_id,
                sigma_parity: self.sigma,
                delta_mr: self.delta,
                pieces: self
                    .pieces
                    .into_iter()
                    .map(|(kind, mut v)| {
                        v.sort_unstable();
                        Piece { kind, elements: v.into_iter().map(|i| g.element_at(i)).collect() }
                    })
                    .collect(),
            },
        })
    }
}

fn unavailable(what: impl Into<String>) -> Error {
    Error::RecipeUnavailable(what.into())
}

/// `{a, a^-1}` pairs with `a < a^-1` drawn from `pool`, in order.
fn inverse_pairs(g: &DicyclicGroup, pool: impl IntoIterator<Item = usize>) -> Vec<(usize, usize)> {
    pool.into_iter()
        .filter_map(|a| {
            let inv = g.spec().neg_idx(a);
            (a < inv).then_some((a, inv))
        })
        .collect()
}

/// Count of singles minus what is available, or the number of pairs
/// needed; fails with a diagnostic if the arithmetic does not work out.
fn split_counts(
    case: &str,
    target: usize,
    singles: i64,
    singles_avail: usize,
    pairs_avail: usize,
) -> Result<(usize, usize)> {
    if singles < 0 || singles as usize > target || singles as usize > singles_avail {
        return Err(unavailable(format!(
            "{case}: needs {singles} involution pieces for target {target}, {singles_avail} available"
        )));
    }
    let rest = target - singles as usize;
    if rest % 2 == 1 || rest / 2 > pairs_avail {
        return Err(unavailable(format!(
            "{case}: remaining {rest} cannot be filled by inverse pairs ({pairs_avail} available)"
        )));
    }
    Ok((singles as usize, rest / 2))
}

fn pow2(e: u32) -> i64 {
    1i64 << e
}

fn sigma(n: usize) -> i64 {
    (n % 2) as i64
}

fn sign(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `S <= H` with `|S| = alpha`: involution singletons and inverse pairs.
pub fn construct_alpha0(g: &DicyclicGroup, h: &SubgroupA, alpha: usize) -> Result<Part> {
    if !alpha_only_set(g, h).contains(&alpha) {
        return Err(Error::Infeasible { subgroup: h.label(), alpha, beta: 0 });
    }
    let c = core_numbers(g, h);
    let b = g.b_subgroup();
    let ap = g.a_prime();
    let b2 = g.b_squared_idx();
    let inv_pool: Vec<usize> = h
        .indices()
        .iter()
        .copied()
        .filter(|&x| ap.contains_idx(x) && !b.contains_idx(x) && x != b2)
        .collect();
    let pair_pool = inverse_pairs(
        g,
        h.indices().iter().copied().filter(|&x| !ap.contains_idx(x) && !b.contains_idx(x)),
    );
    let delta = c.m == c.r;
    let d = delta as i64;
    let free = pow2(c.m) - pow2(c.m - c.r);
    let (case, singles) = match c.alpha_clause() {
        AlphaClause::B2OnlyInvolution => ("alpha/pairs-b2", 0),
        AlphaClause::NoFreeInvolution => ("alpha/pairs", 0),
        AlphaClause::B2InHOutsideB if (alpha as i64) < free => ("alpha/b2-singles", alpha as i64),
        AlphaClause::B2InHOutsideB => (
            "alpha/b2-mixed",
            free - 2 + sigma(alpha) + sign(alpha) * d,
        ),
        AlphaClause::FreeInvolution if (alpha as i64) <= free => ("alpha/singles", alpha as i64),
        AlphaClause::FreeInvolution => (
            "alpha/mixed",
            free - sigma(alpha) - sign(alpha) * d,
        ),
    };
    let (ns, np) = split_counts(case, alpha, singles, inv_pool.len(), pair_pool.len())?;
    let mut bld = Builder::new(g, case, alpha, delta);
    for &x in &inv_pool[..ns] {
        bld.push_a(PieceKind::Involution, [x]);
    }
    for &(x, y) in &pair_pool[..np] {
        bld.push_a(PieceKind::InversePair, [x, y]);
    }
    bld.finish()
}

/// `count` inverse pairs of non-squares inside every coset of `J`.
fn push_j_pairs(bld: &mut Builder<'_>, h: &SubgroupA, count: usize) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    let g = bld.g;
    let (ids, _) = coset_ids(g.spec(), h);
    for c in j_coset_ids(g, h) {
        let pool = inverse_pairs(
            g,
            (0..g.order_a()).filter(|&x| ids[x] == c && !g.is_square_a(x)),
        );
        if pool.len() < count {
            return Err(unavailable(format!(
                "{}: J-coset of {} has {} non-square pairs, {count} needed",
                bld.case_id,
                g.spec().element_at(pool.first().map_or(0, |p| p.0)),
                pool.len()
            )));
        }
        for &(x, y) in &pool[..count] {
            bld.push_a(PieceKind::JCosetPair, [x, y]);
        }
    }
    Ok(())
}

/// `S n H = {}` with `H` a `(0, beta)`-regular set.
pub fn construct_0beta_h(g: &DicyclicGroup, h: &SubgroupA, beta: usize) -> Result<Part> {
    if !beta_only_set_h(g, h).contains(&beta) {
        return Err(Error::Infeasible { subgroup: h.label(), alpha: 0, beta });
    }
    let c = core_numbers(g, h);
    let clause = square_clause(g, h);
    let t = beta / c.unit;
    let delta = c.m == c.r;
    if t == c.two_l() {
        // only reachable when every square lies in H
        let mut bld = Builder::new(g, "beta/complement", beta, delta);
        let rest: Vec<usize> = (0..g.order()).filter(|&x| x >= g.order_a() || !h.contains_idx(x)).collect();
        bld.pieces.push((PieceKind::Complement, rest));
        return bld.finish();
    }
    let mut bld = Builder::new(g, "beta/blocks", beta, delta);
    if t == 0 {
        return bld.finish();
    }
    let frame = QuotientFrame::new(g, h);
    let b2_coset = frame.bcoset_of(g.b_squared_idx());
    let candidates: Vec<usize> = frame.v()[1..]
        .iter()
        .copied()
        .filter(|&v| clause != SquareClause::B2Straddles || v != b2_coset)
        .collect();
    if candidates.len() < t {
        return Err(unavailable(format!(
            "beta/blocks: t = {t} blocks needed, {} available",
            candidates.len()
        )));
    }
    let chosen = &candidates[..t];
    for &v in chosen {
        bld.push_ab(PieceKind::Block, frame.block(g, v));
    }
    let n_ab = bld.pieces.len();
    let via_transversal = (|| {
        let tr = build_transversal(g, h)?;
        let core = tr.without_j();
        let spec = g.spec();
        for &v in chosen {
            for &x in h.indices().iter().filter(|&&x| frame.bcoset_of(x) == v) {
                bld.push_a(PieceKind::TranslatedTransversal, core.iter().map(|&i| spec.add_idx(i, x)));
            }
        }
        if (t * c.unit) % 2 == 1 && !tr.j_cosets.is_empty() {
            return Err(unavailable("beta/blocks: odd count on a J-coset"));
        }
        push_j_pairs(&mut bld, h, t * c.unit / 2)
    })();
    let a_part: Vec<usize> = bld.pieces[n_ab..].iter().flat_map(|(_, v)| v.iter().copied()).collect();
    match via_transversal {
        Ok(()) if a_part_is_balanced(g, h, &a_part, t * c.unit) => {}
        Ok(()) | Err(Error::RecipeUnavailable(_)) => {
            bld.pieces.truncate(n_ab);
            bld.case_id = "beta/blocks+balanced".into();
            bld.pieces.extend(balanced_a_part(g, h, t * c.unit)?);
        }
        Err(e) => return Err(e),
    }
    bld.finish()
}

/// Is `s` a normal square-free subset of `A \ H` meeting every coset
/// `Hx != H` in exactly `count` elements?
fn a_part_is_balanced(g: &DicyclicGroup, h: &SubgroupA, s: &[usize], count: usize) -> bool {
    let spec = g.spec();
    let (ids, n) = coset_ids(spec, h);
    let mut member = vec![false; spec.order()];
    let mut per = vec![0usize; n];
    for &x in s {
        if x >= spec.order() || g.is_square_a(x) || std::mem::replace(&mut member[x], true) {
            return false;
        }
        per[ids[x]] += 1;
    }
    s.iter().all(|&x| member[spec.neg_idx(x)]) && per[0] == 0 && per[1..].iter().all(|&k| k == count)
}

/// Exact fallback for a part inside `A \ H`: `count` elements in every
/// coset `Hx != H` of `H` in `A`, chosen orbit by orbit under inversion.
/// Cosets with `C != C^-1` take inverse pairs straddling `C` and `C^-1`; a
/// self-inverse coset takes as many inverse pairs as fit, then involutions.
/// Fails only when no normal square-free set with these counts exists.
pub fn balanced_a_part(
    g: &DicyclicGroup,
    h: &SubgroupA,
    count: usize,
) -> Result<Vec<(PieceKind, Vec<usize>)>> {
    let spec = g.spec();
    let (ids, n) = coset_ids(spec, h);
    let mut members = vec![Vec::new(); n];
    for x in (0..spec.order()).filter(|&x| !g.is_square_a(x)) {
        members[ids[x]].push(x);
    }
    let mut out = Vec::new();
    for (c, mem) in members.iter().enumerate().skip(1) {
        let Some(&first) = mem.first() else {
            if count > 0 {
                return Err(unavailable(format!("balanced: a coset of {} has no non-squares", h.label())));
            }
            continue;
        };
        let inv_c = ids[spec.neg_idx(first)];
        if inv_c < c {
            continue;
        }
        let short = || unavailable(format!("balanced: coset of {} cannot hold {count}", spec.element_at(first)));
        if inv_c != c {
            if mem.len() < count {
                return Err(short());
            }
            out.extend(mem[..count].iter().map(|&y| (PieceKind::InversePair, vec![y, spec.neg_idx(y)])));
            continue;
        }
        let invs: Vec<usize> = mem.iter().copied().filter(|&y| spec.neg_idx(y) == y).collect();
        let pairs = inverse_pairs(g, mem.iter().copied());
        let np = pairs.len().min(count / 2);
        let ni = count - 2 * np;
        if ni > invs.len() {
            return Err(short());
        }
        out.extend(pairs[..np].iter().map(|&(x, y)| (PieceKind::InversePair, vec![x, y])));
        out.extend(invs[..ni].iter().map(|&x| (PieceKind::Involution, vec![x])));
    }
    Ok(out)
}

fn require_b2(g: &DicyclicGroup, h: &SubgroupA) -> Result<()> {
    if h.contains_idx(g.b_squared_idx()) {
        Ok(())
    } else {
        Err(Error::NotSubgroup(format!("<H,zb> needs b^2 in H = {}", h.label())))
    }
}

/// `S <= Ab` with `<H,zb>` a `(t'u, tu)`-regular set.
pub fn construct_zb_ab(
    g: &DicyclicGroup,
    h: &SubgroupA,
    z: &AbelianElement,
    t_prime: usize,
    t: usize,
) -> Result<Part> {
    require_b2(g, h)?;
    g.spec().check(z)?;
    let c = core_numbers(g, h);
    let pair = RegularityPair::new(t_prime * c.unit, t * c.unit);
    if !zb_ab_pairs(g, h).contains(&pair) {
        return Err(Error::Infeasible { subgroup: h.label(), alpha: pair.alpha, beta: pair.beta });
    }
    let frame = QuotientFrame::new(g, h);
    let delta = c.m == c.r;
    if c.b_in_h {
        let mut bld = Builder::new(g, "zb-ab/b-in-h", t_prime + t, delta);
        let (ids, n) = coset_ids(g.spec(), h);
        let cz = ids[g.spec().index_of(z)];
        for coset in 0..n {
            let want = if coset == cz { t_prime } else { t };
            let qs: BTreeSet<usize> = (0..g.order_a())
                .filter(|&x| ids[x] == coset)
                .map(|x| frame.bcoset_of(x))
                .collect();
            for q in qs.into_iter().take(want) {
                bld.push_ab(PieceKind::BCosetClass, frame.bcoset(q).iter().copied());
            }
        }
        bld.finish()
    } else {
        let mut bld = Builder::new(g, "zb-ab/blocks", t, delta);
        for &v in &frame.v()[..t] {
            bld.push_ab(PieceKind::Block, frame.block(g, v));
        }
        bld.finish()
    }
}

/// `S <= A \ H` with `<H,zb>` a `(0, zeta)`-regular set.
pub fn construct_zb_0beta_in_a(
    g: &DicyclicGroup,
    h: &SubgroupA,
    z: &AbelianElement,
    zeta: usize,
) -> Result<Part> {
    require_b2(g, h)?;
    g.spec().check(z)?;
    if !zb_beta_in_a(g, h).contains(&zeta) {
        return Err(Error::Infeasible { subgroup: h.label(), alpha: 0, beta: zeta });
    }
    let c = core_numbers(g, h);
    let delta = c.m == c.r;
    if zeta == 0 {
        return Builder::new(g, "zb-a/empty", 0, delta).finish();
    }
    match zb_a_recipe(g, h, zeta) {
        Ok(part) if a_part_is_balanced(g, h, &part.indices, zeta) => Ok(part),
        Ok(_) | Err(Error::RecipeUnavailable(_)) => {
            let mut bld = Builder::new(g, "zb-a/balanced", zeta, delta);
            bld.pieces = balanced_a_part(g, h, zeta)?;
            bld.finish()
        }
        Err(e) => Err(e),
    }
}

fn zb_a_recipe(g: &DicyclicGroup, h: &SubgroupA, zeta: usize) -> Result<Part> {
    let c = core_numbers(g, h);
    let delta = c.m == c.r;
    let spec = g.spec();
    let b = g.b_subgroup();
    let ap = g.a_prime();
    let tr = build_transversal(g, h)?;
    let with_j = c.m > c.l;
    let base = if with_j { tr.without_j() } else { tr.without_identity() };

    let singles_pool: Vec<usize> = h
        .indices()
        .iter()
        .copied()
        .filter(|&x| ap.contains_idx(x) && (c.b_in_h || !b.contains_idx(x)))
        .collect();
    let pair_pool = inverse_pairs(
        g,
        h.indices()
            .iter()
            .copied()
            .filter(|&x| !ap.contains_idx(x) && (c.b_in_h || !b.contains_idx(x))),
    );
    let thr = if c.b_in_h { pow2(c.m) } else { pow2(c.m) - pow2(c.m - c.r) };
    let z_i = zeta as i64;
    let d = delta as i64;
    let (case, singles) = match (c.b_in_h, with_j, z_i <= thr) {
        (true, false, true) => ("zb-a/1", z_i),
        (true, false, false) => ("zb-a/2", thr - sigma(zeta)),
        (false, false, true) => ("zb-a/3", z_i),
        (false, false, false) => ("zb-a/4", thr - sigma(zeta) - sign(zeta) * d),
        (true, true, true) => ("zb-a/5", z_i),
        (true, true, false) => ("zb-a/6", thr),
        (false, true, true) => ("zb-a/7", z_i),
        (false, true, false) => ("zb-a/8", thr),
    };
    let (ns, np) = split_counts(case, zeta, singles, singles_pool.len(), pair_pool.len())?;
    let mut bld = Builder::new(g, case, zeta, delta);
    let translate = |x: usize| base.iter().map(move |&i| spec.add_idx(i, x));
    for &x in &singles_pool[..ns] {
        bld.push_a(PieceKind::TranslatedTransversal, translate(x));
    }
    for &(x, y) in &pair_pool[..np] {
        bld.push_a(PieceKind::TranslatedPair, translate(x).chain(translate(y)));
    }
    if with_j {
        push_j_pairs(&mut bld, h, zeta / 2)?;
    }
    bld.finish()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionPlan {
    pub eta: usize,
    pub zeta: usize,
    pub t_prime: usize,
    pub t: usize,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub subgroup: Subgroup,
    pub pair: RegularityPair,
    pub set: ConnectionSet,
    pub plan: Option<DecompositionPlan>,
    pub recipes: Vec<ConstructionRecipe>,
}

fn assemble(
    g: &DicyclicGroup,
    k: &Subgroup,
    pair: RegularityPair,
    parts: Vec<Part>,
    plan: Option<DecompositionPlan>,
) -> Result<Witness> {
    let total: usize = parts.iter().map(|p| p.indices.len()).sum();
    let idx: Vec<usize> = parts.iter().flat_map(|p| p.indices.iter().copied()).collect();
    let set = connection_set_from_indices(g, idx);
    if set.len() != total {
        return Err(Error::Internal(format!("{}: component supports overlap", k.label())));
    }
    set.require_valid()
        .map_err(|e| Error::Internal(format!("{} {pair}: emitted set invalid: {e}", k.label())))?;
    match subgroup_profile_counts(g, set.indices(), k) {
        Profile::Regular { alpha, beta, .. } if RegularityPair::new(alpha, beta) == pair => Ok(Witness {
            subgroup: k.clone(),
            pair,
            set,
            plan,
            recipes: parts.into_iter().map(|p| p.recipe).collect(),
        }),
        other => Err(Error::Internal(format!(
            "{} {pair}: emitted set has profile {other:?}",
            k.label()
        ))),
    }
}

/// Build and verify a witness for `(alpha, beta)` on `k`.
///
/// For `<H,zb>` every decomposition `(eta, zeta, t', t)` is tried in
/// lexicographic order and the first one whose parts build and verify wins;
/// the chosen plan is recorded in the witness.
pub fn construct_s(g: &DicyclicGroup, k: &Subgroup, alpha: usize, beta: usize) -> Result<Witness> {
    let pair = RegularityPair::new(alpha, beta);
    let infeasible = || Error::Infeasible { subgroup: k.label(), alpha, beta };
    if pair.is_zero() || !composed_region(g, k).pairs.contains(&pair) {
        return Err(infeasible());
    }
    let h = k.h();
    if k.kind() == SubgroupKind::TypeA {
        let parts = vec![construct_alpha0(g, h, alpha)?, construct_0beta_h(g, h, beta)?];
        return assemble(g, k, pair, parts, None);
    }
    let c = core_numbers(g, h);
    let z = k.z().cloned().unwrap_or_else(|| g.spec().identity());
    let whole = k.is_whole_group(g);
    let etas = alpha_only_set(g, h);
    let zetas = if whole { BTreeSet::from([0]) } else { zb_beta_in_a(g, h) };
    let ab = zb_ab_pairs(g, h);
    let mut failures = Vec::new();
    for &eta in etas.range(..=alpha) {
        for &zeta in zetas.range(..=beta) {
            let (ra, rb) = (alpha - eta, beta - zeta);
            if ra % c.unit != 0 || rb % c.unit != 0 {
                continue;
            }
            let (t_prime, t) = (ra / c.unit, rb / c.unit);
            if !ab.contains(&RegularityPair::new(ra, rb)) {
                continue;
            }
            let plan = DecompositionPlan { eta, zeta, t_prime, t };
            let attempt = (|| {
                let parts = vec![
                    construct_alpha0(g, h, eta)?,
                    construct_zb_0beta_in_a(g, h, &z, zeta)?,
                    construct_zb_ab(g, h, &z, t_prime, t)?,
                ];
                assemble(g, k, pair, parts, Some(plan))
            })();
            match attempt {
                Ok(w) => return Ok(w),
                Err(e) => failures.push(format!("plan {plan:?}: {e}")),
            }
        }
    }
    if failures.is_empty() {
        return Err(infeasible());
    }
    Err(unavailable(format!("{} {pair}: {}", k.label(), failures.join("; "))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{normalize_spec, subgroup_closure};
    use crate::group::make_group;

    fn q8() -> DicyclicGroup {
        let spec = normalize_spec(&[4]).unwrap();
        let b2 = spec.element(&[2]).unwrap();
        make_group(spec, b2).unwrap()
    }

    fn h(g: &DicyclicGroup, gens: &[&[i64]]) -> SubgroupA {
        let gens: Vec<_> = gens.iter().map(|x| g.spec().element(x).unwrap()).collect();
        subgroup_closure(g.spec(), &gens)
    }

    fn ge(g: &DicyclicGroup, a: i64, f: bool) -> GroupElement {
        GroupElement::new(g.spec().element(&[a]).unwrap(), f)
    }

    #[test]
    fn q8_transversals() {
        let g = q8();
        let t = build_transversal(&g, &h(&g, &[&[2]])).unwrap();
        assert_eq!(t.reps(&g), vec![g.spec().element(&[0]).unwrap(), g.spec().element(&[1]).unwrap()]);
        let t = build_transversal(&g, &h(&g, &[&[1]])).unwrap();
        assert_eq!(t.rep_indices(), &[0]);
    }

    #[test]
    fn z2xz4_transversal_invariants() {
        let spec = normalize_spec(&[2, 4]).unwrap();
        let b2 = spec.element(&[0, 2]).unwrap();
        let g = make_group(spec, b2).unwrap();
        let hh = h(&g, &[&[1, 0]]);
        let t = build_transversal(&g, &hh).unwrap();
        assert_eq!(t.rep_indices().len(), 4);
        check_transversal(&g, &hh, &t).unwrap();
    }

    #[test]
    fn q8_alpha0() {
        let g = q8();
        let p = construct_alpha0(&g, &h(&g, &[&[1]]), 2).unwrap();
        assert_eq!(p.connection_set(&g).elements(), &[ge(&g, 1, false), ge(&g, 3, false)]);
        assert!(construct_alpha0(&g, &h(&g, &[&[1]]), 0).unwrap().indices.is_empty());
        assert!(construct_alpha0(&g, &h(&g, &[&[2]]), 0).unwrap().indices.is_empty());
        assert!(matches!(construct_alpha0(&g, &h(&g, &[&[1]]), 1), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn q8_0beta() {
        let g = q8();
        let hh = h(&g, &[&[1]]);
        let p = construct_0beta_h(&g, &hh, 4).unwrap();
        assert_eq!(p.recipe.case_id, "beta/complement");
        assert_eq!(p.indices, vec![4, 5, 6, 7]);
        let p = construct_0beta_h(&g, &h(&g, &[&[2]]), 2).unwrap();
        let k = Subgroup::type_a(&g, h(&g, &[&[2]])).unwrap();
        assert_eq!(
            subgroup_profile_counts(&g, &p.indices, &k).pair(),
            Some(RegularityPair::new(0, 2))
        );
        assert!(construct_0beta_h(&g, &hh, 0).unwrap().indices.is_empty());
    }

    #[test]
    fn q8_zb_ab() {
        let g = q8();
        let hh = h(&g, &[&[2]]);
        let e = g.spec().identity();
        let p = construct_zb_ab(&g, &hh, &e, 1, 0).unwrap();
        assert_eq!(p.connection_set(&g).elements(), &[ge(&g, 0, true), ge(&g, 2, true)]);
        let p = construct_zb_ab(&g, &hh, &e, 0, 1).unwrap();
        assert_eq!(p.connection_set(&g).elements(), &[ge(&g, 1, true), ge(&g, 3, true)]);
        assert!(construct_zb_ab(&g, &hh, &e, 0, 0).unwrap().indices.is_empty());
    }

    #[test]
    fn q8_zb_in_a() {
        let g = q8();
        let hh = h(&g, &[&[2]]);
        let e = g.spec().identity();
        let p = construct_zb_0beta_in_a(&g, &hh, &e, 2).unwrap();
        assert_eq!(p.recipe.case_id, "zb-a/5");
        assert_eq!(p.connection_set(&g).elements(), &[ge(&g, 1, false), ge(&g, 3, false)]);
        assert!(construct_zb_0beta_in_a(&g, &hh, &e, 0).unwrap().indices.is_empty());
        let whole = h(&g, &[&[1]]);
        assert!(matches!(
            construct_zb_0beta_in_a(&g, &whole, &e, 1),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn q8_construct_s() {
        let g = q8();
        let k = Subgroup::type_a(&g, h(&g, &[&[1]])).unwrap();
        let w = construct_s(&g, &k, 2, 4).unwrap();
        assert_eq!(w.set.len(), 6);

        let kb = Subgroup::type_zb(&g, h(&g, &[&[2]]), &g.spec().identity()).unwrap();
        let w = construct_s(&g, &kb, 2, 2).unwrap();
        assert_eq!(w.plan, Some(DecompositionPlan { eta: 0, zeta: 0, t_prime: 1, t: 1 }));
        assert_eq!(
            w.set.elements(),
            &[ge(&g, 0, true), ge(&g, 1, true), ge(&g, 2, true), ge(&g, 3, true)]
        );
        assert!(matches!(construct_s(&g, &kb, 0, 0), Err(Error::Infeasible { .. })));
        assert!(matches!(construct_s(&g, &kb, 1, 0), Err(Error::Infeasible { .. })));
    }
}
