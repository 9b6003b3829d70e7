//! Predicted feasible `(alpha, beta)` regions.
//!
//! Two evaluations are kept side by side. The *composed* region builds the
//! answer from its parts: which `alpha` are reachable with `S <= H`, which
//! `beta` with `S n H = {}` (or `S <= A \ H` for `<H,zb>`), and which pairs
//! with `S <= Ab`. The *stated* region evaluates the closed-form
//! characterization directly, with its `epsilon`, `eps_bar` and parity
//! conditions. For subgroups of `A` the two must coincide. For `<H,zb>` any
//! disagreement is surfaced as [`Error::RegionMismatch`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::abelian::SubgroupA;
use crate::graph::RegularityPair;
use crate::error::{Error, Result};
use crate::group::DicyclicGroup;
use crate::subgroup::{
    case_label, core_numbers, eps_bar_zb, square_clause, AlphaClause, CoreNumbers, Subgroup,
    SubgroupKind,
};

pub type PairSet = BTreeSet<RegularityPair>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionParams {
    /// 1 when `b^2 in H \ B`, else 0; lowers the `alpha` (or `eta`) bound.
    pub epsilon: u8,
    pub eps_bar: u8,
    /// `|H| / 2^l`.
    pub unit: usize,
    /// Largest `t` in `beta = t * unit` (or in the `Ab` part for `<H,zb>`).
    pub t_max: usize,
    /// `<H,zb>` with `B not<= H` forces `t' = t`.
    pub t_prime_tied: bool,
    /// Largest `alpha` (`eta` for `<H,zb>`).
    pub alpha_max: usize,
    /// Largest `zeta` for `<H,zb>`.
    pub zeta_max: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibleRegion {
    pub case_label: String,
    pub pairs: PairSet,
    pub whole_group: bool,
    pub params: RegionParams,
}

fn top(c: &CoreNumbers) -> usize {
    (c.two_l() - 1) * c.unit
}

fn epsilon(c: &CoreNumbers) -> u8 {
    c.b2_in_h_minus_b() as u8
}

/// `alpha` values with `H` an `(alpha, 0)`-regular set, i.e. `|S| = alpha`
/// for some normal square-free `S <= H`.
pub fn alpha_only_set(g: &DicyclicGroup, h: &SubgroupA) -> BTreeSet<usize> {
    let c = core_numbers(g, h);
    let t = top(&c);
    match c.alpha_clause() {
        AlphaClause::B2OnlyInvolution => (0..=(c.order / 2).saturating_sub(1)).step_by(2).collect(),
        AlphaClause::B2InHOutsideB => (0..t).collect(),
        AlphaClause::NoFreeInvolution => (0..=t).step_by(2).collect(),
        AlphaClause::FreeInvolution => (0..=t).collect(),
    }
}

/// `beta` values with `H` a `(0, beta)`-regular set: `t * |H|/2^l` for
/// `0 <= t <= 2^l - eps_bar`.
pub fn beta_only_set_h(g: &DicyclicGroup, h: &SubgroupA) -> BTreeSet<usize> {
    let c = core_numbers(g, h);
    let eb = square_clause(g, h).eps_bar() as usize;
    match c.two_l().checked_sub(eb) {
        Some(tmax) => (0..=tmax).map(|t| t * c.unit).collect(),
        None => BTreeSet::new(),
    }
}

fn product(alphas: &BTreeSet<usize>, betas: &BTreeSet<usize>) -> PairSet {
    let mut out = PairSet::new();
    for &a in alphas {
        for &b in betas {
            if a != 0 || b != 0 {
                out.insert(RegularityPair::new(a, b));
            }
        }
    }
    out
}

/// Composed region for `H <= A`: the product of the `alpha`-only and
/// `beta`-only sets, minus `(0,0)`.
pub fn composed_region_a(g: &DicyclicGroup, h: &SubgroupA) -> PairSet {
    product(&alpha_only_set(g, h), &beta_only_set_h(g, h))
}

/// Closed-form statement for `H <= A`:
/// `0 <= alpha <= (2^l - 1)|H|/2^l - epsilon`, `beta = t|H|/2^l` with
/// `0 <= t <= 2^l - eps_bar`, with `alpha` even in clauses 1 and 3.
pub fn stated_region_a(g: &DicyclicGroup, h: &SubgroupA) -> PairSet {
    let c = core_numbers(g, h);
    let eps = epsilon(&c) as usize;
    let eb = square_clause(g, h).eps_bar() as usize;
    let even_alpha = matches!(
        c.alpha_clause(),
        AlphaClause::B2OnlyInvolution | AlphaClause::NoFreeInvolution
    );
    let mut out = PairSet::new();
    let (Some(amax), Some(tmax)) = (top(&c).checked_sub(eps), c.two_l().checked_sub(eb)) else {
        return out;
    };
    for alpha in 0..=amax {
        if even_alpha && alpha % 2 == 1 {
            continue;
        }
        for t in 0..=tmax {
            let p = RegularityPair::new(alpha, t * c.unit);
            if !p.is_zero() {
                out.insert(p);
            }
        }
    }
    out
}

fn params_a(g: &DicyclicGroup, h: &SubgroupA) -> RegionParams {
    let c = core_numbers(g, h);
    let eb = square_clause(g, h).eps_bar();
    RegionParams {
        epsilon: epsilon(&c),
        eps_bar: eb,
        unit: c.unit,
        t_max: c.two_l().saturating_sub(eb as usize),
        t_prime_tied: false,
        alpha_max: alpha_only_set(g, h).last().copied().unwrap_or(0),
        zeta_max: None,
    }
}

/// Region for a subgroup of `A`. The composed and stated forms must agree;
/// a disagreement is an internal error.
pub fn feasible_pairs_h(g: &DicyclicGroup, k: &Subgroup) -> Result<FeasibleRegion> {
    if k.kind() != SubgroupKind::TypeA {
        return Err(Error::Internal(format!("{} is not a subgroup of A", k.label())));
    }
    let composed = composed_region_a(g, k.h());
    let stated = stated_region_a(g, k.h());
    if composed != stated {
        return Err(mismatch(k, &stated, &composed));
    }
    Ok(FeasibleRegion {
        case_label: case_label(g, k),
        pairs: composed,
        whole_group: false,
        params: params_a(g, k.h()),
    })
}

/// Pairs reachable by `<H,zb>` with `S <= Ab` (including `(0,0)`):
/// `(t' u, t u)` for `0 <= t, t' <= 2^l` if `B <= H`, else only `t' = t`.
pub fn zb_ab_pairs(g: &DicyclicGroup, h: &SubgroupA) -> PairSet {
    let c = core_numbers(g, h);
    let n = c.two_l();
    let mut out = PairSet::new();
    for t in 0..=n {
        if c.b_in_h {
            for tp in 0..=n {
                out.insert(RegularityPair::new(tp * c.unit, t * c.unit));
            }
        } else {
            out.insert(RegularityPair::new(t * c.unit, t * c.unit));
        }
    }
    out
}

/// `zeta` values reachable by `<H,zb>` with `S <= A \ H`: up to `|H|` if
/// `B <= H`, else up to `(2^l - 1)|H|/2^l`; even only when `m > l`.
pub fn zb_beta_in_a(g: &DicyclicGroup, h: &SubgroupA) -> BTreeSet<usize> {
    let c = core_numbers(g, h);
    if h.order() == g.order_a() {
        return BTreeSet::from([0]);
    }
    let bound = if c.b_in_h { c.order } else { top(&c) };
    let step = if c.m > c.l { 2 } else { 1 };
    (0..=bound).step_by(step).collect()
}

/// Composed region for `<H,zb>`: `(eta + a, zeta + b)` over the three parts.
pub fn composed_region_zb(g: &DicyclicGroup, h: &SubgroupA) -> PairSet {
    let etas = alpha_only_set(g, h);
    let zetas = zb_beta_in_a(g, h);
    let ab = zb_ab_pairs(g, h);
    let mut out = PairSet::new();
    for &eta in &etas {
        for &zeta in &zetas {
            for p in &ab {
                let q = RegularityPair::new(eta + p.alpha, zeta + p.beta);
                if !q.is_zero() {
                    out.insert(q);
                }
            }
        }
    }
    out
}

/// Closed-form statement for `<H,zb>`:
/// `(alpha, beta) = (eta + t'u, zeta + tu)` with
/// `0 <= eta <= (2^l - 1)u - epsilon`, `0 <= zeta <= (2^l - eps_bar)u`,
/// `0 <= t, t' <= 2^l` (`t' = t` when `B not<= H`), and the parity
/// conditions of clauses 1-5 on `alpha` and `beta`.
pub fn stated_region_zb(g: &DicyclicGroup, h: &SubgroupA) -> PairSet {
    let c = core_numbers(g, h);
    let eps = epsilon(&c) as usize;
    let eb = eps_bar_zb(g, h) as usize;
    let n = c.two_l();
    let mut out = PairSet::new();
    let Some(eta_max) = top(&c).checked_sub(eps) else {
        return out;
    };
    let zeta_max = (n - eb) * c.unit;
    let m_gt_l = c.m > c.l;
    let keep = |p: RegularityPair| -> bool {
        let (ae, be) = (p.alpha.is_multiple_of(2), p.beta.is_multiple_of(2));
        match (c.b2_in_h_minus_b(), m_gt_l) {
            (true, true) => be,
            (true, false) => true,
            (false, true) if c.r == 0 => ae && be,
            (false, true) => be,
            (false, false) => true,
        }
    };
    for eta in 0..=eta_max {
        for zeta in 0..=zeta_max {
            for t in 0..=n {
                for tp in 0..=n {
                    if !c.b_in_h && tp != t {
                        continue;
                    }
                    let p = RegularityPair::new(eta + tp * c.unit, zeta + t * c.unit);
                    if !p.is_zero() && keep(p) {
                        out.insert(p);
                    }
                }
            }
        }
    }
    out
}

fn params_zb(g: &DicyclicGroup, h: &SubgroupA) -> RegionParams {
    let c = core_numbers(g, h);
    let eb = eps_bar_zb(g, h);
    RegionParams {
        epsilon: epsilon(&c),
        eps_bar: eb,
        unit: c.unit,
        t_max: c.two_l(),
        t_prime_tied: !c.b_in_h,
        alpha_max: alpha_only_set(g, h).last().copied().unwrap_or(0),
        zeta_max: zb_beta_in_a(g, h).last().copied(),
    }
}

fn mismatch(k: &Subgroup, stated: &PairSet, composed: &PairSet) -> Error {
    Error::RegionMismatch {
        subgroup: k.label(),
        only_stated: stated.difference(composed).copied().collect(),
        only_composed: composed.difference(stated).copied().collect(),
    }
}

/// `K = G`: there is no outside coset, so only `(alpha, 0)` is meaningful;
/// `alpha = eta + t'|B|` with `eta` reachable inside `A`.
pub fn whole_group_region(g: &DicyclicGroup, k: &Subgroup) -> FeasibleRegion {
    let h = k.h();
    let c = core_numbers(g, h);
    let mut pairs = PairSet::new();
    for &eta in &alpha_only_set(g, h) {
        for tp in 0..=c.two_l() {
            let p = RegularityPair::new(eta + tp * c.unit, 0);
            if !p.is_zero() {
                pairs.insert(p);
            }
        }
    }
    FeasibleRegion {
        case_label: case_label(g, k),
        pairs,
        whole_group: true,
        params: RegionParams { zeta_max: Some(0), ..params_zb(g, h) },
    }
}

/// Composed region for `<H,zb>` (or `K = G`), never failing.
pub fn composed_region(g: &DicyclicGroup, k: &Subgroup) -> FeasibleRegion {
    match k.kind() {
        SubgroupKind::TypeA => FeasibleRegion {
            case_label: case_label(g, k),
            pairs: composed_region_a(g, k.h()),
            whole_group: false,
            params: params_a(g, k.h()),
        },
        SubgroupKind::TypeZb if k.is_whole_group(g) => whole_group_region(g, k),
        SubgroupKind::TypeZb => FeasibleRegion {
            case_label: case_label(g, k),
            pairs: composed_region_zb(g, k.h()),
            whole_group: false,
            params: params_zb(g, k.h()),
        },
    }
}

/// The closed-form region, where one exists (`None` for `K = G`).
pub fn stated_region(g: &DicyclicGroup, k: &Subgroup) -> Option<PairSet> {
    match k.kind() {
        SubgroupKind::TypeA => Some(stated_region_a(g, k.h())),
        SubgroupKind::TypeZb if k.is_whole_group(g) => None,
        SubgroupKind::TypeZb => Some(stated_region_zb(g, k.h())),
    }
}

/// Region for `<H,zb>`; errors if the stated and composed forms differ.
pub fn feasible_pairs_hzb(g: &DicyclicGroup, k: &Subgroup) -> Result<FeasibleRegion> {
    if k.kind() != SubgroupKind::TypeZb {
        return Err(Error::Internal(format!("{} is not of the form <H,zb>", k.label())));
    }
    let region = composed_region(g, k);
    if let Some(stated) = stated_region(g, k) {
        if stated != region.pairs {
            return Err(mismatch(k, &stated, &region.pairs));
        }
    }
    Ok(region)
}

/// Region for any subgroup; errors on a stated/composed disagreement.
pub fn region(g: &DicyclicGroup, k: &Subgroup) -> Result<FeasibleRegion> {
    match k.kind() {
        SubgroupKind::TypeA => feasible_pairs_h(g, k),
        SubgroupKind::TypeZb => feasible_pairs_hzb(g, k),
    }
}
