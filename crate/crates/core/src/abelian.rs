//! Finite abelian groups `A = Z_{p1^e1} x ... x Z_{pn^en}` in canonical form.
//!
//! Factors are stored as prime powers: all 2-power factors first, sorted by
//! exponent, then odd prime powers sorted by `(p, e)`. Elements are exponent
//! vectors; they are also addressed by a dense index that preserves the
//! lexicographic order of the vectors, which is what the rest of the crate
//! uses internally.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest cyclic order accepted from user input.
pub const MAX_CYCLIC_ORDER: u64 = 1 << 20;
/// Largest `|A|` we are willing to materialize.
pub const MAX_ABELIAN_ORDER: usize = 1 << 16;
/// Default cap on `|A|` for exhaustive subgroup enumeration.
pub const DEFAULT_SUBGROUP_CAP_A: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    pub prime: u32,
    pub exponent: u32,
}

impl PrimePower {
    pub fn order(&self) -> u32 {
        self.prime.pow(self.exponent)
    }
}

/// An exponent vector over the canonical factors of some [`AbelianSpec`].
///
/// The vector is not tied to a spec at the type level; use
/// [`AbelianSpec::contains`] or [`AbelianSpec::element`] to validate
/// values that come from outside.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbelianElement(Vec<u32>);

impl AbelianElement {
    pub fn new(exps: Vec<u32>) -> Self {
        AbelianElement(exps)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for AbelianElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianSpec {
    factors: Vec<PrimePower>,
    moduli: Vec<u32>,
    strides: Vec<usize>,
    order: usize,
    lambda: usize,
    mu: usize,
    k: usize,
    user_orders: Vec<u64>,
    user_map: Vec<Vec<usize>>,
}

fn factorize(mut n: u64) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p as u32, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n as u32, 1));
    }
    out
}

/// Split each cyclic order into prime-power factors and sort them into
/// canonical order. The map from user factors to canonical factors is kept
/// so that user coordinates can be translated (see
/// [`AbelianSpec::from_user_coords`]).
pub fn normalize_spec(orders: &[u64]) -> Result<AbelianSpec> {
    if orders.is_empty() {
        return Err(Error::EmptySpec);
    }
    let mut total: usize = 1;
    // (prime power, user factor it came from)
    let mut raw: Vec<(PrimePower, usize)> = Vec::new();
    for (ui, &o) in orders.iter().enumerate() {
        if !(2..=MAX_CYCLIC_ORDER).contains(&o) {
            return Err(Error::BadOrder(o));
        }
        total = total.saturating_mul(o as usize);
        if total > MAX_ABELIAN_ORDER {
            return Err(Error::CapExceeded {
                what: "|A|",
                size: total,
                cap: MAX_ABELIAN_ORDER,
            });
        }
        for (p, e) in factorize(o) {
            raw.push((PrimePower { prime: p, exponent: e }, ui));
        }
    }
    raw.sort_by_key(|(pp, _)| {
        if pp.prime == 2 {
            (0, pp.exponent, 0)
        } else {
            (1, pp.prime, pp.exponent)
        }
    });

    let factors: Vec<PrimePower> = raw.iter().map(|(pp, _)| *pp).collect();
    let moduli: Vec<u32> = factors.iter().map(PrimePower::order).collect();
    let mut strides = vec![1usize; moduli.len()];
    for i in (0..moduli.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * moduli[i + 1] as usize;
    }
    let lambda = factors.iter().filter(|f| f.prime == 2).count();
    let k = factors
        .iter()
        .take_while(|f| f.prime == 2 && f.exponent == 1)
        .count();
    let mut user_map = vec![Vec::new(); orders.len()];
    for (ci, (_, ui)) in raw.iter().enumerate() {
        user_map[*ui].push(ci);
    }
    Ok(AbelianSpec {
        mu: factors.len() - lambda,
        factors,
        moduli,
        strides,
        order: total,
        lambda,
        k,
        user_orders: orders.to_vec(),
        user_map,
    })
}

impl AbelianSpec {
    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    /// Number of 2-power factors.
    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// Number of odd prime-power factors.
    pub fn mu(&self) -> usize {
        self.mu
    }

    /// Number of leading factors of order exactly 2.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn user_orders(&self) -> &[u64] {
        &self.user_orders
    }

    /// For each user-supplied cyclic factor, the canonical factor indices it
    /// was split into.
    pub fn user_map(&self) -> &[Vec<usize>] {
        &self.user_map
    }

    /// Orders of the canonical factors; normalizing these again is a no-op.
    pub fn canonical_orders(&self) -> Vec<u64> {
        self.moduli.iter().map(|&m| m as u64).collect()
    }

    /// Short human-readable name such as `Z2xZ4`.
    pub fn name(&self) -> String {
        self.moduli
            .iter()
            .map(|m| format!("Z{m}"))
            .collect::<Vec<_>>()
            .join("x")
    }

    pub fn identity(&self) -> AbelianElement {
        AbelianElement(vec![0; self.rank()])
    }

    /// The canonical generator `a_i` (0-based `i`).
    pub fn generator(&self, i: usize) -> Result<AbelianElement> {
        if i >= self.rank() {
            return Err(Error::FactorIndex { index: i, len: self.rank() });
        }
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        Ok(AbelianElement(v))
    }

    pub fn contains(&self, x: &AbelianElement) -> bool {
        x.0.len() == self.rank() && x.0.iter().zip(&self.moduli).all(|(a, m)| a < m)
    }

    pub fn check(&self, x: &AbelianElement) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::ForeignElement(x.to_string()))
        }
    }

    /// Build a validated element from canonical coordinates.
    pub fn element(&self, exps: &[i64]) -> Result<AbelianElement> {
        let bad = || Error::ForeignElement(format!("{exps:?}"));
        if exps.len() != self.rank() {
            return Err(bad());
        }
        let mut v = Vec::with_capacity(exps.len());
        for (&x, &m) in exps.iter().zip(&self.moduli) {
            if x < 0 || x >= m as i64 {
                return Err(bad());
            }
            v.push(x as u32);
        }
        Ok(AbelianElement(v))
    }

    /// Translate coordinates given against the user's cyclic factors into
    /// canonical coordinates (by reduction modulo each prime-power part).
    pub fn from_user_coords(&self, coords: &[i64]) -> Result<AbelianElement> {
        let bad = || Error::ForeignElement(format!("{coords:?}"));
        if coords.len() != self.user_orders.len() {
            return Err(bad());
        }
        let mut v = vec![0u32; self.rank()];
        for (ui, &c) in coords.iter().enumerate() {
            if c < 0 || c as u64 >= self.user_orders[ui] {
                return Err(bad());
            }
            for &ci in &self.user_map[ui] {
                v[ci] = (c as u64 % self.moduli[ci] as u64) as u32;
            }
        }
        Ok(AbelianElement(v))
    }

    /// Inverse of [`from_user_coords`](Self::from_user_coords), via CRT.
    pub fn to_user_coords(&self, x: &AbelianElement) -> Vec<u64> {
        self.user_map
            .iter()
            .map(|parts| {
                let (mut y, mut m) = (0u64, 1u64);
                for &ci in parts {
                    let (r, mi) = (x.0[ci] as u64, self.moduli[ci] as u64);
                    while y % mi != r {
                        y += m;
                    }
                    m *= mi;
                }
                y
            })
            .collect()
    }

    fn assert_same(&self, x: &AbelianElement) {
        assert_eq!(x.0.len(), self.rank(), "element {x} from a different group");
    }

    /// # Panics
    /// If either operand has the wrong length. Use [`checked_mul`](Self::checked_mul)
    /// for untrusted input.
    pub fn mul(&self, x: &AbelianElement, y: &AbelianElement) -> AbelianElement {
        self.assert_same(x);
        self.assert_same(y);
        AbelianElement(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.moduli)
                .map(|((a, b), m)| (a + b) % m)
                .collect(),
        )
    }

    pub fn checked_mul(&self, x: &AbelianElement, y: &AbelianElement) -> Result<AbelianElement> {
        if x.0.len() != self.rank() || y.0.len() != self.rank() {
            return Err(Error::SpecMismatch);
        }
        Ok(self.mul(x, y))
    }

    pub fn inv(&self, x: &AbelianElement) -> AbelianElement {
        self.assert_same(x);
        AbelianElement(
            x.0.iter()
                .zip(&self.moduli)
                .map(|(a, m)| (m - a) % m)
                .collect(),
        )
    }

    pub fn pow(&self, x: &AbelianElement, n: i64) -> AbelianElement {
        self.assert_same(x);
        AbelianElement(
            x.0.iter()
                .zip(&self.moduli)
                .map(|(&a, &m)| ((a as i64 * n).rem_euclid(m as i64)) as u32)
                .collect(),
        )
    }

    /// `phi_i(x)`: keep coordinate `i` (0-based), zero elsewhere.
    pub fn projection(&self, i: usize, x: &AbelianElement) -> Result<AbelianElement> {
        if i >= self.rank() {
            return Err(Error::FactorIndex { index: i, len: self.rank() });
        }
        if x.0.len() != self.rank() {
            return Err(Error::SpecMismatch);
        }
        let mut v = vec![0; self.rank()];
        v[i] = x.0[i];
        Ok(AbelianElement(v))
    }

    // ---- dense index form ----

    pub fn index_of(&self, x: &AbelianElement) -> usize {
        x.0.iter().zip(&self.strides).map(|(&a, &s)| a as usize * s).sum()
    }

    pub fn element_at(&self, idx: usize) -> AbelianElement {
        AbelianElement(
            self.strides
                .iter()
                .zip(&self.moduli)
                .map(|(&s, &m)| ((idx / s) % m as usize) as u32)
                .collect(),
        )
    }

    /// All elements in canonical (lexicographic) order.
    pub fn elements(&self) -> Vec<AbelianElement> {
        (0..self.order).map(|i| self.element_at(i)).collect()
    }

    pub fn add_idx(&self, i: usize, j: usize) -> usize {
        let mut out = 0;
        for (&s, &m) in self.strides.iter().zip(&self.moduli) {
            let m = m as usize;
            out += (((i / s) % m + (j / s) % m) % m) * s;
        }
        out
    }

    pub fn neg_idx(&self, i: usize) -> usize {
        let mut out = 0;
        for (&s, &m) in self.strides.iter().zip(&self.moduli) {
            let m = m as usize;
            out += ((m - (i / s) % m) % m) * s;
        }
        out
    }

    pub fn double_idx(&self, i: usize) -> usize {
        self.add_idx(i, i)
    }

    /// Closure of a set of generators, as sorted indices.
    pub fn closure_idx(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.add_idx(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order).filter(|&i| seen[i]).collect()
    }

    fn is_subgroup_idx(&self, elems: &[usize]) -> bool {
        if elems.first() != Some(&0) {
            return false;
        }
        let mut member = vec![false; self.order];
        for &x in elems {
            member[x] = true;
        }
        elems
            .iter()
            .all(|&x| elems.iter().all(|&y| member[self.add_idx(x, y)]))
    }
}

/// A subgroup `H <= A`, stored as a sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubgroupA {
    elements: Vec<AbelianElement>,
    indices: Vec<usize>,
    generators: Vec<AbelianElement>,
}

impl PartialOrd for SubgroupA {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SubgroupA {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.indices.len(), &self.indices).cmp(&(other.indices.len(), &other.indices))
    }
}

impl SubgroupA {
    /// Wrap sorted indices known to form a subgroup.
    fn from_indices(spec: &AbelianSpec, indices: Vec<usize>) -> Self {
        // Greedy irredundant generating list: walk elements in order and keep
        // any element not already generated.
        let mut gens = Vec::new();
        let mut span = vec![0usize];
        for &x in &indices {
            if span.binary_search(&x).is_err() {
                gens.push(x);
                span = spec.closure_idx(&gens);
                if span.len() == indices.len() {
                    break;
                }
            }
        }
        SubgroupA {
            elements: indices.iter().map(|&i| spec.element_at(i)).collect(),
            generators: gens.iter().map(|&i| spec.element_at(i)).collect(),
            indices,
        }
    }

    /// Validate an explicit element set as a subgroup of `spec`.
    pub fn from_elements(spec: &AbelianSpec, elems: &[AbelianElement]) -> Result<Self> {
        let mut idx = Vec::with_capacity(elems.len());
        for x in elems {
            spec.check(x)?;
            idx.push(spec.index_of(x));
        }
        idx.sort_unstable();
        idx.dedup();
        if !spec.is_subgroup_idx(&idx) {
            return Err(Error::NotSubgroup("element set is not closed".into()));
        }
        Ok(Self::from_indices(spec, idx))
    }

    pub fn elements(&self) -> &[AbelianElement] {
        &self.elements
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn generators(&self) -> &[AbelianElement] {
        &self.generators
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn contains(&self, x: &AbelianElement) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn contains_idx(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_subset_of(&self, other: &SubgroupA) -> bool {
        self.indices.iter().all(|&i| other.contains_idx(i))
    }

    pub fn intersection_count(&self, other: &SubgroupA) -> usize {
        self.indices.iter().filter(|&&i| other.contains_idx(i)).count()
    }

    /// Short label like `<[0,2],[1,0]>`; the trivial subgroup is `<>`.
    pub fn label(&self) -> String {
        let g: Vec<String> = self.generators.iter().map(|x| x.to_string()).collect();
        format!("<{}>", g.join(","))
    }
}

pub fn subgroup_closure(spec: &AbelianSpec, gens: &[AbelianElement]) -> SubgroupA {
    let idx: Vec<usize> = gens.iter().map(|g| spec.index_of(g)).collect();
    SubgroupA::from_indices(spec, spec.closure_idx(&idx))
}

pub fn checked_subgroup_closure(spec: &AbelianSpec, gens: &[AbelianElement]) -> Result<SubgroupA> {
    for g in gens {
        spec.check(g)?;
    }
    Ok(subgroup_closure(spec, gens))
}

/// Every subgroup of `A` exactly once, ordered by `(order, elements)`.
pub fn enumerate_subgroups(spec: &AbelianSpec, cap: usize) -> Result<Vec<SubgroupA>> {
    if spec.order() > cap {
        return Err(Error::CapExceeded {
            what: "|A| for subgroup enumeration",
            size: spec.order(),
            cap,
        });
    }
    let n = spec.order();
    // one generator per distinct cyclic subgroup
    let mut cyclic: std::collections::BTreeMap<Vec<usize>, usize> = Default::default();
    for x in 0..n {
        cyclic.entry(spec.closure_idx(&[x])).or_insert(x);
    }
    let mut all: BTreeSet<Vec<usize>> = cyclic.keys().cloned().collect();
    let mut frontier: Vec<Vec<usize>> = cyclic.keys().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in &frontier {
            for &g in cyclic.values() {
                if s.binary_search(&g).is_ok() {
                    continue;
                }
                let mut gens = s.clone();
                gens.push(g);
                let j = spec.closure_idx(&gens);
                if all.insert(j.clone()) {
                    next.push(j);
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<SubgroupA> = all
        .into_iter()
        .map(|idx| SubgroupA::from_indices(spec, idx))
        .collect();
    out.sort();
    Ok(out)
}

/// Coset id of every element of `A` relative to `h` (coset 0 is `h`;
/// the rest are numbered by their smallest element).
pub fn coset_ids(spec: &AbelianSpec, h: &SubgroupA) -> (Vec<usize>, usize) {
    let mut id = vec![usize::MAX; spec.order()];
    let mut next = 0;
    for x in 0..spec.order() {
        if id[x] != usize::MAX {
            continue;
        }
        for &y in h.indices() {
            id[spec.add_idx(x, y)] = next;
        }
        next += 1;
    }
    (id, next)
}

pub fn cosets(spec: &AbelianSpec, h: &SubgroupA) -> Result<Vec<Vec<AbelianElement>>> {
    if h.indices().iter().any(|&i| i >= spec.order())
        || h.elements().iter().any(|x| !spec.contains(x))
        || !spec.is_subgroup_idx(h.indices())
    {
        return Err(Error::NotSubgroup(format!("{} is not a subgroup of {}", h.label(), spec.name())));
    }
    let (id, n) = coset_ids(spec, h);
    let mut out = vec![Vec::new(); n];
    for (x, &c) in id.iter().enumerate() {
        out[c].push(spec.element_at(x));
    }
    Ok(out)
}

pub fn subset_product<'a>(
    spec: &AbelianSpec,
    c: impl IntoIterator<Item = &'a AbelianElement>,
) -> AbelianElement {
    c.into_iter()
        .fold(spec.identity(), |acc, x| spec.mul(&acc, x))
}
