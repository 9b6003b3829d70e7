//! Generalized dicyclic groups `G = <A, b | b^2 in A, b^4 = e, b a b^-1 = a^-1>`.
//!
//! Elements are pairs `(a, f)` meaning `a b^f`. Internally every element also
//! has a dense index `f * |A| + index(a)`, so `A` comes first and the order
//! agrees with the canonical `(flag, exps)` order.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::abelian::{subgroup_closure, AbelianElement, AbelianSpec, SubgroupA};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub a: AbelianElement,
    /// `false` for elements of `A`, `true` for elements of `Ab`.
    pub flag: bool,
}

impl GroupElement {
    pub fn new(a: AbelianElement, flag: bool) -> Self {
        GroupElement { a, flag }
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.flag, &self.a).cmp(&(other.flag, &other.a))
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.flag {
            write!(f, "{}b", self.a)
        } else {
            write!(f, "{}", self.a)
        }
    }
}

// JSON shape: [[e1,...,en], f]
impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.a, self.flag as u8).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (a, f) = <(AbelianElement, u8)>::deserialize(d)?;
        if f > 1 {
            return Err(de::Error::custom(format!("flag must be 0 or 1, got {f}")));
        }
        Ok(GroupElement { a, flag: f == 1 })
    }
}

#[derive(Clone, Debug)]
pub struct DicyclicGroup {
    spec: AbelianSpec,
    b_squared: AbelianElement,
    b2_idx: usize,
    b_sub: SubgroupA,
    a_prime: SubgroupA,
    /// Over `A` indices: membership in `B u {b^2}`.
    square_a: Vec<bool>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

pub fn make_group(spec: AbelianSpec, b_squared: AbelianElement) -> Result<DicyclicGroup> {
    if spec.order() % 2 == 1 {
        return Err(Error::OddOrder(spec.order()));
    }
    spec.check(&b_squared)?;
    let b2_idx = spec.index_of(&b_squared);
    if b2_idx == 0 || spec.double_idx(b2_idx) != 0 {
        return Err(Error::NotInvolution(b_squared.to_string()));
    }

    // B = <a_i^2 (i <= lambda), a_j (j > lambda)>
    let lambda = spec.lambda();
    let mut b_gens = Vec::new();
    let mut ap_gens = Vec::new();
    for (i, f) in spec.factors().iter().enumerate() {
        let g = spec.generator(i)?;
        if i < lambda {
            b_gens.push(spec.pow(&g, 2));
            ap_gens.push(spec.pow(&g, 1 << (f.exponent - 1)));
        } else {
            b_gens.push(g);
        }
    }
    let b_sub = subgroup_closure(&spec, &b_gens);
    let a_prime = subgroup_closure(&spec, &ap_gens);

    let n = spec.order();
    let mut square_a = vec![false; n];
    for &i in b_sub.indices() {
        square_a[i] = true;
    }
    square_a[b2_idx] = true;

    let mut g = DicyclicGroup {
        spec,
        b_squared,
        b2_idx,
        b_sub,
        a_prime,
        square_a,
        classes: Vec::new(),
        class_of: Vec::new(),
    };
    g.build_classes();
    Ok(g)
}

impl DicyclicGroup {
    fn build_classes(&mut self) {
        let n = self.spec.order();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut class_of = vec![usize::MAX; 2 * n];
        for x in 0..n {
            if class_of[x] != usize::MAX {
                continue;
            }
            let inv = self.spec.neg_idx(x);
            let mut c = vec![x, inv];
            c.sort_unstable();
            c.dedup();
            for &y in &c {
                class_of[y] = classes.len();
            }
            classes.push(c);
        }
        // (ab)^G = B a b
        for x in 0..n {
            if class_of[n + x] != usize::MAX {
                continue;
            }
            let mut c: Vec<usize> = self
                .b_sub
                .indices()
                .iter()
                .map(|&c| n + self.spec.add_idx(c, x))
                .collect();
            c.sort_unstable();
            for &y in &c {
                class_of[y] = classes.len();
            }
            classes.push(c);
        }
        // classes were discovered in order of their minimum element already
        self.classes = classes;
        self.class_of = class_of;
    }

    pub fn spec(&self) -> &AbelianSpec {
        &self.spec
    }

    pub fn b_squared(&self) -> &AbelianElement {
        &self.b_squared
    }

    pub fn b_squared_idx(&self) -> usize {
        self.b2_idx
    }

    /// The subgroup `B` of squares of `A`.
    pub fn b_subgroup(&self) -> &SubgroupA {
        &self.b_sub
    }

    /// `A'`: the elements of `A` of order at most 2.
    pub fn a_prime(&self) -> &SubgroupA {
        &self.a_prime
    }

    pub fn order(&self) -> usize {
        2 * self.spec.order()
    }

    pub fn order_a(&self) -> usize {
        self.spec.order()
    }

    /// Name like `Z2xZ4,b2=[0,2]`.
    pub fn id(&self) -> String {
        format!("{},b2={}", self.spec.name(), self.b_squared)
    }

    pub fn b(&self) -> GroupElement {
        GroupElement::new(self.spec.identity(), true)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::new(self.spec.identity(), false)
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.spec.contains(&x.a)
    }

    pub fn check(&self, x: &GroupElement) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::ForeignElement(x.to_string()))
        }
    }

    // ---- index form ----

    pub fn index_of(&self, x: &GroupElement) -> usize {
        x.flag as usize * self.order_a() + self.spec.index_of(&x.a)
    }

    pub fn element_at(&self, i: usize) -> GroupElement {
        let n = self.order_a();
        GroupElement::new(self.spec.element_at(i % n), i >= n)
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order()).map(|i| self.element_at(i)).collect()
    }

    pub fn mul_idx(&self, x: usize, y: usize) -> usize {
        let n = self.order_a();
        let s = &self.spec;
        match (x >= n, y >= n) {
            (false, fy) => s.add_idx(x, y % n) + if fy { n } else { 0 },
            (true, false) => n + s.add_idx(x - n, s.neg_idx(y)),
            (true, true) => s.add_idx(s.add_idx(x - n, s.neg_idx(y - n)), self.b2_idx),
        }
    }

    pub fn inv_idx(&self, x: usize) -> usize {
        let n = self.order_a();
        if x < n {
            self.spec.neg_idx(x)
        } else {
            // (a b)^-1 = a b^2 . b
            n + self.spec.add_idx(x - n, self.b2_idx)
        }
    }

    /// # Panics
    /// If an operand does not belong to this group.
    pub fn mul(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        let s = &self.spec;
        match (x.flag, y.flag) {
            (false, f) => GroupElement::new(s.mul(&x.a, &y.a), f),
            (true, false) => GroupElement::new(s.mul(&x.a, &s.inv(&y.a)), true),
            (true, true) => GroupElement::new(
                s.mul(&s.mul(&x.a, &s.inv(&y.a)), &self.b_squared),
                false,
            ),
        }
    }

    pub fn checked_mul(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul(x, y))
    }

    pub fn inv(&self, x: &GroupElement) -> GroupElement {
        if x.flag {
            GroupElement::new(self.spec.mul(&x.a, &self.b_squared), true)
        } else {
            GroupElement::new(self.spec.inv(&x.a), false)
        }
    }

    /// Is the element with this `A`-index in `Sq(G) = B u {b^2}`?
    pub fn is_square_a(&self, i: usize) -> bool {
        self.square_a[i]
    }

    pub fn is_square_idx(&self, x: usize) -> bool {
        x < self.order_a() && self.square_a[x]
    }

    /// `Sq(G) = B u {b^2}`, sorted.
    pub fn square_set(&self) -> Vec<GroupElement> {
        (0..self.order_a())
            .filter(|&i| self.square_a[i])
            .map(|i| self.element_at(i))
            .collect()
    }

    /// All involutions: `A' \ {e}`.
    pub fn involution_set(&self) -> Vec<GroupElement> {
        self.a_prime
            .elements()
            .iter()
            .skip(1)
            .map(|a| GroupElement::new(a.clone(), false))
            .collect()
    }

    /// Conjugacy classes as sorted index lists, ordered by smallest element.
    pub fn class_indices(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of_idx(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<GroupElement>> {
        self.classes
            .iter()
            .map(|c| c.iter().map(|&i| self.element_at(i)).collect())
            .collect()
    }

    /// Ids of the classes made of non-squares (a class is either entirely
    /// square or entirely non-square).
    pub fn non_square_classes(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&c| !self.is_square_idx(self.classes[c][0]))
            .collect()
    }
}

/// A set of group elements together with the outcome of the normality and
/// square-freeness checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionSet {
    elements: Vec<GroupElement>,
    indices: Vec<usize>,
    validated_normal: bool,
    validated_square_free: bool,
    missing_conjugates: Vec<GroupElement>,
    squares_present: Vec<GroupElement>,
}

impl ConnectionSet {
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_normal(&self) -> bool {
        self.validated_normal
    }

    pub fn is_square_free(&self) -> bool {
        self.validated_square_free
    }

    pub fn is_valid(&self) -> bool {
        self.validated_normal && self.validated_square_free
    }

    /// Conjugates of members that are missing from the set.
    pub fn missing_conjugates(&self) -> &[GroupElement] {
        &self.missing_conjugates
    }

    pub fn squares_present(&self) -> &[GroupElement] {
        &self.squares_present
    }

    pub fn require_valid(&self) -> Result<()> {
        let show = |v: &[GroupElement]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        match (self.validated_normal, self.validated_square_free) {
            (true, true) => Ok(()),
            (false, true) => Err(Error::InvalidConnectionSet(format!(
                "not normal; missing conjugates: {}",
                show(&self.missing_conjugates)
            ))),
            (true, false) => Err(Error::InvalidConnectionSet(format!(
                "not square-free; contains squares: {}",
                show(&self.squares_present)
            ))),
            (false, false) => Err(Error::InvalidConnectionSet(format!(
                "not normal (missing {}) and not square-free (squares {})",
                show(&self.missing_conjugates),
                show(&self.squares_present)
            ))),
        }
    }
}

/// Validate an element set. Fails only if some element is not in `G`;
/// normality and square-freeness are reported through the flags.
pub fn validate_connection_set<'a>(
    g: &DicyclicGroup,
    s: impl IntoIterator<Item = &'a GroupElement>,
) -> Result<ConnectionSet> {
    let mut idx = Vec::new();
    for x in s {
        g.check(x)?;
        idx.push(g.index_of(x));
    }
    Ok(connection_set_from_indices(g, idx))
}

pub fn connection_set_from_indices(g: &DicyclicGroup, mut idx: Vec<usize>) -> ConnectionSet {
    idx.sort_unstable();
    idx.dedup();
    let mut member = vec![false; g.order()];
    for &i in &idx {
        member[i] = true;
    }
    let mut missing = Vec::new();
    let mut seen_class = vec![false; g.class_indices().len()];
    for &i in &idx {
        let c = g.class_of_idx(i);
        if std::mem::replace(&mut seen_class[c], true) {
            continue;
        }
        missing.extend(g.class_indices()[c].iter().filter(|&&j| !member[j]).copied());
    }
    missing.sort_unstable();
    let squares: Vec<usize> = idx.iter().copied().filter(|&i| g.is_square_idx(i)).collect();
    ConnectionSet {
        elements: idx.iter().map(|&i| g.element_at(i)).collect(),
        validated_normal: missing.is_empty(),
        validated_square_free: squares.is_empty(),
        missing_conjugates: missing.into_iter().map(|i| g.element_at(i)).collect(),
        squares_present: squares.into_iter().map(|i| g.element_at(i)).collect(),
        indices: idx,
    }
}
