//! Exhaustive ground truth, independent of the closed forms.
//!
//! Squares, involutions, conjugacy classes and subgroups are recomputed from
//! the multiplication table alone. Achievable `(alpha, beta)` pairs are found
//! by walking every union of non-square classes in Gray-code order.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::graph::RegularityPair;
use crate::error::{Error, Result};
use crate::group::{DicyclicGroup, GroupElement};
use crate::oracle::{composed_region, stated_region};
use crate::subgroup::{
    case_label, enumerate_all_subgroups, right_coset_ids, Subgroup, SubgroupKind,
    DEFAULT_SUBGROUP_CAP_G,
};

pub const DEFAULT_MAX_CLASSES: usize = 24;
/// Hard ceiling: masks are `u64` and the search is exhaustive.
pub const MAX_CLASSES_LIMIT: usize = 40;
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub fn brute_squares(g: &DicyclicGroup) -> BTreeSet<usize> {
    (0..g.order()).map(|x| g.mul_idx(x, x)).collect()
}

pub fn brute_involutions(g: &DicyclicGroup) -> BTreeSet<usize> {
    (1..g.order()).filter(|&x| g.mul_idx(x, x) == 0).collect()
}

/// Classes as sorted index lists, sorted by smallest element.
pub fn brute_conjugacy_classes(g: &DicyclicGroup) -> Vec<Vec<usize>> {
    let n = g.order();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let class: BTreeSet<usize> = (0..n).map(|y| g.mul_idx(g.mul_idx(y, x), g.inv_idx(y))).collect();
        for &c in &class {
            seen[c] = true;
        }
        out.push(class.into_iter().collect());
    }
    out
}

fn closure(g: &DicyclicGroup, gens: &[usize]) -> Vec<usize> {
    let mut member = vec![false; g.order()];
    member[0] = true;
    let mut elems = vec![0];
    let mut i = 0;
    while i < elems.len() {
        let x = elems[i];
        for &s in gens {
            let y = g.mul_idx(x, s);
            if !member[y] {
                member[y] = true;
                elems.push(y);
            }
        }
        i += 1;
    }
    elems.sort_unstable();
    elems
}

/// Every subgroup of `G` as a sorted index list, by joining cyclic ones.
pub fn brute_all_subgroups(g: &DicyclicGroup, cap: usize) -> Result<BTreeSet<Vec<usize>>> {
    let cyclic: BTreeSet<Vec<usize>> = (0..g.order()).map(|x| closure(g, &[x])).collect();
    let mut all = cyclic.clone();
    let mut frontier: Vec<Vec<usize>> = cyclic.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for h in &frontier {
            for c in &cyclic {
                let gens: Vec<usize> = h.iter().chain(c.iter()).copied().collect();
                let j = closure(g, &gens);
                if !all.contains(&j) {
                    all.insert(j.clone());
                    next.push(j);
                    if all.len() > cap {
                        return Err(Error::CapExceeded { what: "number of subgroups of G", size: all.len(), cap });
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(all)
}

/// Per non-square class, its count in each right coset of `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassVector {
    pub class_index: usize,
    pub contribution: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ClassVectors {
    pub vectors: Vec<ClassVector>,
    pub cosets: usize,
}

impl ClassVectors {
    pub fn new(g: &DicyclicGroup, k: &Subgroup) -> Self {
        let (ids, cosets) = right_coset_ids(g, k.indices());
        let vectors = g
            .non_square_classes()
            .into_iter()
            .map(|c| {
                let mut contribution = vec![0; cosets];
                for &x in &g.class_indices()[c] {
                    contribution[ids[x]] += 1;
                }
                ClassVector { class_index: c, contribution }
            })
            .collect();
        ClassVectors { vectors, cosets }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Coset counts of the union selected by `mask`, from scratch.
    pub fn counts_for_mask(&self, mask: u64) -> Vec<usize> {
        let mut out = vec![0; self.cosets];
        for (i, v) in self.vectors.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (o, c) in out.iter_mut().zip(&v.contribution) {
                    *o += c;
                }
            }
        }
        out
    }

    /// Element indices of the union selected by `mask`.
    pub fn set_for_mask(&self, g: &DicyclicGroup, mask: u64) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .vectors
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .flat_map(|(_, v)| g.class_indices()[v.class_index].iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

/// `(alpha, beta)` if the coset counts are constant off `K`.
pub fn pair_of_counts(counts: &[usize]) -> Option<RegularityPair> {
    let beta = counts.get(1).copied().unwrap_or(0);
    counts[1..].iter().all(|&c| c == beta).then(|| RegularityPair::new(counts[0], beta))
}

#[derive(Clone, Debug)]
pub struct Achievement {
    /// Every achieved pair (including `(0,0)`) with the smallest mask that
    /// achieves it.
    pub pairs: BTreeMap<RegularityPair, u64>,
    pub classes: ClassVectors,
}

fn add_vec(totals: &mut [usize], v: &[usize]) {
    for (t, x) in totals.iter_mut().zip(v) {
        *t += x;
    }
}

fn sub_vec(totals: &mut [usize], v: &[usize]) {
    for (t, x) in totals.iter_mut().zip(v) {
        *t -= x;
    }
}

fn record(found: &mut BTreeMap<RegularityPair, u64>, pair: RegularityPair, mask: u64) {
    found.entry(pair).and_modify(|m| *m = (*m).min(mask)).or_insert(mask);
}

/// Walk the masks `prefix << low .. (prefix + 1) << low` in Gray-code order.
fn walk_chunk(cv: &ClassVectors, prefix: u64, low: usize) -> BTreeMap<RegularityPair, u64> {
    let mut found = BTreeMap::new();
    let mut totals = cv.counts_for_mask(prefix << low);
    let base = prefix << low;
    let mut gray = 0u64;
    if let Some(p) = pair_of_counts(&totals) {
        record(&mut found, p, base);
    }
    for i in 1..(1u64 << low) {
        let bit = i.trailing_zeros() as usize;
        gray ^= 1 << bit;
        let v = &cv.vectors[bit].contribution;
        if gray >> bit & 1 == 1 {
            add_vec(&mut totals, v);
        } else {
            sub_vec(&mut totals, v);
        }
        if let Some(p) = pair_of_counts(&totals) {
            record(&mut found, p, base | gray);
        }
    }
    found
}

/// Every `(alpha, beta)` realised by a normal square-free `S` on `K`.
///
/// The top `log2(workers)` class bits are fixed per chunk and chunks are
/// dealt round-robin to scoped threads; the merge keeps the smallest mask.
pub fn achievable_pairs(
    g: &DicyclicGroup,
    k: &Subgroup,
    max_classes: usize,
    workers: usize,
) -> Result<Achievement> {
    let cap = max_classes.min(MAX_CLASSES_LIMIT);
    let cv = ClassVectors::new(g, k);
    let c = cv.len();
    if c > cap {
        return Err(Error::CapExceeded { what: "number of non-square classes", size: c, cap });
    }
    let workers = workers.max(1);
    let high = (usize::BITS - 1 - workers.next_power_of_two().leading_zeros()) as usize;
    let high = high.min(c);
    let low = c - high;
    let chunks = 1u64 << high;
    let merged = if workers == 1 || chunks == 1 {
        let mut all = BTreeMap::new();
        for p in 0..chunks {
            for (pair, m) in walk_chunk(&cv, p, low) {
                record(&mut all, pair, m);
            }
        }
        all
    } else {
        let results: Vec<BTreeMap<RegularityPair, u64>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers as u64)
                .map(|w| {
                    let cv = &cv;
                    scope.spawn(move || {
                        let mut local = BTreeMap::new();
                        let mut p = w;
                        while p < chunks {
                            for (pair, m) in walk_chunk(cv, p, low) {
                                record(&mut local, pair, m);
                            }
                            p += workers as u64;
                        }
                        local
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        let mut all = BTreeMap::new();
        for r in results {
            for (pair, m) in r {
                record(&mut all, pair, m);
            }
        }
        all
    };
    Ok(Achievement { pairs: merged, classes: cv })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrosscheckOptions {
    pub max_classes: usize,
    pub workers: usize,
    pub subgroup_cap: usize,
}

impl Default for CrosscheckOptions {
    fn default() -> Self {
        CrosscheckOptions { max_classes: DEFAULT_MAX_CLASSES, workers: 4, subgroup_cap: DEFAULT_SUBGROUP_CAP_G }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtraPair {
    pub pair: RegularityPair,
    pub witness: Vec<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgroupCheck {
    pub label: String,
    pub kind: SubgroupKind,
    pub case_label: String,
    /// Composed region.
    pub predicted: Vec<RegularityPair>,
    /// Closed-form region, when there is one.
    pub stated: Option<Vec<RegularityPair>>,
    /// Achieved pairs without `(0,0)`.
    pub achieved: Vec<RegularityPair>,
    pub equal: bool,
    pub stated_equal: bool,
    /// Predicted but unreachable.
    pub missing: Vec<RegularityPair>,
    /// Reached but not predicted, with a witness each.
    pub extra: Vec<ExtraPair>,
    pub seconds: f64,
}

impl SubgroupCheck {
    pub fn passed(&self) -> bool {
        self.equal && self.stated_equal
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub group: String,
    pub class_count: usize,
    pub subgroups: Vec<SubgroupCheck>,
    pub seconds: f64,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.subgroups.iter().all(SubgroupCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SubgroupCheck> {
        self.subgroups.iter().filter(|s| !s.passed())
    }

    /// CSV table preceded by a `# caysum-crosscheck v<N>` comment line.
    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        writeln!(buf, "# caysum-crosscheck v{CSV_SCHEMA_VERSION}").map_err(|e| Error::Internal(e.to_string()))?;
        let mut w = csv::Writer::from_writer(buf);
        let csv_err = |e: csv::Error| Error::Internal(e.to_string());
        w.write_record(["group", "subgroup", "case_label", "n_predicted", "n_achieved", "equal", "seconds"])
            .map_err(csv_err)?;
        for s in &self.subgroups {
            w.write_record([
                self.group.clone(),
                s.label.clone(),
                s.case_label.clone(),
                s.predicted.len().to_string(),
                s.achieved.len().to_string(),
                s.passed().to_string(),
                format!("{:.6}", s.seconds),
            ])
            .map_err(csv_err)?;
        }
        let buf = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))
    }
}

pub fn check_subgroup(g: &DicyclicGroup, k: &Subgroup, opts: &CrosscheckOptions) -> Result<SubgroupCheck> {
    let start = Instant::now();
    let ach = achievable_pairs(g, k, opts.max_classes, opts.workers)?;
    let predicted = composed_region(g, k).pairs;
    let stated = stated_region(g, k);
    let achieved: BTreeSet<RegularityPair> = ach.pairs.keys().copied().filter(|p| !p.is_zero()).collect();
    let missing: Vec<RegularityPair> = predicted.difference(&achieved).copied().collect();
    let extra: Vec<ExtraPair> = achieved
        .difference(&predicted)
        .map(|p| ExtraPair {
            pair: *p,
            witness: ach.classes.set_for_mask(g, ach.pairs[p]).into_iter().map(|i| g.element_at(i)).collect(),
        })
        .collect();
    Ok(SubgroupCheck {
        label: k.label(),
        kind: k.kind(),
        case_label: case_label(g, k),
        stated_equal: stated.as_ref().is_none_or(|s| *s == achieved),
        stated: stated.map(|s| s.into_iter().collect()),
        equal: missing.is_empty() && extra.is_empty(),
        predicted: predicted.into_iter().collect(),
        achieved: achieved.into_iter().collect(),
        missing,
        extra,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Compare brute force with the oracle on every subgroup of `G`.
pub fn crosscheck(g: &DicyclicGroup, opts: &CrosscheckOptions) -> Result<CrosscheckReport> {
    let start = Instant::now();
    let subgroups = enumerate_all_subgroups(g, opts.subgroup_cap)?;
    let class_count = g.non_square_classes().len();
    let checks = subgroups
        .iter()
        .map(|k| check_subgroup(g, k, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(CrosscheckReport { group: g.id(), class_count, subgroups: checks, seconds: start.elapsed().as_secs_f64() })
}
