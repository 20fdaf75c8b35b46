//! Finite hypothesis classes over an indexed domain and the class-level
//! constructions: projection, union, negation, aggregator composition,
//! majority-formula decomposition, and the tightness witnesses.

mod constructions;
mod formula;

pub use constructions::{
    make_multiunion_lower, make_random_or_blowup, make_threshold_chain, make_union_tight,
    multiunion_components, OrBlowup,
};
pub use formula::{dnf_majority_decompose, Gate, MajorityFormula};

use crate::bits::Bits;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default cap on the number of candidate tuples enumerated by [`compose`].
pub const DEFAULT_COMPOSE_CAP: usize = 10_000_000;

/// Maximum supported aggregator arity.
pub const MAX_ARITY: usize = 16;

/// A finite domain of points identified by indices `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    size: usize,
}

impl Domain {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyDomain);
        }
        Ok(Domain { size })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn check_point(&self, index: usize) -> Result<()> {
        if index < self.size {
            Ok(())
        } else {
            Err(Error::InvalidPoint {
                index,
                size: self.size,
            })
        }
    }
}

/// A boolean function on the domain, stored as its value table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Hypothesis {
    bits: Bits,
}

impl Hypothesis {
    pub fn new(bits: Bits) -> Self {
        Hypothesis { bits }
    }

    pub fn from_str01(s: &str) -> Option<Self> {
        Bits::from_str01(s).map(Hypothesis::new)
    }

    pub fn zeros(len: usize) -> Self {
        Hypothesis::new(Bits::zeros(len))
    }

    pub fn ones(len: usize) -> Self {
        Hypothesis::new(Bits::ones(len))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn value(&self, point: usize) -> u8 {
        self.bits.get(point) as u8
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn complemented(&self) -> Hypothesis {
        Hypothesis::new(self.bits.complemented())
    }

    pub fn string01(&self) -> String {
        self.bits.string01()
    }

    /// Number of points where the two hypotheses disagree.
    pub fn hamming(&self, other: &Hypothesis) -> usize {
        debug_assert_eq!(self.len(), other.len());
        self.bits
            .blocks()
            .iter()
            .zip(other.bits.blocks())
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }
}

/// A deduplicated set of hypotheses over one domain, members kept in
/// canonical (lexicographic) order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HypothesisClass {
    domain: Domain,
    members: Vec<Hypothesis>,
}

impl HypothesisClass {
    /// Canonicalize a list of rows into a class: validates lengths, sorts,
    /// deduplicates.
    pub fn from_rows(domain: Domain, rows: Vec<Hypothesis>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != domain.size() {
                return Err(Error::RowLength {
                    row: i,
                    got: row.len(),
                    expected: domain.size(),
                });
            }
        }
        let mut members = rows;
        members.sort_unstable();
        members.dedup();
        Ok(HypothesisClass { domain, members })
    }

    pub fn from_strs(strs: &[&str]) -> Result<Self> {
        let size = strs.first().map(|s| s.len()).unwrap_or(1);
        let domain = Domain::new(size)?;
        let rows = strs
            .iter()
            .map(|s| {
                Hypothesis::from_str01(s)
                    .ok_or_else(|| Error::InvalidInput(format!("bad row {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(domain, rows)
    }

    pub fn empty(domain: Domain) -> Self {
        HypothesisClass {
            domain,
            members: Vec::new(),
        }
    }

    /// All `2^size` functions on the domain.
    pub fn full_cube(size: usize) -> Result<Self> {
        let domain = Domain::new(size)?;
        if size > 20 {
            return Err(Error::ResourceLimit(format!(
                "full cube on {size} points has 2^{size} members"
            )));
        }
        let rows = (0..1usize << size)
            .map(|code| {
                let mut b = Bits::zeros(size);
                for j in 0..size {
                    b.set(j, code >> j & 1 == 1);
                }
                Hypothesis::new(b)
            })
            .collect();
        Self::from_rows(domain, rows)
    }

    pub fn singleton(h: Hypothesis) -> Result<Self> {
        let domain = Domain::new(h.len())?;
        Self::from_rows(domain, vec![h])
    }

    #[inline]
    pub fn domain(&self) -> Domain {
        self.domain
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Hypothesis] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &Hypothesis {
        &self.members[i]
    }

    pub fn contains(&self, h: &Hypothesis) -> bool {
        self.members.binary_search(h).is_ok()
    }

    pub fn is_subclass_of(&self, other: &HypothesisClass) -> bool {
        self.domain == other.domain && self.members.iter().all(|h| other.contains(h))
    }

    /// Restriction of every member to the points of `p`, deduplicated, over a
    /// fresh domain of size `|p|`.
    pub fn project(&self, p: &[usize]) -> Result<HypothesisClass> {
        let mut seen = Bits::zeros(self.domain.size());
        for &x in p {
            self.domain.check_point(x)?;
            if seen.get(x) {
                return Err(Error::DuplicatePoint { index: x });
            }
            seen.set(x, true);
        }
        let domain = Domain::new(p.len().max(1))?;
        if p.is_empty() {
            // all members restrict to the empty pattern; keep a canonical
            // single-point stand-in out of reach by rejecting instead
            return Err(Error::InvalidInput("projection onto no points".into()));
        }
        let rows = self
            .members
            .iter()
            .map(|h| {
                let mut b = Bits::zeros(p.len());
                for (j, &x) in p.iter().enumerate() {
                    b.set(j, h.value(x) == 1);
                }
                Hypothesis::new(b)
            })
            .collect();
        HypothesisClass::from_rows(domain, rows)
    }

    /// Set union with another class over the same domain.
    pub fn union(&self, other: &HypothesisClass) -> Result<HypothesisClass> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch(
                self.domain.size(),
                other.domain.size(),
            ));
        }
        let mut rows = self.members.clone();
        rows.extend(other.members.iter().cloned());
        HypothesisClass::from_rows(self.domain, rows)
    }

    /// The class of bitwise complements of every member.
    pub fn negated(&self) -> HypothesisClass {
        let rows = self.members.iter().map(Hypothesis::complemented).collect();
        HypothesisClass::from_rows(self.domain, rows).expect("lengths preserved")
    }

    /// Stable 64-bit fingerprint of the canonical member list; used as a
    /// memoization and cache key.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        self.domain.size().hash(&mut hasher);
        for m in &self.members {
            m.bits().blocks().hash(&mut hasher);
        }
        hasher.finish()
    }
}

/// A boolean aggregation rule on `arity` inputs, stored as a truth table.
/// The table is indexed with input `b1` most significant: the entry for
/// `(b1, .., bk)` sits at `b1*2^(k-1) + .. + bk`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Aggregator {
    arity: usize,
    truth_table: Bits,
}

impl Aggregator {
    pub fn new(arity: usize, truth_table: Bits) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::ArityCap(arity, MAX_ARITY));
        }
        if truth_table.len() != 1 << arity {
            return Err(Error::TruthTableLength {
                got: truth_table.len(),
                arity,
            });
        }
        Ok(Aggregator { arity, truth_table })
    }

    pub fn from_fn(arity: usize, f: impl Fn(&[u8]) -> u8) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::ArityCap(arity, MAX_ARITY));
        }
        let mut table = Bits::zeros(1 << arity);
        let mut input = vec![0u8; arity];
        for idx in 0..1usize << arity {
            for (pos, v) in input.iter_mut().enumerate() {
                *v = (idx >> (arity - 1 - pos) & 1) as u8;
            }
            table.set(idx, f(&input) == 1);
        }
        Aggregator::new(arity, table)
    }

    pub fn and(arity: usize) -> Aggregator {
        Self::from_fn(arity, |b| b.iter().all(|&v| v == 1) as u8).expect("valid arity")
    }

    pub fn or(arity: usize) -> Aggregator {
        Self::from_fn(arity, |b| b.contains(&1) as u8).expect("valid arity")
    }

    pub fn majority(arity: usize) -> Aggregator {
        Self::from_fn(arity, |b| {
            let ones: usize = b.iter().map(|&v| v as usize).sum();
            (2 * ones > b.len()) as u8
        })
        .expect("valid arity")
    }

    pub fn xor(arity: usize) -> Aggregator {
        Self::from_fn(arity, |b| b.iter().fold(0, |acc, &v| acc ^ v)).expect("valid arity")
    }

    pub fn constant(arity: usize, value: u8) -> Aggregator {
        Self::from_fn(arity, |_| value).expect("valid arity")
    }

    /// The dictator function returning input `i` (0-based).
    pub fn projection(arity: usize, i: usize) -> Aggregator {
        assert!(i < arity);
        Self::from_fn(arity, |b| b[i]).expect("valid arity")
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn truth_table(&self) -> &Bits {
        &self.truth_table
    }

    #[inline]
    pub fn eval(&self, inputs: &[u8]) -> u8 {
        debug_assert_eq!(inputs.len(), self.arity);
        let mut idx = 0usize;
        for &b in inputs {
            idx = idx << 1 | b as usize;
        }
        self.truth_table.get(idx) as u8
    }

    #[inline]
    pub fn eval_index(&self, idx: usize) -> u8 {
        self.truth_table.get(idx) as u8
    }
}

/// Pointwise `G`-aggregation of one hypothesis from each class, with a cap on
/// the number of candidate tuples.
pub fn compose_capped(
    g: &Aggregator,
    classes: &[&HypothesisClass],
    cap: usize,
) -> Result<HypothesisClass> {
    if classes.len() != g.arity() {
        return Err(Error::ArityMismatch {
            arity: g.arity(),
            classes: classes.len(),
        });
    }
    let domain = classes[0].domain();
    for c in classes {
        if c.domain() != domain {
            return Err(Error::DomainMismatch(domain.size(), c.domain().size()));
        }
    }
    if classes.iter().any(|c| c.is_empty()) {
        return Ok(HypothesisClass::empty(domain));
    }
    let mut tuples = 1usize;
    for c in classes {
        tuples = tuples
            .checked_mul(c.len())
            .filter(|&t| t <= cap)
            .ok_or_else(|| {
                Error::ResourceLimit(format!("composition exceeds {cap} candidate tuples"))
            })?;
    }

    let n = domain.size();
    let k = classes.len();
    let mut rows = Vec::with_capacity(tuples.min(1 << 16));
    let mut choice = vec![0usize; k];
    loop {
        let mut b = Bits::zeros(n);
        for x in 0..n {
            let mut idx = 0usize;
            for (j, c) in classes.iter().enumerate() {
                idx = idx << 1 | c.member(choice[j]).value(x) as usize;
            }
            b.set(x, g.eval_index(idx) == 1);
        }
        rows.push(Hypothesis::new(b));
        // mixed-radix increment
        let mut pos = k;
        loop {
            if pos == 0 {
                return HypothesisClass::from_rows(domain, rows);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < classes[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

pub fn compose(g: &Aggregator, classes: &[&HypothesisClass]) -> Result<HypothesisClass> {
    compose_capped(g, classes, DEFAULT_COMPOSE_CAP)
}

/// An ordered list of labeled examples; repeated points are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct LabeledSample {
    items: Vec<(usize, u8)>,
}

impl LabeledSample {
    pub fn new(domain: Domain, items: Vec<(usize, u8)>) -> Result<Self> {
        for &(x, y) in &items {
            domain.check_point(x)?;
            if y > 1 {
                return Err(Error::InvalidInput(format!("label {y} is not a bit")));
            }
        }
        Ok(LabeledSample { items })
    }

    pub fn from_items_unchecked(items: Vec<(usize, u8)>) -> Self {
        LabeledSample { items }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.items.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[(usize, u8)] {
        &self.items
    }

    pub fn push(&mut self, x: usize, y: u8) {
        self.items.push((x, y));
    }

    /// Sorted list of distinct points appearing in the sample.
    pub fn distinct_points(&self) -> Vec<usize> {
        let mut pts: Vec<usize> = self.items.iter().map(|&(x, _)| x).collect();
        pts.sort_unstable();
        pts.dedup();
        pts
    }

    pub fn concat(parts: &[&LabeledSample]) -> LabeledSample {
        let mut items = Vec::new();
        for p in parts {
            items.extend_from_slice(&p.items);
        }
        LabeledSample { items }
    }

    pub fn split_at(&self, mid: usize) -> (LabeledSample, LabeledSample) {
        let (a, b) = self.items.split_at(mid);
        (
            LabeledSample { items: a.to_vec() },
            LabeledSample { items: b.to_vec() },
        )
    }

    /// Number of items where `h` disagrees with the recorded label.
    pub fn error_count(&self, h: &Hypothesis) -> usize {
        self.items.iter().filter(|&&(x, y)| h.value(x) != y).count()
    }

    pub fn is_consistent_with(&self, h: &Hypothesis) -> bool {
        self.items.iter().all(|&(x, y)| h.value(x) == y)
    }
}
