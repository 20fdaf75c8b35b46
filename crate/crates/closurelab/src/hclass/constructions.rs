//! Classes with known dimensions, used as tightness witnesses and as test
//! fixtures: threshold chains, the union-tightness pair, the multi-union
//! blowup, and the randomized OR-composition lower-bound class.

use super::{Domain, Hypothesis, HypothesisClass};
use crate::bits::Bits;
use crate::error::{Error, Result};
use rand::Rng;

/// The chain `h_1..h_t` over a domain of `t` points with `h_i(j) = 1` iff
/// `i <= j` (0-based). Its threshold dimension is exactly `t`.
pub fn make_threshold_chain(t: usize) -> HypothesisClass {
    assert!(t >= 1, "chain length must be at least 1");
    let domain = Domain::new(t).expect("t >= 1");
    let rows = (0..t)
        .map(|i| {
            let mut b = Bits::zeros(t);
            for j in i..t {
                b.set(j, true);
            }
            Hypothesis::new(b)
        })
        .collect();
    HypothesisClass::from_rows(domain, rows).expect("uniform lengths")
}

/// The union-tightness pair over `n` points: `H1` holds every hypothesis
/// with at most `d1` ones, `H2` every hypothesis with at most `d2` zeros.
/// With `n = d1 + d2 + 1` the union is the full cube.
pub fn make_union_tight(
    d1: usize,
    d2: usize,
    n: usize,
) -> Result<(HypothesisClass, HypothesisClass)> {
    if n < d1 + d2 + 1 {
        return Err(Error::InvalidInput(format!(
            "need n >= d1 + d2 + 1, got n = {n}, d1 = {d1}, d2 = {d2}"
        )));
    }
    if n > 20 {
        return Err(Error::ResourceLimit(format!(
            "union-tight construction on {n} points enumerates 2^{n} vectors"
        )));
    }
    let domain = Domain::new(n)?;
    let mut rows1 = Vec::new();
    let mut rows2 = Vec::new();
    for code in 0..1usize << n {
        let ones = code.count_ones() as usize;
        if ones <= d1 || n - ones <= d2 {
            let mut b = Bits::zeros(n);
            for j in 0..n {
                b.set(j, code >> j & 1 == 1);
            }
            let h = Hypothesis::new(b);
            if ones <= d1 {
                rows1.push(h.clone());
            }
            if n - ones <= d2 {
                rows2.push(h);
            }
        }
    }
    Ok((
        HypothesisClass::from_rows(domain, rows1)?,
        HypothesisClass::from_rows(domain, rows2)?,
    ))
}

/// Extend the domain by `floor(log2 k)` fresh points and take every
/// extension of every member to all patterns on the new points. The result
/// is a union of `2^floor(log2 k)` shifted copies of `h`.
pub fn make_multiunion_lower(h: &HypothesisClass, k: usize) -> HypothesisClass {
    assert!(k >= 1);
    let extra = if k == 1 { 0 } else { k.ilog2() as usize };
    if extra == 0 {
        return h.clone();
    }
    let n = h.domain().size();
    let domain = Domain::new(n + extra).expect("nonempty");
    let mut rows = Vec::with_capacity(h.len() << extra);
    for member in h.members() {
        for pattern in 0..1usize << extra {
            let mut b = Bits::zeros(n + extra);
            for j in 0..n {
                b.set(j, member.value(j) == 1);
            }
            for p in 0..extra {
                b.set(n + p, pattern >> p & 1 == 1);
            }
            rows.push(Hypothesis::new(b));
        }
    }
    HypothesisClass::from_rows(domain, rows).expect("uniform lengths")
}

/// The `2^floor(log2 k)` component classes of [`make_multiunion_lower`], one
/// per fixed pattern on the fresh points.
pub fn multiunion_components(h: &HypothesisClass, k: usize) -> Vec<HypothesisClass> {
    assert!(k >= 1);
    let extra = if k == 1 { 0 } else { k.ilog2() as usize };
    if extra == 0 {
        return vec![h.clone()];
    }
    let n = h.domain().size();
    let domain = Domain::new(n + extra).expect("nonempty");
    (0..1usize << extra)
        .map(|pattern| {
            let rows = h
                .members()
                .iter()
                .map(|member| {
                    let mut b = Bits::zeros(n + extra);
                    for j in 0..n {
                        b.set(j, member.value(j) == 1);
                    }
                    for p in 0..extra {
                        b.set(n + p, pattern >> p & 1 == 1);
                    }
                    Hypothesis::new(b)
                })
                .collect();
            HypothesisClass::from_rows(domain, rows).expect("uniform lengths")
        })
        .collect()
}

/// The randomized OR-composition lower-bound class: `m = 2^floor(t/5)`
/// points and `2m` functions `f_1..f_m, g_1..g_m` with `f_i(j) = g_i(j) = 0`
/// past position `i` and exactly one of the pair set on each position up to
/// `i`. Rows are kept exactly as generated; duplicates are only merged when
/// a [`HypothesisClass`] is formed for dimension computations.
#[derive(Debug, Clone)]
pub struct OrBlowup {
    pub m: usize,
    pub fs: Vec<Hypothesis>,
    pub gs: Vec<Hypothesis>,
}

impl OrBlowup {
    /// Raw rows in generation order: `f_1..f_m` then `g_1..g_m`.
    pub fn rows(&self) -> Vec<Hypothesis> {
        self.fs.iter().chain(self.gs.iter()).cloned().collect()
    }

    /// Deduplicated canonical class over the `m`-point domain.
    pub fn class(&self) -> HypothesisClass {
        let domain = Domain::new(self.m).expect("m >= 1");
        HypothesisClass::from_rows(domain, self.rows()).expect("uniform lengths")
    }
}

pub fn make_random_or_blowup(t: usize, rng: &mut impl Rng) -> Result<OrBlowup> {
    if t < 5 {
        return Err(Error::InvalidInput(format!(
            "or-blowup needs t >= 5, got {t}"
        )));
    }
    let m = 1usize << (t / 5);
    let mut fs = Vec::with_capacity(m);
    let mut gs = Vec::with_capacity(m);
    for i in 0..m {
        let mut f = Bits::zeros(m);
        let mut g = Bits::zeros(m);
        for j in 0..=i {
            if rng.gen::<bool>() {
                f.set(j, true);
            } else {
                g.set(j, true);
            }
        }
        fs.push(Hypothesis::new(f));
        gs.push(Hypothesis::new(g));
    }
    Ok(OrBlowup { m, fs, gs })
}
