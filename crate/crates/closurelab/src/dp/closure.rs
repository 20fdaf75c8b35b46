//! The closure learner: per-class relabeling with a completion score, then a
//! private learner per step, finally the pointwise aggregation.

use super::{relabel, CompletionScore, DpRngs, LearnerSpec, Pattern, PointPredicate};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::hclass::{Aggregator, Hypothesis, HypothesisClass, LabeledSample};

/// Default cap on the completion-product size enumerated per score call.
pub const DEFAULT_COMPLETION_CAP: usize = 1_000_000;

/// Minimum over all completions `c_{i+1}..c_k` (patterns of the suffix
/// classes on the sample's points) of the number of sample items where
/// `G(prefix.., z, completions..)` disagrees with the label.
pub fn completion_score(
    sample: &LabeledSample,
    prefix: &[Hypothesis],
    z: &dyn PointPredicate,
    g: &Aggregator,
    suffix_classes: &[HypothesisClass],
    cap: usize,
) -> Result<usize> {
    let slot = prefix.len();
    if slot + 1 + suffix_classes.len() != g.arity() {
        return Err(Error::ArityMismatch {
            arity: g.arity(),
            classes: slot + 1 + suffix_classes.len(),
        });
    }
    if sample.is_empty() {
        return Ok(0);
    }
    let points = sample.distinct_points();

    let projections: Vec<HypothesisClass> = suffix_classes
        .iter()
        .map(|c| c.project(&points))
        .collect::<Result<Vec<_>>>()?;
    let mut tuples = 1usize;
    for p in &projections {
        if p.is_empty() {
            return Err(Error::EmptyClass);
        }
        tuples = tuples
            .checked_mul(p.len())
            .filter(|&t| t <= cap)
            .ok_or_else(|| {
                Error::ResourceLimit(format!("completion product exceeds {cap} tuples"))
            })?;
    }

    // fixed input bits per sample item: prefix values then the candidate
    let fixed: Vec<usize> = sample
        .items()
        .iter()
        .map(|&(x, _)| {
            let mut idx = 0usize;
            for h in prefix {
                idx = idx << 1 | h.value(x) as usize;
            }
            idx << 1 | z.label_point(x) as usize
        })
        .collect();
    // map each item to its offset inside the projected point list
    let offset_of: Vec<usize> = sample
        .items()
        .iter()
        .map(|&(x, _)| points.binary_search(&x).expect("point listed"))
        .collect();

    let k_suffix = projections.len();
    let mut choice = vec![0usize; k_suffix];
    let mut best = usize::MAX;
    loop {
        let mut errors = 0usize;
        for (item, &(_, y)) in sample.items().iter().enumerate() {
            let mut idx = fixed[item];
            for (j, p) in projections.iter().enumerate() {
                idx = idx << 1 | p.member(choice[j]).value(offset_of[item]) as usize;
            }
            if g.eval_index(idx) != y {
                errors += 1;
            }
            if errors >= best {
                break;
            }
        }
        best = best.min(errors);
        if best == 0 {
            return Ok(0);
        }
        let mut pos = k_suffix;
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < projections[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClosureOutcome {
    /// The aggregated predicate, materialized over the finite domain.
    pub composed: Hypothesis,
    pub parts: Vec<Hypothesis>,
    pub patterns: Vec<Pattern>,
    /// Index ranges of the blocks, recorded so disjointness is checkable.
    pub blocks: Vec<(usize, usize)>,
}

/// Learn `G(H_1, .., H_k)`: one contiguous block of the sample per class;
/// each block is halved, the first half drives the exponential mechanism
/// with the completion score, a ninth of the relabeled half is subsampled,
/// and the step's private learner runs on that.
pub fn closure_learn(
    s: &LabeledSample,
    g: &Aggregator,
    classes: &[HypothesisClass],
    learners: &[LearnerSpec],
    cap: usize,
    rngs: &mut DpRngs,
) -> Result<ClosureOutcome> {
    let k = g.arity();
    if classes.len() != k {
        return Err(Error::ArityMismatch {
            arity: k,
            classes: classes.len(),
        });
    }
    if learners.len() != k {
        return Err(Error::InvalidInput(format!(
            "need {k} learners, got {}",
            learners.len()
        )));
    }
    let domain = classes[0].domain();
    for c in classes {
        if c.domain() != domain {
            return Err(Error::DomainMismatch(domain.size(), c.domain().size()));
        }
    }
    if s.len() < 18 * k {
        return Err(Error::InvalidInput(format!(
            "closure learner needs at least 18k = {} examples, got {}",
            18 * k,
            s.len()
        )));
    }

    let block_len = s.len() / k;
    let mut blocks = Vec::with_capacity(k);
    for i in 0..k {
        let start = i * block_len;
        let end = if i + 1 == k {
            s.len()
        } else {
            start + block_len
        };
        blocks.push((start, end));
    }

    let mut parts: Vec<Hypothesis> = Vec::with_capacity(k);
    let mut patterns = Vec::with_capacity(k);
    for i in 0..k {
        let (start, end) = blocks[i];
        let s_i = LabeledSample::from_items_unchecked(s.items()[start..end].to_vec());
        let half = s_i.len().div_ceil(2);
        let (d_i, t_i) = s_i.split_at(half);

        let score = CompletionScore {
            g,
            prefix: &parts,
            suffix_classes: &classes[i + 1..],
            cap,
        };
        let out = relabel(&d_i, &t_i, &classes[i], &score, &mut rngs.mechanism)?;
        let m_sub = d_i.len() / 9;
        let q = super::subsample_with_replacement(&out.d_relabeled, m_sub, &mut rngs.subsampler)?;
        let h_i = learners[i].run(&q, &mut rngs.learner)?;
        parts.push(h_i);
        patterns.push(out.pattern);
    }

    let mut bits = Bits::zeros(domain.size());
    for x in domain.points() {
        let mut idx = 0usize;
        for h in &parts {
            idx = idx << 1 | h.value(x) as usize;
        }
        bits.set(x, g.eval_index(idx) == 1);
    }
    Ok(ClosureOutcome {
        composed: Hypothesis::new(bits),
        parts,
        patterns,
        blocks,
    })
}
