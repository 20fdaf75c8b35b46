//! The exponential mechanism over a finite candidate set.

use super::{PointPredicate, Score};
use crate::error::{Error, Result};
use crate::hclass::LabeledSample;
use rand::Rng;

/// Normalized selection probabilities `exp(-eps*q/2) / sum`, computed after
/// subtracting the minimum score. Sums use compensated accumulation so large
/// candidate sets keep their relative error bounded.
pub fn exp_mech_weights(eps: f64, scores: &[f64]) -> Vec<f64> {
    assert!(!scores.is_empty());
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = scores
        .iter()
        .map(|&q| (-eps * (q - min) / 2.0).exp())
        .collect();
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &w in &raw {
        let y = w - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    raw.iter().map(|&w| w / sum).collect()
}

/// The exact output distribution of the mechanism on this candidate set.
pub fn exp_mech_output_distribution<C: PointPredicate>(
    eps: f64,
    candidates: &[C],
    sample: &LabeledSample,
    q: &dyn Score,
) -> Result<Vec<f64>> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("empty candidate set".into()));
    }
    let scores: Vec<f64> = candidates.iter().map(|c| q.eval(sample, c)).collect();
    Ok(exp_mech_weights(eps, &scores))
}

/// Draw one candidate index with probability proportional to
/// `exp(-eps * q(S, h) / 2)`.
pub fn exponential_mechanism<C: PointPredicate>(
    eps: f64,
    candidates: &[C],
    sample: &LabeledSample,
    q: &dyn Score,
    rng: &mut impl Rng,
) -> Result<usize> {
    let probs = exp_mech_output_distribution(eps, candidates, sample, q)?;
    Ok(sample_index(&probs, rng))
}

pub(crate) fn sample_index(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}
