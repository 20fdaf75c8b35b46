//! Relabeling through the exponential mechanism, and the relabel-then-learn
//! composition around it.
//!
//! The candidate set is the projection of the class onto the points of the
//! combined sample, the mechanism always runs with privacy parameter 1 and
//! scores candidates on the first database only, and the chosen pattern
//! rewrites every label in both databases.

use super::{exponential_mechanism, LearnerSpec, PointPredicate, Score};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::hclass::{Hypothesis, HypothesisClass, LabeledSample};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A labeling of a finite point set: the restriction of some hypothesis to
/// `points` (kept sorted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    points: Vec<usize>,
    values: Bits,
}

impl Pattern {
    pub fn new(points: Vec<usize>, values: Bits) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::InvalidInput(
                "pattern points and values differ in length".into(),
            ));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("pattern points not sorted".into()));
        }
        Ok(Pattern { points, values })
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn values(&self) -> &Bits {
        &self.values
    }

    pub fn covers(&self, point: usize) -> bool {
        self.points.binary_search(&point).is_ok()
    }

    /// True iff `h` restricted to the pattern's points equals the pattern.
    pub fn agrees_with(&self, h: &Hypothesis) -> bool {
        self.points
            .iter()
            .enumerate()
            .all(|(j, &x)| h.value(x) == self.values.get(j) as u8)
    }
}

impl PointPredicate for Pattern {
    fn label_point(&self, point: usize) -> u8 {
        let j = self
            .points
            .binary_search(&point)
            .expect("point outside pattern support");
        self.values.get(j) as u8
    }
}

#[derive(Debug, Clone)]
pub struct RelabelOutcome {
    pub d_relabeled: LabeledSample,
    pub t_relabeled: LabeledSample,
    /// The selected pattern; exposed for audits and tests only, it is not
    /// part of the private interface.
    pub pattern: Pattern,
    pub candidate_count: usize,
}

/// Projection of the class onto `points`, materialized as patterns.
pub fn pattern_candidates(class: &HypothesisClass, points: &[usize]) -> Result<Vec<Pattern>> {
    let projected = class.project(points)?;
    projected
        .members()
        .iter()
        .map(|m| Pattern::new(points.to_vec(), m.bits().clone()))
        .collect()
}

fn relabeled(sample: &LabeledSample, pattern: &Pattern) -> LabeledSample {
    LabeledSample::from_items_unchecked(
        sample
            .items()
            .iter()
            .map(|&(x, _)| (x, pattern.label_point(x)))
            .collect(),
    )
}

pub fn relabel(
    d: &LabeledSample,
    t: &LabeledSample,
    class: &HypothesisClass,
    q: &dyn Score,
    rng: &mut impl Rng,
) -> Result<RelabelOutcome> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    if q.declared_matched_sensitivity() > 1.0 {
        return Err(Error::InvalidInput(format!(
            "relabel requires a matched-sensitivity-1 score, got {}",
            q.declared_matched_sensitivity()
        )));
    }
    let combined = LabeledSample::concat(&[d, t]);
    let points = combined.distinct_points();
    if points.is_empty() {
        return Err(Error::InvalidInput("relabel of an empty sample".into()));
    }
    let candidates = pattern_candidates(class, &points)?;
    let chosen = exponential_mechanism(1.0, &candidates, d, q, rng)?;
    let pattern = candidates[chosen].clone();
    Ok(RelabelOutcome {
        d_relabeled: relabeled(d, &pattern),
        t_relabeled: relabeled(t, &pattern),
        candidate_count: candidates.len(),
        pattern,
    })
}

#[derive(Debug, Clone)]
pub struct RelabelAndLearnOutcome {
    pub learner_output: Hypothesis,
    pub v_relabeled: LabeledSample,
    /// The canonically first member of the class consistent with the
    /// relabeled V part.
    pub consistent_member: Hypothesis,
    pub pattern: Pattern,
}

/// Relabel `(D, V∘W)`, pick the first member consistent with the relabeled
/// V, and run the learner on the fully relabeled sample.
pub fn relabel_and_learn(
    d: &LabeledSample,
    v: &LabeledSample,
    w: &LabeledSample,
    class: &HypothesisClass,
    q: &dyn Score,
    learner: &LearnerSpec,
    rngs: &mut super::DpRngs,
) -> Result<RelabelAndLearnOutcome> {
    let vw = LabeledSample::concat(&[v, w]);
    let out = relabel(d, &vw, class, q, &mut rngs.mechanism)?;
    let (v_relabeled, w_relabeled) = out.t_relabeled.split_at(v.len());

    let consistent_member = class
        .members()
        .iter()
        .find(|h| v_relabeled.is_consistent_with(h))
        .cloned()
        .ok_or_else(|| {
            Error::Internal("relabeled V admits no consistent member, projection broken".into())
        })?;

    let full = LabeledSample::concat(&[&out.d_relabeled, &v_relabeled, &w_relabeled]);
    let learner_output = learner.run(&full, &mut rngs.learner)?;
    Ok(RelabelAndLearnOutcome {
        learner_output,
        v_relabeled,
        consistent_member,
        pattern: out.pattern,
    })
}
