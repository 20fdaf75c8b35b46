//! Differentially private learning: the exponential mechanism, relabeling,
//! relabel-and-learn, the private agnostic transformation, the closure
//! learner, and the sample-size calculators.

mod bounds;
mod closure;
mod learner;
pub(crate) mod mechanism;
mod relabel;
mod score;

pub use bounds::{sample_size_bounds, BoundKind, BoundParams, BoundReport};
pub use closure::{closure_learn, completion_score, ClosureOutcome, DEFAULT_COMPLETION_CAP};
pub use learner::{
    generic_private_learner, private_agnostic, subsample_with_replacement, LearnerKind, LearnerSpec,
};
pub use mechanism::{exp_mech_output_distribution, exp_mech_weights, exponential_mechanism};
pub use relabel::{relabel, relabel_and_learn, Pattern, RelabelAndLearnOutcome, RelabelOutcome};
pub use score::{
    check_matched_sensitivity, CompletionScore, ErrorCountScore, ScaledErrorCountScore, Score,
};

use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One seeded stream per randomized site of the learning pipelines, so a
/// single seed reproduces the mechanism draws, the subsample, and the
/// learner coins independently of each other.
#[derive(Debug, Clone)]
pub struct DpRngs {
    pub mechanism: ChaCha8Rng,
    pub subsampler: ChaCha8Rng,
    pub learner: ChaCha8Rng,
}

impl DpRngs {
    pub fn from_seed(seed: u64) -> Self {
        let mk = |stream: u64| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(stream);
            r
        };
        DpRngs {
            mechanism: mk(0x6d65),
            subsampler: mk(0x7375),
            learner: mk(0x6c65),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    pub epsilon: f64,
    pub delta: f64,
}

impl PrivacyBudget {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::InvalidInput(format!("epsilon {epsilon} < 0")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidInput(format!("delta {delta} not in [0,1]")));
        }
        Ok(PrivacyBudget { epsilon, delta })
    }

    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyTarget {
    pub alpha: f64,
    pub beta: f64,
}

impl AccuracyTarget {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidInput(format!("{name} {v} not in (0,1)")));
            }
        }
        Ok(AccuracyTarget { alpha, beta })
    }
}

/// Anything that labels domain points; hypotheses, projected patterns, and
/// composed predicates all implement it.
pub trait PointPredicate {
    fn label_point(&self, point: usize) -> u8;
}

impl PointPredicate for crate::hclass::Hypothesis {
    fn label_point(&self, point: usize) -> u8 {
        self.value(point)
    }
}

impl<T: PointPredicate + ?Sized> PointPredicate for &T {
    fn label_point(&self, point: usize) -> u8 {
        (**self).label_point(point)
    }
}
