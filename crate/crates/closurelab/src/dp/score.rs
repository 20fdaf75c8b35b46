//! Score functions for the exponential mechanism and the empirical
//! matched-sensitivity probe.
//!
//! Built-in scores are integer counts, never rates, so a declared
//! matched-sensitivity of 1 is exact rather than approximate.

use super::PointPredicate;
use crate::hclass::{Aggregator, HypothesisClass, LabeledSample};
use rand::Rng;

pub trait Score {
    fn declared_matched_sensitivity(&self) -> f64;
    fn eval(&self, sample: &LabeledSample, hyp: &dyn PointPredicate) -> f64;
    fn name(&self) -> &'static str;
}

/// `q(S, h)` = number of items of S that h mislabels.
#[derive(Debug, Clone, Copy, Default)]
pub struct ErrorCountScore;

impl Score for ErrorCountScore {
    fn declared_matched_sensitivity(&self) -> f64 {
        1.0
    }

    fn eval(&self, sample: &LabeledSample, hyp: &dyn PointPredicate) -> f64 {
        sample
            .items()
            .iter()
            .filter(|&&(x, y)| hyp.label_point(x) != y)
            .count() as f64
    }

    fn name(&self) -> &'static str {
        "error-count"
    }
}

/// Error count times a constant; a factor above 1 deliberately breaks the
/// sensitivity-1 contract, which the probe must detect.
#[derive(Debug, Clone, Copy)]
pub struct ScaledErrorCountScore(pub f64);

impl Score for ScaledErrorCountScore {
    fn declared_matched_sensitivity(&self) -> f64 {
        self.0
    }

    fn eval(&self, sample: &LabeledSample, hyp: &dyn PointPredicate) -> f64 {
        self.0
            * sample
                .items()
                .iter()
                .filter(|&&(x, y)| hyp.label_point(x) != y)
                .count() as f64
    }

    fn name(&self) -> &'static str {
        "scaled-error-count"
    }
}

/// The step-i score of the closure learner: the smallest error count any
/// completion of the fixed prefix and the candidate can reach on the sample.
pub struct CompletionScore<'a> {
    pub g: &'a Aggregator,
    pub prefix: &'a [crate::hclass::Hypothesis],
    pub suffix_classes: &'a [HypothesisClass],
    pub cap: usize,
}

impl Score for CompletionScore<'_> {
    fn declared_matched_sensitivity(&self) -> f64 {
        1.0
    }

    fn eval(&self, sample: &LabeledSample, hyp: &dyn PointPredicate) -> f64 {
        super::completion_score(
            sample,
            self.prefix,
            hyp,
            self.g,
            self.suffix_classes,
            self.cap,
        )
        .expect("completion cap exceeded during scoring") as f64
    }

    fn name(&self) -> &'static str {
        "completion"
    }
}

/// Randomized search for matched-sensitivity violations: draw a base sample,
/// two appended records, and two hypotheses agreeing on the base, and report
/// the largest score gap observed.
pub fn check_matched_sensitivity(
    q: &dyn Score,
    class: &HypothesisClass,
    trials: usize,
    rng: &mut impl Rng,
) -> f64 {
    let n = class.domain().size();
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let base_len = rng.gen_range(0..=2 * n);
        let base: Vec<(usize, u8)> = (0..base_len)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..2u8)))
            .collect();
        let base = LabeledSample::from_items_unchecked(base);
        let h = class.member(rng.gen_range(0..class.len()));
        let agreeing: Vec<usize> = (0..class.len())
            .filter(|&i| {
                base.items()
                    .iter()
                    .all(|&(x, _)| class.member(i).value(x) == h.value(x))
            })
            .collect();
        let h2 = class.member(agreeing[rng.gen_range(0..agreeing.len())]);

        let mut s1 = base.clone();
        s1.push(rng.gen_range(0..n), rng.gen_range(0..2u8));
        let mut s2 = base;
        s2.push(rng.gen_range(0..n), rng.gen_range(0..2u8));

        let gap = (q.eval(&s1, h) - q.eval(&s2, h2)).abs();
        worst = worst.max(gap);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hclass::make_threshold_chain;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    struct ConstScore;
    impl Score for ConstScore {
        fn declared_matched_sensitivity(&self) -> f64 {
            0.0
        }
        fn eval(&self, _s: &LabeledSample, _h: &dyn PointPredicate) -> f64 {
            42.0
        }
        fn name(&self) -> &'static str {
            "const"
        }
    }

    #[test]
    fn constant_score_has_zero_sensitivity() {
        let chain = make_threshold_chain(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let worst = check_matched_sensitivity(&ConstScore, &chain, 500, &mut rng);
        assert_eq!(worst, 0.0);
    }

    #[test]
    fn error_count_is_matched_sensitivity_one() {
        let chain = make_threshold_chain(5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let worst = check_matched_sensitivity(&ErrorCountScore, &chain, 3000, &mut rng);
        assert!(worst <= 1.0, "observed violation {worst}");
    }

    #[test]
    fn doubled_score_violates() {
        let chain = make_threshold_chain(5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let worst = check_matched_sensitivity(&ScaledErrorCountScore(2.0), &chain, 3000, &mut rng);
        assert!(worst > 1.0, "expected a violation, saw {worst}");
        assert!(worst <= 2.0 + 1e-12);
    }
}
