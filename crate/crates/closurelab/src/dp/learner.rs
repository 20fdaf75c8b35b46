//! Learner specifications, the generic finite-class private learner,
//! subsampling, and the private agnostic transformation.

use super::{exponential_mechanism, relabel, ErrorCountScore, PrivacyBudget};
use crate::error::{Error, Result};
use crate::hclass::{Hypothesis, HypothesisClass, LabeledSample};
use rand::{Rng, RngCore};
use std::sync::Arc;

/// Boxed test mechanism: sample and coins to a hypothesis.
pub type CustomLearnerFn =
    Arc<dyn Fn(&LabeledSample, &mut dyn RngCore) -> Hypothesis + Send + Sync>;

/// How a learner maps a sample to a hypothesis.
#[derive(Clone)]
pub enum LearnerKind {
    /// Exponential mechanism over all class members with the error-count
    /// score; the budget's epsilon drives the mechanism.
    ExpMechErm { class: HypothesisClass },
    /// Deterministic test helper: the canonically first member consistent
    /// with the sample, falling back to the first member overall.
    CanonicalFirstConsistent { class: HypothesisClass },
    /// Arbitrary test mechanism.
    Custom(CustomLearnerFn),
}

/// A learning procedure plus its declared privacy/propriety metadata and
/// sample-complexity rule.
#[derive(Clone)]
pub struct LearnerSpec {
    pub name: String,
    pub proper: bool,
    pub budget: PrivacyBudget,
    kind: LearnerKind,
}

impl LearnerSpec {
    pub fn new(
        name: impl Into<String>,
        proper: bool,
        budget: PrivacyBudget,
        kind: LearnerKind,
    ) -> Self {
        LearnerSpec {
            name: name.into(),
            proper,
            budget,
            kind,
        }
    }

    pub fn run(&self, sample: &LabeledSample, rng: &mut impl Rng) -> Result<Hypothesis> {
        match &self.kind {
            LearnerKind::ExpMechErm { class } => {
                let idx = exponential_mechanism(
                    self.budget.epsilon,
                    class.members(),
                    sample,
                    &ErrorCountScore,
                    rng,
                )?;
                Ok(class.member(idx).clone())
            }
            LearnerKind::CanonicalFirstConsistent { class } => {
                if class.is_empty() {
                    return Err(Error::EmptyClass);
                }
                Ok(class
                    .members()
                    .iter()
                    .find(|h| sample.is_consistent_with(h))
                    .unwrap_or(class.member(0))
                    .clone())
            }
            LearnerKind::Custom(f) => Ok(f(sample, rng)),
        }
    }

    /// Realizable sample complexity m(alpha, beta) at the learner's own
    /// epsilon: the exponential-mechanism tail gives
    /// m >= 2 ln(|H|/beta) / (eps * alpha).
    pub fn sample_complexity(&self, alpha: f64, beta: f64) -> usize {
        match &self.kind {
            LearnerKind::ExpMechErm { class } => {
                let m = 2.0 * ((class.len() as f64 / beta).ln()) / (self.budget.epsilon * alpha);
                m.ceil().max(1.0) as usize
            }
            _ => 1,
        }
    }
}

/// The generic private proper learner for a finite class: the exponential
/// mechanism with the error-count score over all members.
pub fn generic_private_learner(class: &HypothesisClass, budget: PrivacyBudget) -> LearnerSpec {
    LearnerSpec::new(
        format!("exp-mech-erm({})", class.len()),
        true,
        budget,
        LearnerKind::ExpMechErm {
            class: class.clone(),
        },
    )
}

/// `m` i.i.d. uniform draws from the items of `s`.
pub fn subsample_with_replacement(
    s: &LabeledSample,
    m: usize,
    rng: &mut impl Rng,
) -> Result<LabeledSample> {
    if s.is_empty() {
        return Err(Error::InvalidInput("subsample of an empty sample".into()));
    }
    let items = (0..m)
        .map(|_| s.items()[rng.gen_range(0..s.len())])
        .collect();
    Ok(LabeledSample::from_items_unchecked(items))
}

/// The private agnostic transformation: split in half, relabel the first
/// half against the class, subsample a ninth of it, and hand that to the
/// private realizable learner.
pub fn private_agnostic(
    s: &LabeledSample,
    class: &HypothesisClass,
    learner: &LearnerSpec,
    rngs: &mut super::DpRngs,
) -> Result<Hypothesis> {
    if s.len() < 2 || !s.len().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "private agnostic needs an even sample of at least 2, got {}",
            s.len()
        )));
    }
    let (d, t) = s.split_at(s.len() / 2);
    let m_sub = d.len() / 9;
    if m_sub == 0 {
        return Err(Error::InvalidInput(format!(
            "sample too small: |D| = {} leaves no subsample",
            d.len()
        )));
    }
    let out = relabel(&d, &t, class, &ErrorCountScore, &mut rngs.mechanism)?;
    let q = subsample_with_replacement(&out.d_relabeled, m_sub, &mut rngs.subsampler)?;
    learner.run(&q, &mut rngs.learner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::exact_dp_delta;
    use crate::dp::exp_mech_output_distribution;
    use crate::hclass::{make_threshold_chain, Domain};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample(domain: usize, items: &[(usize, u8)]) -> LabeledSample {
        LabeledSample::new(Domain::new(domain).unwrap(), items.to_vec()).unwrap()
    }

    #[test]
    fn subsample_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = sample(3, &[(0, 1)]);
        assert_eq!(
            subsample_with_replacement(&s, 0, &mut rng).unwrap().len(),
            0
        );
        let five = subsample_with_replacement(&s, 5, &mut rng).unwrap();
        assert_eq!(five.items(), &[(0, 1); 5]);
        let empty = LabeledSample::from_items_unchecked(vec![]);
        assert!(subsample_with_replacement(&empty, 3, &mut rng).is_err());
    }

    #[test]
    fn subsample_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = sample(4, &[(0, 0), (1, 0), (2, 1), (3, 1)]);
        let draws = 100_000usize;
        let got = subsample_with_replacement(&s, draws, &mut rng).unwrap();
        let mut counts = [0usize; 4];
        for &(x, _) in got.items() {
            counts[x] += 1;
        }
        let p = 0.25;
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        for &c in &counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - p).abs() <= 3.0 * sigma, "freq {freq}");
        }
    }

    #[test]
    fn singleton_learner_always_returns_member() {
        let class = HypothesisClass::from_strs(&["0101"]).unwrap();
        let spec = generic_private_learner(&class, PrivacyBudget::pure(1.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = sample(4, &[(0, 1), (2, 0)]);
        assert_eq!(spec.run(&s, &mut rng).unwrap(), *class.member(0));
        assert!(spec.proper);
    }

    #[test]
    fn generic_learner_hits_low_error_with_high_frequency() {
        let chain = make_threshold_chain(6);
        let target = chain.member(3).clone();
        let spec = generic_private_learner(&chain, PrivacyBudget::pure(1.0).unwrap());
        let alpha = 0.2;
        let beta = 0.1;
        let m = spec.sample_complexity(alpha, beta);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let trials = 300;
        let mut good = 0;
        for _ in 0..trials {
            let items: Vec<(usize, u8)> = (0..m)
                .map(|_| {
                    let x = rng.gen_range(0..6);
                    (x, target.value(x))
                })
                .collect();
            let s = LabeledSample::from_items_unchecked(items);
            let h = spec.run(&s, &mut rng).unwrap();
            if (s.error_count(&h) as f64) <= alpha * s.len() as f64 {
                good += 1;
            }
        }
        let want =
            (1.0 - beta) * trials as f64 - 3.0 * (beta * (1.0 - beta) * trials as f64).sqrt();
        assert!(good as f64 >= want, "only {good}/{trials} accurate runs");
    }

    #[test]
    fn generic_learner_is_exactly_dp_on_tiny_neighbors() {
        let chain = make_threshold_chain(3);
        let eps = 1.0;
        let s1 = sample(3, &[(0, 1), (1, 0)]);
        let s2 = sample(3, &[(0, 1), (1, 1)]);
        let p1 = exp_mech_output_distribution(eps, chain.members(), &s1, &ErrorCountScore).unwrap();
        let p2 = exp_mech_output_distribution(eps, chain.members(), &s2, &ErrorCountScore).unwrap();
        assert!(exact_dp_delta(&p1, &p2, eps) <= 1e-9);
        assert!(exact_dp_delta(&p2, &p1, eps) <= 1e-9);
    }

    #[test]
    fn private_agnostic_validates_input() {
        let chain = make_threshold_chain(3);
        let spec = generic_private_learner(&chain, PrivacyBudget::pure(1.0).unwrap());
        let mut rngs = crate::dp::DpRngs::from_seed(5);
        let odd = sample(3, &[(0, 1), (1, 0), (2, 1)]);
        assert!(private_agnostic(&odd, &chain, &spec, &mut rngs).is_err());
        let tiny = sample(3, &[(0, 1), (1, 0)]);
        assert!(private_agnostic(&tiny, &chain, &spec, &mut rngs).is_err());
    }

    #[test]
    fn private_agnostic_singleton_class() {
        let class = HypothesisClass::from_strs(&["011"]).unwrap();
        let spec = generic_private_learner(&class, PrivacyBudget::pure(1.0).unwrap());
        let mut rngs = crate::dp::DpRngs::from_seed(6);
        let items: Vec<(usize, u8)> = (0..36).map(|i| (i % 3, (i % 2) as u8)).collect();
        let s = LabeledSample::from_items_unchecked(items);
        let h = private_agnostic(&s, &class, &spec, &mut rngs).unwrap();
        assert_eq!(h, *class.member(0));
    }

    #[test]
    fn private_agnostic_learns_realizable_data() {
        let chain = make_threshold_chain(4);
        let target = chain.member(2).clone();
        let spec = generic_private_learner(&chain, PrivacyBudget::pure(1.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 400usize;
        let mut low_error = 0usize;
        let trials = 60;
        for trial in 0..trials {
            let items: Vec<(usize, u8)> = (0..n)
                .map(|_| {
                    let x = rng.gen_range(0..4);
                    (x, target.value(x))
                })
                .collect();
            let s = LabeledSample::from_items_unchecked(items);
            let mut rngs = crate::dp::DpRngs::from_seed(700 + trial as u64);
            let h = private_agnostic(&s, &chain, &spec, &mut rngs).unwrap();
            if (s.error_count(&h) as f64) <= 0.25 * n as f64 {
                low_error += 1;
            }
        }
        assert!(low_error >= trials * 9 / 10, "{low_error}/{trials}");
    }
}
