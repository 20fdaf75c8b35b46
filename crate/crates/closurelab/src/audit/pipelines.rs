//! Ready-made Monte-Carlo privacy audits of the learning pipelines on tiny
//! fixed instances, plus a planted non-private control that a sound auditor
//! must flag.

use super::{mc_dp_audit, EventProbe, NeighborPair};
use crate::dp::{
    closure_learn, generic_private_learner, relabel_and_learn, DpRngs, ErrorCountScore,
    LearnerSpec, PrivacyBudget, DEFAULT_COMPLETION_CAP,
};
use crate::error::Result;
use crate::hclass::{Aggregator, Hypothesis, HypothesisClass, LabeledSample};
use crate::report::ExperimentReport;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn label_events(n: usize) -> Vec<EventProbe<Hypothesis>> {
    (0..n)
        .flat_map(|x| {
            [
                EventProbe::new(format!("h({x})=1"), move |h: &Hypothesis| h.value(x) == 1),
                EventProbe::new(format!("h({x})=0"), move |h: &Hypothesis| h.value(x) == 0),
            ]
        })
        .collect()
}

/// Audit the relabel-then-learn pipeline against a claimed budget. The
/// neighbors differ in one record of D, the V part is fixed, and the events
/// are the learned hypothesis's labels at every point.
pub fn relabel_pipeline_audit(
    class: &HypothesisClass,
    trials: usize,
    seed: u64,
    eps_claimed: f64,
    delta_claimed: f64,
) -> Result<ExperimentReport> {
    let n = class.domain().size();
    let d1 = LabeledSample::from_items_unchecked(vec![(0, 1), (1 % n, 0), (2 % n, 1)]);
    let d2 = LabeledSample::from_items_unchecked(vec![(0, 1), (1 % n, 0), (2 % n, 0)]);
    let v = LabeledSample::from_items_unchecked(vec![(0, 0)]);
    let w = LabeledSample::from_items_unchecked(vec![(1 % n, 1)]);
    let pair = NeighborPair::new(
        LabeledSample::concat(&[&d1, &w]),
        LabeledSample::concat(&[&d2, &w]),
    )?;

    let class = class.clone();
    let learner = generic_private_learner(&class, PrivacyBudget::pure(1.0)?);
    let d_len = d1.len();
    let v_fixed = v;
    let mech = move |s: &LabeledSample, rng: &mut ChaCha8Rng| -> Hypothesis {
        let (d, w) = s.split_at(d_len);
        let mut rngs = DpRngs::from_seed(rng.gen());
        relabel_and_learn(
            &d,
            &v_fixed,
            &w,
            &class,
            &ErrorCountScore,
            &learner,
            &mut rngs,
        )
        .expect("tiny relabel pipeline")
        .learner_output
    };

    mc_dp_audit(
        &mech,
        &pair,
        &label_events(n),
        trials,
        eps_claimed,
        delta_claimed,
        seed,
    )
}

/// Audit the full closure learner at a claimed budget. A tiny realizable
/// sample of size 18k is built from target members, the neighbors flip one
/// record's label, and the events are the composed hypothesis's labels.
pub fn closure_pipeline_audit(
    g: &Aggregator,
    classes: &[HypothesisClass],
    trials: usize,
    seed: u64,
    eps_claimed: f64,
    delta_claimed: f64,
    diff_index: usize,
) -> Result<ExperimentReport> {
    let k = g.arity();
    let n = classes[0].domain().size();
    let total = 18 * k;
    let parts: Vec<&Hypothesis> = classes.iter().map(|c| c.member(c.len() / 2)).collect();
    let target = |x: usize| -> u8 {
        let mut idx = 0usize;
        for h in &parts {
            idx = idx << 1 | h.value(x) as usize;
        }
        g.eval_index(idx)
    };
    let base: Vec<(usize, u8)> = (0..total).map(|i| (i % n, target(i % n))).collect();
    let mut flipped = base.clone();
    flipped[diff_index].1 ^= 1;
    let pair = NeighborPair::new(
        LabeledSample::from_items_unchecked(base),
        LabeledSample::from_items_unchecked(flipped),
    )?;

    let g = g.clone();
    let classes = classes.to_vec();
    let learners: Vec<LearnerSpec> = classes
        .iter()
        .map(|c| generic_private_learner(c, PrivacyBudget::pure(1.0).expect("valid")))
        .collect();
    let mech = move |s: &LabeledSample, rng: &mut ChaCha8Rng| -> Hypothesis {
        let mut rngs = DpRngs::from_seed(rng.gen());
        closure_learn(
            s,
            &g,
            &classes,
            &learners,
            DEFAULT_COMPLETION_CAP,
            &mut rngs,
        )
        .expect("tiny closure pipeline")
        .composed
    };

    mc_dp_audit(
        &mech,
        &pair,
        &label_events(n),
        trials,
        eps_claimed,
        delta_claimed,
        seed,
    )
}

/// A deliberately non-private mechanism (it publishes the first record's
/// label); any sound auditor must FAIL it at a small budget.
pub fn planted_control_audit(
    trials: usize,
    seed: u64,
    eps_claimed: f64,
    delta_claimed: f64,
) -> Result<ExperimentReport> {
    let pair = NeighborPair::new(
        LabeledSample::from_items_unchecked(vec![(0, 1)]),
        LabeledSample::from_items_unchecked(vec![(0, 0)]),
    )?;
    let mech = |s: &LabeledSample, _rng: &mut ChaCha8Rng| s.items()[0].1;
    let events = vec![
        EventProbe::new("leak=1", |o: &u8| *o == 1),
        EventProbe::new("leak=0", |o: &u8| *o == 0),
    ];
    mc_dp_audit(
        &mech,
        &pair,
        &events,
        trials,
        eps_claimed,
        delta_claimed,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hclass::make_threshold_chain;

    #[test]
    fn relabel_pipeline_passes_small_audit() {
        let chain = make_threshold_chain(3);
        let rep = relabel_pipeline_audit(&chain, 4000, 42, 4.0, 0.0).unwrap();
        assert!(!rep.any_fail());
    }

    #[test]
    fn control_is_flagged() {
        let rep = planted_control_audit(3000, 42, 1.0, 0.001).unwrap();
        assert!(rep.any_fail());
    }
}
