//! Exact and Monte-Carlo differential-privacy checks.
//!
//! The exact check computes the minimal delta making the (eps, delta)
//! inequality hold between two finite output distributions. The Monte-Carlo
//! audit is one-sided: it can refute a claimed budget with interval-separated
//! evidence but never proves it.

use crate::error::{Error, Result};
use crate::hclass::LabeledSample;
use crate::report::{ExperimentReport, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map};
use statrs::distribution::{Beta, ContinuousCDF};

/// Two-sided confidence level of the Clopper-Pearson intervals.
pub const AUDIT_CONFIDENCE: f64 = 0.99;

/// Samples differing in exactly one entry.
#[derive(Debug, Clone)]
pub struct NeighborPair {
    pub s1: LabeledSample,
    pub s2: LabeledSample,
    pub diff_index: usize,
}

impl NeighborPair {
    pub fn new(s1: LabeledSample, s2: LabeledSample) -> Result<Self> {
        if s1.len() != s2.len() {
            return Err(Error::InvalidInput(
                "neighboring samples must have equal length".into(),
            ));
        }
        let diffs: Vec<usize> = (0..s1.len())
            .filter(|&i| s1.items()[i] != s2.items()[i])
            .collect();
        if diffs.len() != 1 {
            return Err(Error::InvalidInput(format!(
                "neighbors must differ in exactly one entry, found {} differences",
                diffs.len()
            )));
        }
        Ok(NeighborPair {
            s1,
            s2,
            diff_index: diffs[0],
        })
    }
}

/// `sum_o max(0, P1(o) - e^eps * P2(o))`: the smallest delta for which
/// `P1(F) <= e^eps P2(F) + delta` holds over every event F.
pub fn exact_dp_delta(p1: &[f64], p2: &[f64], eps: f64) -> f64 {
    assert_eq!(
        p1.len(),
        p2.len(),
        "distributions over a common outcome set"
    );
    let scale = eps.exp();
    p1.iter()
        .zip(p2)
        .map(|(&a, &b)| (a - scale * b).max(0.0))
        .sum()
}

/// Exact Clopper-Pearson interval for `successes` out of `trials` at the
/// audit confidence level.
pub fn clopper_pearson(successes: usize, trials: usize) -> (f64, f64) {
    assert!(trials > 0);
    let a = (1.0 - AUDIT_CONFIDENCE) / 2.0;
    let k = successes as f64;
    let n = trials as f64;
    let lower = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0)
            .expect("valid beta")
            .inverse_cdf(a)
    };
    let upper = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k)
            .expect("valid beta")
            .inverse_cdf(1.0 - a)
    };
    (lower, upper)
}

/// A randomized mechanism under audit: maps a sample and a seeded stream to
/// an outcome.
pub trait AuditedMechanism: Sync {
    type Output;
    fn run(&self, sample: &LabeledSample, rng: &mut ChaCha8Rng) -> Self::Output;
}

impl<O, F: Fn(&LabeledSample, &mut ChaCha8Rng) -> O + Sync> AuditedMechanism for F {
    type Output = O;
    fn run(&self, sample: &LabeledSample, rng: &mut ChaCha8Rng) -> O {
        self(sample, rng)
    }
}

/// A named measurable event over the mechanism's output.
pub struct EventProbe<O> {
    pub name: String,
    pub predicate: Box<dyn Fn(&O) -> bool + Sync>,
}

impl<O> EventProbe<O> {
    pub fn new(name: impl Into<String>, predicate: impl Fn(&O) -> bool + Sync + 'static) -> Self {
        EventProbe {
            name: name.into(),
            predicate: Box::new(predicate),
        }
    }
}

fn event_counts<M: AuditedMechanism>(
    mech: &M,
    sample: &LabeledSample,
    events: &[EventProbe<M::Output>],
    trials: usize,
    seed: u64,
) -> Vec<usize> {
    const CHUNK: usize = 1024;
    let chunks: Vec<(usize, usize)> = (0..trials.div_ceil(CHUNK))
        .map(|c| (c, (trials - c * CHUNK).min(CHUNK)))
        .collect();
    let partials: Vec<Vec<usize>> = chunks
        .par_iter()
        .map(|&(chunk_idx, len)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk_idx as u64 + 1);
            let mut counts = vec![0usize; events.len()];
            for _ in 0..len {
                let out = mech.run(sample, &mut rng);
                for (e, c) in events.iter().zip(counts.iter_mut()) {
                    if (e.predicate)(&out) {
                        *c += 1;
                    }
                }
            }
            counts
        })
        .collect();
    let mut total = vec![0usize; events.len()];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

/// One-sided Monte-Carlo audit of a claimed (eps, delta) budget over an
/// event family: FAIL only when the confidence intervals prove a violation
/// in one of the two directions.
pub fn mc_dp_audit<M: AuditedMechanism>(
    mech: &M,
    pair: &NeighborPair,
    events: &[EventProbe<M::Output>],
    trials: usize,
    eps_claimed: f64,
    delta_claimed: f64,
    seed: u64,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("audit needs at least one trial".into()));
    }
    if events.is_empty() {
        return Err(Error::InvalidInput("audit needs at least one event".into()));
    }
    let mut report = ExperimentReport::new(
        "mc-dp-audit",
        json!({
            "trials": trials,
            "eps_claimed": eps_claimed,
            "delta_claimed": delta_claimed,
            "events": events.iter().map(|e| e.name.clone()).collect::<Vec<_>>(),
            "confidence": AUDIT_CONFIDENCE,
        }),
        Some(seed),
    );
    let c1 = event_counts(mech, &pair.s1, events, trials, seed ^ 0x51de_0001);
    let c2 = event_counts(mech, &pair.s2, events, trials, seed ^ 0x51de_0002);

    let scale = eps_claimed.exp();
    for (i, e) in events.iter().enumerate() {
        let (l1, u1) = clopper_pearson(c1[i], trials);
        let (l2, u2) = clopper_pearson(c2[i], trials);
        // proven violation in either direction refutes the claim
        let violates_forward = l1 > scale * u2 + delta_claimed;
        let violates_backward = l2 > scale * u1 + delta_claimed;
        let verdict = if violates_forward || violates_backward {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        let mut row = Map::new();
        row.insert("event".into(), json!(e.name));
        row.insert("p1_hat".into(), json!(c1[i] as f64 / trials as f64));
        row.insert("p2_hat".into(), json!(c2[i] as f64 / trials as f64));
        row.insert("p1_interval".into(), json!([l1, u1]));
        row.insert("p2_interval".into(), json!([l2, u2]));
        report.trials.push(row);
        report.push_verdict(
            &format!("dp-ratio:{}", e.name),
            verdict,
            format!(
                "p1 in [{l1:.5},{u1:.5}], p2 in [{l2:.5},{u2:.5}], e^eps={scale:.3}, delta={delta_claimed:.3e}"
            ),
        );
    }
    report.push_bound("dp-claim", "P1(F) <= e^eps P2(F) + delta", delta_claimed);
    Ok(report)
}

/// [`exp_mech_utility_check`] with the scores computed from a candidate set
/// and a score function on a concrete sample; `m` is the sample length.
pub fn exp_mech_utility_check_on_class<C: crate::dp::PointPredicate>(
    eps: f64,
    candidates: &[C],
    sample: &LabeledSample,
    q: &dyn crate::dp::Score,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    let scores: Vec<f64> = candidates.iter().map(|c| q.eval(sample, c)).collect();
    exp_mech_utility_check(eps, &scores, sample.len(), delta, trials, seed)
}

/// Compare the exact exponential-mechanism tail `P[q >= min + Delta*m]`
/// against the `|H| e^{-eps*Delta*m/2}` bound, and the empirical frequency
/// against the exact tail within a 3-sigma binomial band.
pub fn exp_mech_utility_check(
    eps: f64,
    scores: &[f64],
    m: usize,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    if scores.is_empty() {
        return Err(Error::InvalidInput("empty candidate set".into()));
    }
    let probs = crate::dp::exp_mech_weights(eps, scores);
    let emin = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let cut = emin + delta * m as f64;
    let exact_tail: f64 = probs
        .iter()
        .zip(scores)
        .filter(|&(_, &q)| q >= cut)
        .map(|(&p, _)| p)
        .sum();
    let bound = scores.len() as f64 * (-eps * delta * m as f64 / 2.0).exp();

    let mut report = ExperimentReport::new(
        "exp-mech-utility",
        json!({"eps": eps, "m": m, "delta": delta, "num_candidates": scores.len(), "trials": trials}),
        Some(seed),
    );
    report.push_bound("tail-bound", "|H|*exp(-eps*Delta*m/2)", bound);
    report.stat("exact_tail", json!(exact_tail));

    report.push_verdict(
        "exact-tail-le-bound",
        if exact_tail <= bound + 1e-12 {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        format!("exact {exact_tail:.3e} vs bound {bound:.3e}"),
    );

    if trials > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0usize;
        for _ in 0..trials {
            let idx = crate::dp::mechanism::sample_index(&probs, &mut rng);
            if scores[idx] >= cut {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        let sigma = (exact_tail * (1.0 - exact_tail) / trials as f64).sqrt();
        report.stat("mc_freq", json!(freq));
        report.stat("mc_sigma", json!(sigma));
        report.push_verdict(
            "mc-matches-exact",
            if (freq - exact_tail).abs() <= 3.0 * sigma + 2.0 / trials as f64 {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            format!("freq {freq:.5} vs exact {exact_tail:.5} (sigma {sigma:.2e})"),
        );
    }
    Ok(report)
}
