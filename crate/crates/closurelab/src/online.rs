//! Realizable online learning: the Standard Optimal Algorithm, weighted
//! majority over experts, the union learner, game replay, and the exhaustive
//! worst-case adversary.

use crate::bits::Bits;
use crate::dims::LdimEngine;
use crate::error::{Error, Result};
use crate::hclass::HypothesisClass;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

/// Default node budget for the exhaustive adversary search.
pub const ADVERSARY_NODE_BUDGET: usize = 1_000_000;

/// A deterministic online learner. Predictions must depend only on the
/// construction parameters and the observed (point, label) history;
/// `state_digest` must expose exactly the state that determines future
/// behavior so the game-tree search can merge equivalent positions.
pub trait OnlineLearner {
    fn predict(&mut self, point: usize) -> u8;
    fn update(&mut self, point: usize, truth: u8);
    fn state_digest(&self) -> Vec<u64>;
    fn realizability_violated(&self) -> bool {
        false
    }
}

#[derive(Debug)]
struct SoaShared {
    class: HypothesisClass,
    engine: RefCell<LdimEngine>,
}

/// Standard Optimal Algorithm: keep the version space, predict the label
/// whose consistent restriction has the larger Littlestone dimension
/// (ties predict 1), then drop inconsistent members.
#[derive(Clone)]
pub struct SoaLearner {
    shared: Rc<SoaShared>,
    version: Bits,
    violated: bool,
}

impl SoaLearner {
    pub fn new(class: &HypothesisClass) -> Result<Self> {
        if class.is_empty() {
            return Err(Error::EmptyClass);
        }
        let engine = LdimEngine::new(class);
        let version = engine.full_set();
        Ok(SoaLearner {
            shared: Rc::new(SoaShared {
                class: class.clone(),
                engine: RefCell::new(engine),
            }),
            version,
            violated: false,
        })
    }

    pub fn version_space(&self) -> &Bits {
        &self.version
    }

    pub fn class(&self) -> &HypothesisClass {
        &self.shared.class
    }
}

impl OnlineLearner for SoaLearner {
    fn predict(&mut self, point: usize) -> u8 {
        let mut engine = self.shared.engine.borrow_mut();
        let v1 = engine.restrict(&self.version, point, 1);
        let v0 = engine.restrict(&self.version, point, 0);
        let d1 = engine.ldim(&v1);
        let d0 = engine.ldim(&v0);
        (d1 >= d0) as u8
    }

    fn update(&mut self, point: usize, truth: u8) {
        let engine = self.shared.engine.borrow();
        self.version = engine.restrict(&self.version, point, truth);
        if self.version.is_zero() {
            self.violated = true;
        }
    }

    fn state_digest(&self) -> Vec<u64> {
        let mut d = self.version.blocks().to_vec();
        d.push(self.violated as u64);
        d
    }

    fn realizability_violated(&self) -> bool {
        self.violated
    }
}

/// Weighted majority over a pool of experts. Expert weights are beta^c
/// where c counts that expert's mistakes; the counts are the exact
/// log-space representation of the weights, and vote sums are rescaled by
/// the minimum count so long runs cannot underflow.
#[derive(Clone)]
pub struct WeightedMajorityLearner<L: OnlineLearner> {
    experts: Vec<L>,
    beta: f64,
    mistake_counts: Vec<u64>,
}

impl<L: OnlineLearner> WeightedMajorityLearner<L> {
    pub fn new(experts: Vec<L>, beta: f64) -> Result<Self> {
        if experts.is_empty() {
            return Err(Error::InvalidInput("need at least one expert".into()));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidInput(format!("beta {beta} not in (0,1)")));
        }
        let n = experts.len();
        Ok(WeightedMajorityLearner {
            experts,
            beta,
            mistake_counts: vec![0; n],
        })
    }

    pub fn mistake_counts(&self) -> &[u64] {
        &self.mistake_counts
    }

    pub fn best_expert_mistakes(&self) -> u64 {
        self.mistake_counts.iter().copied().min().unwrap_or(0)
    }

    fn expert_predictions(&mut self, point: usize) -> Vec<u8> {
        self.experts.iter_mut().map(|e| e.predict(point)).collect()
    }
}

impl<L: OnlineLearner> OnlineLearner for WeightedMajorityLearner<L> {
    fn predict(&mut self, point: usize) -> u8 {
        let preds = self.expert_predictions(point);
        let cmin = *self.mistake_counts.iter().min().expect("nonempty");
        let mut mass = [0.0f64; 2];
        for (i, &p) in preds.iter().enumerate() {
            let rel = (self.mistake_counts[i] - cmin) as i32;
            mass[p as usize] += self.beta.powi(rel);
        }
        (mass[1] >= mass[0]) as u8
    }

    fn update(&mut self, point: usize, truth: u8) {
        let preds = self.expert_predictions(point);
        for (i, &p) in preds.iter().enumerate() {
            if p != truth {
                self.mistake_counts[i] += 1;
            }
            self.experts[i].update(point, truth);
        }
    }

    fn state_digest(&self) -> Vec<u64> {
        let cmin = *self.mistake_counts.iter().min().expect("nonempty");
        let mut d = Vec::new();
        for (i, e) in self.experts.iter().enumerate() {
            let sub = e.state_digest();
            d.push(0xfeed_0000 ^ sub.len() as u64);
            d.extend(sub);
            // only the count differences matter for future votes
            d.push(self.mistake_counts[i] - cmin);
        }
        d
    }

    fn realizability_violated(&self) -> bool {
        self.experts.iter().all(|e| e.realizability_violated())
    }
}

/// The union learner: weighted majority with beta = 1/2 over one SOA expert
/// per class.
pub fn union_learner(classes: &[HypothesisClass]) -> Result<WeightedMajorityLearner<SoaLearner>> {
    if classes.is_empty() {
        return Err(Error::InvalidInput("need at least one class".into()));
    }
    let domain = classes[0].domain();
    for c in classes {
        if c.domain() != domain {
            return Err(Error::DomainMismatch(domain.size(), c.domain().size()));
        }
    }
    let experts = classes
        .iter()
        .map(SoaLearner::new)
        .collect::<Result<Vec<_>>>()?;
    WeightedMajorityLearner::new(experts, 0.5)
}

/// The mistake bound of weighted majority with k experts whose best member
/// errs d times: (log2 k + d log2(1/beta)) / log2(2/(1+beta)).
pub fn wm_mistake_bound(k: usize, d: usize, beta: f64) -> f64 {
    assert!(k >= 1 && beta > 0.0 && beta < 1.0);
    ((k as f64).log2() + d as f64 * (1.0 / beta).log2()) / (2.0 / (1.0 + beta)).log2()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MistakeLog {
    pub rounds: Vec<(usize, u8, u8)>,
    pub mistake_count: usize,
    pub bound_claimed: Option<f64>,
}

impl MistakeLog {
    pub fn recount(&self) -> usize {
        self.rounds.iter().filter(|&&(_, p, t)| p != t).count()
    }
}

/// Replay a sequence against a learner. The sequence must be consistent
/// with some member of the class.
pub fn run_realizable_game(
    class: &HypothesisClass,
    learner: &mut dyn OnlineLearner,
    seq: &[(usize, u8)],
    bound_claimed: Option<f64>,
) -> Result<MistakeLog> {
    let realizable = class
        .members()
        .iter()
        .any(|h| seq.iter().all(|&(x, y)| h.value(x) == y));
    if !realizable {
        return Err(Error::NotRealizable);
    }
    let mut rounds = Vec::with_capacity(seq.len());
    let mut mistakes = 0;
    for &(x, y) in seq {
        let p = learner.predict(x);
        if p != y {
            mistakes += 1;
        }
        learner.update(x, y);
        rounds.push((x, p, y));
    }
    Ok(MistakeLog {
        rounds,
        mistake_count: mistakes,
        bound_claimed,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdversaryOutcome {
    pub sequence: Vec<(usize, u8)>,
    pub forced_mistakes: usize,
    pub nodes_expanded: usize,
}

struct AdversarySearch<'a, L: OnlineLearner + Clone> {
    class: &'a HypothesisClass,
    ones: Vec<Bits>,
    zeros: Vec<Bits>,
    memo: HashMap<(Vec<u64>, usize), usize>,
    nodes: usize,
    budget: usize,
    _marker: std::marker::PhantomData<L>,
}

impl<L: OnlineLearner + Clone> AdversarySearch<'_, L> {
    fn key(&self, learner: &L, consistent: &Bits, remaining: usize) -> (Vec<u64>, usize) {
        let mut k = learner.state_digest();
        k.push(0xc0de);
        k.extend_from_slice(consistent.blocks());
        (k, remaining)
    }

    /// Maximum mistakes the adversary can force within `remaining` rounds,
    /// keeping the full sequence realizable.
    fn value(&mut self, learner: &L, consistent: &Bits, remaining: usize) -> Result<usize> {
        if remaining == 0 {
            return Ok(0);
        }
        let key = self.key(learner, consistent, remaining);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ResourceLimit(format!(
                "adversary search exceeded {} nodes",
                self.budget
            )));
        }
        let mut best = 0usize;
        for x in 0..self.class.domain().size() {
            for y in 0..2u8 {
                let next = if y == 1 {
                    consistent.and(&self.ones[x])
                } else {
                    consistent.and(&self.zeros[x])
                };
                if next.is_zero() {
                    continue;
                }
                let mut l = learner.clone();
                let p = l.predict(x);
                l.update(x, y);
                let v = (p != y) as usize + self.value(&l, &next, remaining - 1)?;
                best = best.max(v);
                if best == remaining {
                    break;
                }
            }
        }
        self.memo.insert(key, best);
        Ok(best)
    }

    /// Rebuild the lexicographically first optimal sequence from the memo.
    fn reconstruct(
        &mut self,
        learner: &L,
        consistent: &Bits,
        remaining: usize,
    ) -> Result<Vec<(usize, u8)>> {
        let mut seq = Vec::with_capacity(remaining);
        let mut learner = learner.clone();
        let mut consistent = consistent.clone();
        let mut remaining = remaining;
        while remaining > 0 {
            let target = self.value(&learner, &consistent, remaining)?;
            let mut advanced = false;
            'moves: for x in 0..self.class.domain().size() {
                for y in 0..2u8 {
                    let next = if y == 1 {
                        consistent.and(&self.ones[x])
                    } else {
                        consistent.and(&self.zeros[x])
                    };
                    if next.is_zero() {
                        continue;
                    }
                    let mut l = learner.clone();
                    let p = l.predict(x);
                    l.update(x, y);
                    let v = (p != y) as usize + self.value(&l, &next, remaining - 1)?;
                    if v == target {
                        seq.push((x, y));
                        learner = l;
                        consistent = next;
                        remaining -= 1;
                        advanced = true;
                        break 'moves;
                    }
                }
            }
            if !advanced {
                break;
            }
        }
        Ok(seq)
    }
}

/// Exhaustive minimax search for the realizable sequence that forces the
/// most mistakes out of a deterministic learner within the horizon.
pub fn worst_case_adversary<L: OnlineLearner + Clone>(
    class: &HypothesisClass,
    learner: &L,
    horizon: usize,
    node_budget: usize,
) -> Result<AdversaryOutcome> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    let n = class.domain().size();
    let m = class.len();
    let mut ones = vec![Bits::zeros(m); n];
    for (i, h) in class.members().iter().enumerate() {
        for (x, set) in ones.iter_mut().enumerate() {
            if h.value(x) == 1 {
                set.set(i, true);
            }
        }
    }
    let zeros = ones.iter().map(Bits::complemented).collect();
    let mut search = AdversarySearch::<L> {
        class,
        ones,
        zeros,
        memo: HashMap::new(),
        nodes: 0,
        budget: node_budget,
        _marker: std::marker::PhantomData,
    };
    let all = Bits::ones(m);
    let forced = search.value(learner, &all, horizon)?;
    let sequence = search.reconstruct(learner, &all, horizon)?;
    Ok(AdversaryOutcome {
        sequence,
        forced_mistakes: forced,
        nodes_expanded: search.nodes,
    })
}
