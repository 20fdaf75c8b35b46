//! Experiment configuration files: named scenario, class sources (file or
//! construction), aggregator, distribution, privacy/accuracy targets, sizes
//! (explicit or auto-resolved from the bound calculators), seeds, trials.

use anyhow::{anyhow, bail, Context, Result};
use closurelab::audit::{GenAlgorithm, GenConfig, SyntheticDistribution};
use closurelab::dims::vc_dimension;
use closurelab::dp::{
    generic_private_learner, sample_size_bounds, BoundKind, BoundParams, PrivacyBudget,
};
use closurelab::hclass::{compose, make_threshold_chain, Aggregator, Hypothesis, HypothesisClass};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub algorithm: String,
    pub classes: Vec<ClassSource>,
    #[serde(default)]
    pub aggregator: Option<AggregatorSource>,
    pub distribution: DistributionConfig,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub sample_size: Option<usize>,
    #[serde(default = "default_multiplier")]
    pub size_multiplier: f64,
    #[serde(default = "default_multiplier")]
    pub excess_multiplier: f64,
    #[serde(default = "default_multiplier")]
    pub confidence_multiplier: f64,
    pub trials: usize,
    #[serde(default = "default_epsilon")]
    pub learner_epsilon: f64,
    pub seed: u64,
}

fn default_multiplier() -> f64 {
    4.0
}

fn default_epsilon() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ClassSource {
    File { file: String },
    Chain { chain: usize },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AggregatorSource {
    Named { name: String },
    File { file: String },
}

#[derive(Debug, Clone, Deserialize)]
pub struct DistributionConfig {
    /// "uniform" or explicit point weights.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    /// One member index per class; the target is their aggregation (or the
    /// member itself for single-class runs).
    pub target_members: Vec<usize>,
    #[serde(default)]
    pub noise: f64,
}

pub fn load_class(source: &ClassSource, base: &Path) -> Result<HypothesisClass> {
    match source {
        ClassSource::File { file } => {
            let path = base.join(file);
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading class file {}", path.display()))?;
            let parsed = closurelab::io::parse_class_text(&text)?;
            if parsed.had_duplicates {
                eprintln!("warning: duplicate rows in {} were merged", path.display());
            }
            Ok(parsed.class)
        }
        ClassSource::Chain { chain } => Ok(make_threshold_chain(*chain)),
    }
}

pub fn load_aggregator(source: &AggregatorSource, arity: usize, base: &Path) -> Result<Aggregator> {
    match source {
        AggregatorSource::Named { name } => named_aggregator(name, arity),
        AggregatorSource::File { file } => {
            let path = base.join(file);
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading aggregator file {}", path.display()))?;
            Ok(closurelab::io::parse_aggregator_text(&text)?)
        }
    }
}

pub fn named_aggregator(name: &str, arity: usize) -> Result<Aggregator> {
    Ok(match name {
        "and" => Aggregator::and(arity),
        "or" => Aggregator::or(arity),
        "maj" | "majority" => Aggregator::majority(arity),
        "xor" => Aggregator::xor(arity),
        "identity" => {
            if arity != 1 {
                bail!("identity aggregator needs arity 1, got {arity}");
            }
            Aggregator::projection(1, 0)
        }
        other => bail!("unknown aggregator name {other:?} (try and/or/maj/xor/identity)"),
    })
}

pub struct ResolvedExperiment {
    pub gen: GenConfig,
    pub resolved_sample_size: usize,
    pub auto_sized: bool,
}

impl ExperimentConfig {
    pub fn resolve(&self, base: &Path) -> Result<ResolvedExperiment> {
        let classes: Vec<HypothesisClass> = self
            .classes
            .iter()
            .map(|s| load_class(s, base))
            .collect::<Result<_>>()?;
        if classes.is_empty() {
            bail!("config lists no classes");
        }
        let domain = classes[0].domain();
        for c in &classes {
            if c.domain() != domain {
                bail!("classes live on different domains");
            }
        }
        if self.distribution.target_members.len() != classes.len() {
            bail!(
                "target_members must list one member per class ({} classes)",
                classes.len()
            );
        }

        let budget = PrivacyBudget::new(self.learner_epsilon, 0.0)?;
        let learners: Vec<_> = classes
            .iter()
            .map(|c| generic_private_learner(c, budget))
            .collect();

        let target: Hypothesis;
        let algorithm: GenAlgorithm;
        let learner_sizes: Vec<usize>;
        match self.algorithm.as_str() {
            "private-agnostic" => {
                if classes.len() != 1 {
                    bail!("private-agnostic takes exactly one class");
                }
                let class = classes[0].clone();
                target = class
                    .members()
                    .get(self.distribution.target_members[0])
                    .ok_or_else(|| anyhow!("target member index out of range"))?
                    .clone();
                learner_sizes = vec![learners[0].sample_complexity(self.alpha, self.beta)];
                algorithm = GenAlgorithm::PrivateAgnostic {
                    class,
                    learner: learners.into_iter().next().expect("one learner"),
                };
            }
            "closure-learn" => {
                let agg_source = self
                    .aggregator
                    .as_ref()
                    .ok_or_else(|| anyhow!("closure-learn requires an aggregator"))?;
                let g = load_aggregator(agg_source, classes.len(), base)?;
                let k = classes.len();
                let parts: Vec<Hypothesis> = classes
                    .iter()
                    .zip(&self.distribution.target_members)
                    .map(|(c, &i)| {
                        c.members()
                            .get(i)
                            .cloned()
                            .ok_or_else(|| anyhow!("target member index {i} out of range"))
                    })
                    .collect::<Result<_>>()?;
                let bits: Vec<bool> = domain
                    .points()
                    .map(|x| {
                        let input: Vec<u8> = parts.iter().map(|h| h.value(x)).collect();
                        g.eval(&input) == 1
                    })
                    .collect();
                target = Hypothesis::new(closurelab::bits::Bits::from_bools(&bits));
                learner_sizes = learners
                    .iter()
                    .map(|l| l.sample_complexity(self.alpha / k as f64, self.beta / k as f64))
                    .collect();
                algorithm = GenAlgorithm::ClosureLearn {
                    g,
                    classes,
                    learners,
                };
            }
            other => bail!("unknown algorithm {other:?}"),
        }

        let weights = match &self.distribution.weights {
            Some(w) => w.clone(),
            None => vec![1.0; domain.size()],
        };
        let dist = SyntheticDistribution::new(weights, target, self.distribution.noise)?;

        let (resolved_sample_size, auto_sized) = match self.sample_size {
            Some(n) => (n, false),
            None => {
                let n = match &algorithm {
                    GenAlgorithm::PrivateAgnostic { class, .. } => {
                        let (vc, _) = vc_dimension(class)?;
                        sample_size_bounds(
                            BoundKind::AgnosticTotal,
                            &BoundParams::new(self.alpha, self.beta)
                                .with_vc(vc)
                                .with_learner_sizes(learner_sizes.clone())
                                .with_multiplier(self.size_multiplier),
                        )?
                        .required
                    }
                    GenAlgorithm::ClosureLearn { g, classes, .. } => {
                        let refs: Vec<&HypothesisClass> = classes.iter().collect();
                        let composed = compose(g, &refs)?;
                        let (vc_g, _) = vc_dimension(&composed)?;
                        sample_size_bounds(
                            BoundKind::ClosureTotal,
                            &BoundParams::new(self.alpha, self.beta)
                                .with_vc_composed(vc_g)
                                .with_k(classes.len())
                                .with_learner_sizes(learner_sizes.clone())
                                .with_multiplier(self.size_multiplier),
                        )?
                        .required
                    }
                };
                (n, true)
            }
        };

        Ok(ResolvedExperiment {
            gen: GenConfig {
                algorithm,
                dist,
                sample_size: resolved_sample_size,
                trials: self.trials,
                alpha: self.alpha,
                beta: self.beta,
                excess_multiplier: self.excess_multiplier,
                confidence_multiplier: self.confidence_multiplier,
                seed: self.seed,
            },
            resolved_sample_size,
            auto_sized,
        })
    }
}
