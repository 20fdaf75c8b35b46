//! Sample-size calculators. Two kinds of formula live here: bounds the
//! source material states with explicit constants (evaluated as written),
//! and big-O expressions whose leading constant is a configuration knob;
//! the latter are flagged `heuristic` in the report.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Realizable uniform-convergence bound with explicit constants.
    VcRealizable,
    /// Agnostic uniform-convergence bound; gamma exposed as configuration.
    VcAgnostic,
    /// Exponential-mechanism relabel utility bound with explicit constants.
    RelabelUtility,
    /// Total sample size of the agnostic transformation (big-O, heuristic).
    AgnosticTotal,
    /// Total sample size of the closure learner (big-O, heuristic).
    ClosureTotal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundParams {
    pub alpha: f64,
    pub beta: f64,
    /// VC dimension of the base class where the formula needs one.
    pub vc: Option<usize>,
    /// VC dimension of the composed class (closure bound).
    pub vc_composed: Option<usize>,
    pub k: Option<usize>,
    /// Inner learner sample complexities, one per class.
    pub learner_sizes: Option<Vec<usize>>,
    /// Constant of the agnostic uniform-convergence bound.
    pub gamma: f64,
    /// Leading constant applied to the big-O expressions.
    pub multiplier: f64,
}

impl BoundParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        BoundParams {
            alpha,
            beta,
            vc: None,
            vc_composed: None,
            k: None,
            learner_sizes: None,
            gamma: 1.0,
            multiplier: 1.0,
        }
    }

    pub fn with_vc(mut self, vc: usize) -> Self {
        self.vc = Some(vc);
        self
    }

    pub fn with_vc_composed(mut self, vc: usize) -> Self {
        self.vc_composed = Some(vc);
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_learner_sizes(mut self, sizes: Vec<usize>) -> Self {
        self.learner_sizes = Some(sizes);
        self
    }

    pub fn with_multiplier(mut self, m: f64) -> Self {
        self.multiplier = m;
        self
    }

    pub fn with_gamma(mut self, g: f64) -> Self {
        self.gamma = g;
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: f64,
    pub required: usize,
    pub formula: String,
    pub heuristic: bool,
}

pub fn sample_size_bounds(kind: BoundKind, params: &BoundParams) -> Result<BoundReport> {
    let alpha = params.alpha;
    let beta = params.beta;
    if !(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidInput(
            "alpha and beta must lie in (0,1)".into(),
        ));
    }
    let need_vc = || params.vc.ok_or(Error::MissingParam("vc"));
    match kind {
        BoundKind::VcRealizable => {
            let vc = need_vc()? as f64;
            let value = 80.0 / alpha * (vc * (16.0 / alpha).ln() + (2.0 / beta).ln());
            Ok(report(kind, value, "(80/a)(vc*ln(16/a)+ln(2/b))", false))
        }
        BoundKind::VcAgnostic => {
            let vc = need_vc()? as f64;
            let value = params.gamma * (vc + (1.0 / beta).ln()) / (alpha * alpha);
            Ok(report(kind, value, "g*(vc+ln(1/b))/a^2", false))
        }
        BoundKind::RelabelUtility => {
            let vc = need_vc()? as f64;
            let value = 4.0 / alpha * (1.0 / beta).ln()
                + 10.0 * vc / alpha * (20.0 * std::f64::consts::E / alpha).ln();
            Ok(report(
                kind,
                value,
                "(4/a)ln(1/b)+(10*vc/a)ln(20e/a)",
                false,
            ))
        }
        BoundKind::AgnosticTotal => {
            let vc = need_vc()? as f64;
            let sizes = params
                .learner_sizes
                .as_ref()
                .ok_or(Error::MissingParam("learner_sizes"))?;
            let m = *sizes.first().ok_or(Error::MissingParam("learner_sizes"))? as f64;
            let value = params.multiplier * (m + (vc + (1.0 / beta).ln()) / (alpha * alpha));
            Ok(report(kind, value, "C*(m+(vc+ln(1/b))/a^2)", true))
        }
        BoundKind::ClosureTotal => {
            let vc_g = params
                .vc_composed
                .ok_or(Error::MissingParam("vc_composed"))? as f64;
            let k = params.k.ok_or(Error::MissingParam("k"))? as f64;
            let sizes = params
                .learner_sizes
                .as_ref()
                .ok_or(Error::MissingParam("learner_sizes"))?;
            let sum: usize = sizes.iter().sum();
            let value = params.multiplier
                * ((k.powi(3) * vc_g + k.powi(2) * (k / beta).ln()) / (alpha * alpha) + sum as f64);
            Ok(report(
                kind,
                value,
                "C*((k^3*vcG+k^2*ln(k/b))/a^2+sum(m_i))",
                true,
            ))
        }
    }
}

fn report(kind: BoundKind, value: f64, formula: &str, heuristic: bool) -> BoundReport {
    BoundReport {
        kind,
        value,
        required: value.ceil().max(1.0) as usize,
        formula: formula.to_string(),
        heuristic,
    }
}
