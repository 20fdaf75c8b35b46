//! Privacy and utility verification: exact differential-privacy slack on
//! finite output distributions, one-sided Monte-Carlo privacy audits,
//! mechanism tail checks, dimension surveys, and end-to-end generalization
//! experiments.

mod dpcheck;
mod experiment;
mod pipelines;
mod surveys;

pub use dpcheck::{
    clopper_pearson, exact_dp_delta, exp_mech_utility_check, exp_mech_utility_check_on_class,
    mc_dp_audit, AuditedMechanism, EventProbe, NeighborPair, AUDIT_CONFIDENCE,
};
pub use experiment::{generalization_experiment, GenAlgorithm, GenConfig, SyntheticDistribution};
pub use pipelines::{closure_pipeline_audit, planted_control_audit, relabel_pipeline_audit};
pub use surveys::{
    closure_dim_survey, no_biclique_check, or_blowup_survey, shelah_check, BICLIQUE_NODE_BUDGET,
};
