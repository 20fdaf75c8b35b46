//! Workbench for finite boolean hypothesis classes: exact Littlestone,
//! threshold, and VC dimension computation with verifiable certificates,
//! class compositions and their tightness constructions, realizable online
//! learners, and differentially private learning pipelines with exact and
//! Monte-Carlo privacy/utility audits.

pub mod audit;
pub mod bits;
pub mod dims;
pub mod dp;
pub mod error;
pub mod hclass;
pub mod io;
pub mod online;
pub mod report;

pub use error::{Error, Result};
