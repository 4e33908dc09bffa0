//! Train-and-evaluate toolkit for flow-based IoT intrusion detection.
//!
//! The crate covers the whole offline workflow: loading flow-statistics CSVs,
//! relabelling at three granularities, unit-variance scaling, feature
//! selection (CFS, mRMR, RFE and their intersection), class balancing
//! (random oversampling and balanced bootstraps), random-forest
//! classification, and evaluation with an F1-gain analysis focused on
//! classes the baseline fails to saturate.

pub mod balance;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod forest;
pub mod pipeline;
pub mod selection;

pub use error::{Error, ErrorKind, Result, Stage};
