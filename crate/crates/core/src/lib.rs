//! Object-centric process discovery, end to end: object-centric event logs,
//! object-centric Petri net semantics with exact loop-free languages,
//! per-object-type inductive mining with merging, inter-/intra-object
//! complexity metrics, random system-model generation, and an experiment
//! harness comparing discovery on object-centric versus flattened event
//! data.

pub mod discovery;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod modelgen;
pub mod ocel;
pub mod ocpn;

pub use error::{Error, Result};
