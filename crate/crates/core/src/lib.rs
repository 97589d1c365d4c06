//! Gender-bias measurement over comment corpora whose person mentions are
//! linked to a registry of political entities.
//!
//! Each analysis lives in its own module and works on an immutable
//! [`CorpusSnapshot`]. [`report::run_pipeline`] runs them all from a
//! [`report::RunConfig`].

pub mod combinatorial;
pub mod corpus;
pub mod coverage;
pub mod lexical;
pub mod nominal;
pub mod registry;
pub mod report;
pub mod sentiment;
pub mod stats;
pub mod synth;
pub mod types;

pub use corpus::{Comment, CorpusSnapshot, DataPoint};
pub use registry::{EntityRecord, Registry};
pub use stats::TestResult;
pub use types::{ExternalSentiment, Gender, GenderCounts, Group, Outcome};
