//! Run configuration, the analysis pipeline and report output.

mod config;
mod emit;
mod pipeline;

pub use config::{Analysis, ConfigError, Format, RunConfig};
pub use emit::{emit_report, sha256_hex, EmitError, Manifest, ManifestEntry, MANIFEST_FILE, REPORT_FILE};
pub use pipeline::{
    corpus_fingerprint, run_pipeline, CombinatorialSection, LexicalSection, Metadata, PipelineError, ReportBundle,
    ScopeReport,
};
