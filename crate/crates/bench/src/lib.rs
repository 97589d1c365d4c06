//! Shared fixtures for the benchmarks.

use biaslens::corpus::{load_corpus, load_group_map, CorpusSnapshot, IngestOptions};
use biaslens::registry::Registry;
use biaslens::report::RunConfig;
use biaslens::sentiment::{load_vad, VadLexicon};
use biaslens::synth::{generate, SynthOptions};
use tempfile::TempDir;

pub struct Fixture {
    pub config: RunConfig,
    pub registry: Registry,
    pub corpus: CorpusSnapshot,
    pub vad: VadLexicon,
    _dir: TempDir,
}

/// A synthetic corpus written to disk and loaded back.
pub fn fixture(comments: usize) -> Fixture {
    let dir = tempfile::tempdir().expect("temp dir");
    let files = generate(&SynthOptions { comments, ..Default::default() })
        .write_dir(dir.path())
        .expect("synthetic inputs");
    let registry = Registry::load(&files.registry).expect("registry");
    let groups = load_group_map(&files.groups).expect("groups");
    let (corpus, _) = load_corpus(&files.corpus, &registry, &groups, IngestOptions::default()).expect("corpus");
    let vad = load_vad(&files.vad).expect("vad");
    let config = RunConfig {
        corpus: files.corpus,
        registry: files.registry,
        groups: Some(files.groups),
        vad: Some(files.vad),
        annotations: Some(files.annotations),
        permutations: 100,
        out: dir.path().join("out"),
        ..Default::default()
    };
    Fixture { config, registry, corpus, vad, _dir: dir }
}
