use super::config::{Analysis, ConfigError, RunConfig};
use crate::combinatorial::{combinatorial_report, CombinatorialReport, LOptions};
use crate::corpus::{
    exclude_entity, filter_bots, load_corpus, load_group_map, partition, read_bot_patterns, BotFilterReport,
    CorpusCounts, CorpusError, CorpusSnapshot, GroupMap, IngestOptions, IngestReport, PartitionKey,
};
use crate::coverage::{coverage_report, CoverageReport};
use crate::lexical::{
    lexical_by_group, lexical_report, load_annotations, LexicalByGroup, LexicalError, LexicalReport, MinCount,
    SenseAnnotation,
};
use crate::nominal::{nominal_report, Honorifics, NominalReport};
use crate::registry::{Registry, RegistryError};
use crate::sentiment::{load_vad, sentiment_report, SentimentError, SentimentReport, VadLexicon};
use crate::types::{GenderCounts, Outcome};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Lexicon(#[from] SentimentError),
    #[error(transparent)]
    Annotations(#[from] LexicalError),
}

impl PipelineError {
    pub fn is_config(&self) -> bool {
        matches!(self, PipelineError::Config(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    /// SHA-256 of the analysed comments and data points in id order.
    pub corpus_fingerprint: String,
    pub config: RunConfig,
    pub registry_entities: GenderCounts,
    pub ingest: IngestReport,
    pub bot_filter: Option<BotFilterReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinatorialSection {
    pub overall: CombinatorialReport,
    pub by_group: BTreeMap<String, Outcome<CombinatorialReport>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LexicalSection {
    pub overall: LexicalReport,
    pub by_group: LexicalByGroup,
}

/// Every enabled analysis for one slice of the corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScopeReport {
    pub scope: String,
    pub excluded_entity: Option<String>,
    pub counts: CorpusCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<Outcome<CoverageReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combinatorial: Option<Outcome<CombinatorialSection>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nominal: Option<Outcome<NominalReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<Outcome<SentimentReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lexical: Option<Outcome<LexicalSection>>,
}

impl ScopeReport {
    /// Names of enabled analyses that failed in this scope.
    pub fn failures(&self) -> Vec<Analysis> {
        let mut out = Vec::new();
        let mut check = |a: Analysis, failed: Option<bool>| {
            if failed == Some(true) {
                out.push(a);
            }
        };
        check(Analysis::Coverage, self.coverage.as_ref().map(|o| !o.is_ok()));
        check(Analysis::Combinatorial, self.combinatorial.as_ref().map(|o| !o.is_ok()));
        check(Analysis::Nominal, self.nominal.as_ref().map(|o| !o.is_ok()));
        check(Analysis::Sentiment, self.sentiment.as_ref().map(|o| !o.is_ok()));
        check(Analysis::Lexical, self.lexical.as_ref().map(|o| !o.is_ok()));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportBundle {
    pub metadata: Metadata,
    pub scopes: Vec<ScopeReport>,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl ReportBundle {
    pub fn has_failures(&self) -> bool {
        self.scopes.iter().any(|s| !s.failures().is_empty())
    }
}

/// Runs `f`, turning a panic into an errored section.
fn isolate<T>(name: &str, f: impl FnOnce() -> Outcome<T>) -> Outcome<T> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(o) => o,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            log::error!("{name} analysis panicked: {msg}");
            Outcome::Error(format!("{name} analysis panicked: {msg}"))
        }
    }
}

struct Inputs {
    registry: Registry,
    lexicon: Option<VadLexicon>,
    annotations: Option<Vec<SenseAnnotation>>,
}

fn run_scope(
    config: &RunConfig,
    inputs: &Inputs,
    corpus: &CorpusSnapshot,
    scope: String,
    excluded: Option<String>,
) -> ScopeReport {
    let on = |a: Analysis| config.enabled(a);
    let options = LOptions { dedup: config.dedup_mentions, unit: config.permutation_unit };
    let min = MinCount { min: config.min_count, mode: config.min_count_mode };
    let honorifics = if config.strip_honorifics { Honorifics::default() } else { Honorifics::none() };
    let reg = &inputs.registry;

    let combinatorial = || {
        on(Analysis::Combinatorial).then(|| {
            isolate("combinatorial", || {
                let run = |c: &CorpusSnapshot| combinatorial_report(c, config.permutations, config.seed, options);
                run(corpus)
                    .map(|overall| CombinatorialSection {
                        overall,
                        by_group: partition(corpus, PartitionKey::Group)
                            .into_iter()
                            .map(|(g, part)| (g, run(&part).into()))
                            .collect(),
                    })
                    .into()
            })
        })
    };
    let coverage = || {
        on(Analysis::Coverage)
            .then(|| isolate("coverage", || Outcome::Ok(coverage_report(corpus, reg, config.degree_mode))))
    };
    let nominal =
        || on(Analysis::Nominal).then(|| isolate("nominal", || nominal_report(corpus, reg, &honorifics).into()));
    let sentiment = || {
        on(Analysis::Sentiment).then(|| {
            isolate("sentiment", || match &inputs.lexicon {
                Some(lex) => Outcome::Ok(sentiment_report(corpus, lex, config.include_multi_entity)),
                None => Outcome::Error("no vad lexicon configured".into()),
            })
        })
    };
    let lexical = || {
        on(Analysis::Lexical).then(|| {
            isolate("lexical", || {
                let ann = inputs.annotations.as_deref();
                lexical_report(corpus, min, config.top_k, ann)
                    .map(|overall| LexicalSection { overall, by_group: lexical_by_group(corpus, min, ann) })
                    .into()
            })
        })
    };

    let (combinatorial, (coverage, (nominal, (sentiment, lexical)))) =
        rayon::join(combinatorial, || rayon::join(coverage, || rayon::join(nominal, || rayon::join(sentiment, lexical))));
    ScopeReport {
        scope,
        excluded_entity: excluded,
        counts: corpus.counts().clone(),
        coverage,
        combinatorial,
        nominal,
        sentiment,
        lexical,
    }
}

/// SHA-256 over comments sorted by id, each with its data points.
pub fn corpus_fingerprint(corpus: &CorpusSnapshot) -> String {
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.sort_by(|&a, &b| corpus.comments()[a].comment_id.cmp(&corpus.comments()[b].comment_id));
    let mut h = Sha256::new();
    for i in order {
        let c = &corpus.comments()[i];
        let points: Vec<_> = corpus
            .mentions(i)
            .iter()
            .map(|d| (&d.entity_id, d.gender, &d.surface, &d.descriptors, d.external_sentiment))
            .collect();
        let record = (&c.comment_id, &c.subreddit, c.group, c.created_at, &c.body, points);
        h.update(serde_json::to_vec(&record).expect("record serializes"));
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

/// Loads every input, applies the bot filter and runs all enabled analyses
/// on the whole corpus and on each entity-exclusion slice.
pub fn run_pipeline(config: &RunConfig) -> Result<ReportBundle, PipelineError> {
    let started = Instant::now();
    config.validate()?;
    let registry = Registry::load(&config.registry)?;
    for id in &config.exclude_entities {
        if !registry.contains(id) {
            return Err(ConfigError::Invalid(format!("excluded entity '{id}' is not in the registry")).into());
        }
    }
    let groups = match &config.groups {
        Some(p) => load_group_map(p)?,
        None => GroupMap::default(),
    };
    let options = IngestOptions { max_malformed_fraction: config.max_malformed_fraction };
    let (corpus, ingest) = load_corpus(&config.corpus, &registry, &groups, options)?;
    log::info!("ingested {} comments, {} data points", corpus.len(), corpus.counts().datapoints);
    let (corpus, bot_filter) = match &config.bot_patterns {
        Some(p) => {
            let (kept, report) = filter_bots(&corpus, &read_bot_patterns(p)?)?;
            log::info!("bot filter removed {} comments", report.removed.len());
            (kept, Some(report))
        }
        None => (corpus, None),
    };
    let lexicon = match (&config.vad, config.enabled(Analysis::Sentiment)) {
        (Some(p), true) => Some(load_vad(p)?),
        _ => None,
    };
    let annotations = match (&config.annotations, config.enabled(Analysis::Lexical)) {
        (Some(p), true) => Some(load_annotations(p)?),
        _ => None,
    };
    let inputs = Inputs { registry, lexicon, annotations };

    let mut scopes = Vec::new();
    if !config.analyses.is_empty() {
        scopes.push(run_scope(config, &inputs, &corpus, "overall".into(), None));
        for id in &config.exclude_entities {
            let slice = exclude_entity(&corpus, &inputs.registry, id)?;
            log::info!("excluding {id}: {} comments remain", slice.len());
            scopes.push(run_scope(config, &inputs, &slice, format!("exclude_{id}"), Some(id.clone())));
        }
    }
    let metadata = Metadata {
        tool: "biaslens".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: config.hash(),
        corpus_fingerprint: corpus_fingerprint(&corpus),
        config: config.clone(),
        registry_entities: inputs.registry.gender_totals(),
        ingest,
        bot_filter,
    };
    Ok(ReportBundle { metadata, scopes, wall_clock: started.elapsed() })
}
