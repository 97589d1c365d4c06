//! Comment and data-point model.
//!
//! A [`CorpusSnapshot`] owns comments and their data points (one per
//! resolved entity mention). Data points of one comment are stored
//! contiguously; `span(i)` gives the slice for comment `i`. Snapshots are
//! immutable once built, so every operation here returns a new one.

mod ingest;
mod tokenize;

pub use ingest::{
    load_corpus, load_group_map, parse_corpus, read_bot_patterns, write_corpus_jsonl, GroupMap,
    IngestOptions, IngestReport, MalformedLine, RawComment, RawMention,
};
pub use tokenize::{count_name_tokens, tokenize, TokenSequence, NAME_TOKEN};

use crate::registry::Registry;
use crate::types::{ExternalSentiment, Gender, GenderCounts, Group};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{malformed} of {total} lines malformed (limit {limit:.2}%); first bad lines: {first:?}")]
    TooManyMalformed {
        malformed: usize,
        total: usize,
        limit: f64,
        first: Vec<usize>,
    },
    #[error("group map line {line}: {message}")]
    GroupMap { line: usize, message: String },
    #[error("duplicate comment id '{0}'")]
    DuplicateComment(String),
    #[error("comment '{0}' has no data points")]
    NoMentions(String),
    #[error("unknown entity id '{0}'")]
    UnknownEntity(String),
    #[error("no bot patterns given")]
    NoPatterns,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comment {
    pub comment_id: String,
    pub subreddit: String,
    pub group: Group,
    /// Body text with each resolved reference replaced by `[NAME]`.
    pub body: String,
    pub created_at: i64,
    pub is_bot: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DataPoint {
    pub comment_id: String,
    pub entity_id: String,
    /// Resolved from the registry at ingest.
    pub gender: Gender,
    /// The reference as written.
    pub surface: String,
    /// Lowercase descriptor lemmas attached to this mention.
    pub descriptors: Vec<String>,
    pub external_sentiment: Option<ExternalSentiment>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusCounts {
    pub comments: usize,
    pub datapoints: usize,
    pub datapoints_by_gender: GenderCounts,
    pub comments_by_group: BTreeMap<Group, usize>,
    pub datapoints_by_group: BTreeMap<Group, usize>,
}

#[derive(Debug, Clone, Default)]
pub struct CorpusSnapshot {
    comments: Vec<Comment>,
    datapoints: Vec<DataPoint>,
    spans: Vec<Range<usize>>,
    counts: CorpusCounts,
}

impl CorpusSnapshot {
    /// Builds a snapshot from comments paired with their data points.
    pub fn from_comments(
        entries: impl IntoIterator<Item = (Comment, Vec<DataPoint>)>,
    ) -> Result<Self, CorpusError> {
        let mut seen = HashMap::new();
        let mut snap = CorpusSnapshot::default();
        for (mut comment, points) in entries {
            if points.is_empty() {
                return Err(CorpusError::NoMentions(comment.comment_id));
            }
            if seen.insert(comment.comment_id.clone(), ()).is_some() {
                return Err(CorpusError::DuplicateComment(comment.comment_id));
            }
            comment.is_bot = false;
            let start = snap.datapoints.len();
            for mut dp in points {
                dp.comment_id.clone_from(&comment.comment_id);
                snap.datapoints.push(dp);
            }
            snap.spans.push(start..snap.datapoints.len());
            snap.comments.push(comment);
        }
        snap.counts = snap.recount();
        Ok(snap)
    }

    fn recount(&self) -> CorpusCounts {
        let mut counts = CorpusCounts {
            comments: self.comments.len(),
            datapoints: self.datapoints.len(),
            ..Default::default()
        };
        for (c, span) in self.comments.iter().zip(&self.spans) {
            *counts.comments_by_group.entry(c.group).or_default() += 1;
            *counts.datapoints_by_group.entry(c.group).or_default() += span.len();
        }
        for dp in &self.datapoints {
            counts.datapoints_by_gender.add(dp.gender, 1);
        }
        counts
    }

    /// Recomputes cached totals and compares; used by tests.
    pub fn counts_consistent(&self) -> bool {
        self.recount() == self.counts
    }

    pub fn comments(&self) -> &[Comment] {
        &self.comments
    }

    pub fn datapoints(&self) -> &[DataPoint] {
        &self.datapoints
    }

    pub fn counts(&self) -> &CorpusCounts {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.comments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comments.is_empty()
    }

    /// Data points belonging to comment `index`.
    pub fn mentions(&self, index: usize) -> &[DataPoint] {
        &self.datapoints[self.spans[index].clone()]
    }

    /// Iterates comments with their data points.
    pub fn iter(&self) -> impl Iterator<Item = (&Comment, &[DataPoint])> + '_ {
        self.comments
            .iter()
            .zip(&self.spans)
            .map(move |(c, s)| (c, &self.datapoints[s.clone()]))
    }

    /// Comments whose mentions all refer to one entity, with the first
    /// mention.
    pub fn single_entity(&self) -> impl Iterator<Item = (&Comment, &DataPoint)> + '_ {
        self.iter()
            .filter(|(_, dps)| dps.iter().all(|d| d.entity_id == dps[0].entity_id))
            .map(|(c, dps)| (c, &dps[0]))
    }

    /// `(entity_id, surface)` pairs for comment `index`.
    pub fn surface_references(&self, index: usize) -> Vec<(&str, &str)> {
        self.mentions(index)
            .iter()
            .map(|d| (d.entity_id.as_str(), d.surface.as_str()))
            .collect()
    }

    /// Keeps comments for which `keep` returns true.
    pub fn retain<F: Fn(&Comment, &[DataPoint]) -> bool>(&self, keep: F) -> CorpusSnapshot {
        let entries = self
            .iter()
            .filter(|(c, dps)| keep(c, dps))
            .map(|(c, dps)| (c.clone(), dps.to_vec()));
        CorpusSnapshot::from_comments(entries).expect("subset of a valid snapshot is valid")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BotFilterReport {
    pub patterns: Vec<String>,
    /// Ids of removed comments; these are the records flagged `is_bot`.
    pub removed: Vec<String>,
}

/// Removes comments whose body contains any pattern, case-insensitively.
pub fn filter_bots(
    corpus: &CorpusSnapshot,
    patterns: &[String],
) -> Result<(CorpusSnapshot, BotFilterReport), CorpusError> {
    let lowered: Vec<String> = patterns
        .iter()
        .map(|p| p.trim().to_lowercase())
        .filter(|p| !p.is_empty())
        .collect();
    if lowered.is_empty() {
        return Err(CorpusError::NoPatterns);
    }
    let is_bot = |c: &Comment| {
        let body = c.body.to_lowercase();
        lowered.iter().any(|p| body.contains(p.as_str()))
    };
    let removed = corpus
        .comments()
        .iter()
        .filter(|c| is_bot(c))
        .map(|c| c.comment_id.clone())
        .collect();
    let kept = corpus.retain(|c, _| !is_bot(c));
    Ok((kept, BotFilterReport { patterns: lowered, removed }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionKey {
    Group,
    Subreddit,
}

/// Splits a snapshot into disjoint parts keyed by group or subreddit name.
pub fn partition(corpus: &CorpusSnapshot, by: PartitionKey) -> BTreeMap<String, CorpusSnapshot> {
    let mut buckets: BTreeMap<String, Vec<(Comment, Vec<DataPoint>)>> = BTreeMap::new();
    for (c, dps) in corpus.iter() {
        let key = match by {
            PartitionKey::Group => c.group.as_str().to_string(),
            PartitionKey::Subreddit => c.subreddit.clone(),
        };
        buckets.entry(key).or_default().push((c.clone(), dps.to_vec()));
    }
    buckets
        .into_iter()
        .map(|(k, v)| (k, CorpusSnapshot::from_comments(v).expect("parts of a valid snapshot")))
        .collect()
}

/// Drops every comment that mentions `entity_id` at least once.
pub fn exclude_entity(
    corpus: &CorpusSnapshot,
    registry: &Registry,
    entity_id: &str,
) -> Result<CorpusSnapshot, CorpusError> {
    if !registry.contains(entity_id) {
        return Err(CorpusError::UnknownEntity(entity_id.to_string()));
    }
    Ok(corpus.retain(|_, dps| dps.iter().all(|d| d.entity_id != entity_id)))
}
