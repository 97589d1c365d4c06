use super::tokenize::{count_name_tokens, NAME_TOKEN};
use super::{Comment, CorpusError, CorpusSnapshot, DataPoint};
use crate::registry::Registry;
use crate::types::{ExternalSentiment, Group};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

/// One line of the corpus JSONL file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawComment {
    pub id: String,
    pub subreddit: String,
    pub body: String,
    pub created_utc: i64,
    pub mentions: Vec<RawMention>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawMention {
    pub entity: String,
    pub surface: String,
    #[serde(default)]
    pub descriptors: Vec<String>,
    #[serde(default)]
    pub ext_sentiment: Option<ExternalSentiment>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestOptions {
    /// Abort when more than this fraction of non-blank lines is malformed.
    pub max_malformed_fraction: f64,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { max_malformed_fraction: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalformedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub lines: usize,
    pub malformed: Vec<MalformedLine>,
    /// Mentions whose entity id is not in the registry.
    pub unresolved_mentions: usize,
    /// Well-formed comments dropped because no mention resolved.
    pub rejected_comments: usize,
}

/// Subreddit (case-insensitive) to group. Unlisted subreddits map to `none`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupMap(BTreeMap<String, Group>);

impl GroupMap {
    pub fn new(entries: impl IntoIterator<Item = (String, Group)>) -> Self {
        GroupMap(entries.into_iter().map(|(k, v)| (k.to_lowercase(), v)).collect())
    }

    pub fn group_of(&self, subreddit: &str) -> Group {
        self.0.get(&subreddit.to_lowercase()).copied().unwrap_or(Group::None)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, CorpusError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
        let mut map = BTreeMap::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 1;
            let rec = rec.map_err(|e| CorpusError::GroupMap { line, message: e.to_string() })?;
            if rec.len() != 2 {
                return Err(CorpusError::GroupMap { line, message: format!("expected 2 columns, got {}", rec.len()) });
            }
            let (sub, group) = (rec[0].trim(), rec[1].trim());
            if line == 1 && sub.eq_ignore_ascii_case("subreddit") {
                continue;
            }
            let group = group.parse::<Group>().map_err(|message| CorpusError::GroupMap { line, message })?;
            map.insert(sub.to_lowercase(), group);
        }
        Ok(GroupMap(map))
    }
}

fn open(path: &Path) -> Result<std::fs::File, CorpusError> {
    std::fs::File::open(path).map_err(|source| CorpusError::Io { path: path.display().to_string(), source })
}

/// Reads a two-column `subreddit,group` CSV; a header row is optional.
pub fn load_group_map(path: impl AsRef<Path>) -> Result<GroupMap, CorpusError> {
    GroupMap::from_csv_reader(open(path.as_ref())?)
}

/// One pattern per line; blank lines and `#` comments are skipped.
pub fn read_bot_patterns(path: impl AsRef<Path>) -> Result<Vec<String>, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

/// Replaces the `[NAME]` occurrences at the given ordinal positions with
/// their surface text.
fn restore_surfaces(body: &str, replace: &BTreeMap<usize, &str>) -> String {
    if replace.is_empty() {
        return body.to_string();
    }
    let mut out = String::with_capacity(body.len());
    for (k, piece) in body.split(NAME_TOKEN).enumerate() {
        if k > 0 {
            out.push_str(replace.get(&(k - 1)).copied().unwrap_or(NAME_TOKEN));
        }
        out.push_str(piece);
    }
    out
}

/// Parses corpus JSONL from a reader.
pub fn parse_corpus<R: BufRead>(
    reader: R,
    registry: &Registry,
    groups: &GroupMap,
    options: IngestOptions,
) -> Result<(CorpusSnapshot, IngestReport), CorpusError> {
    let mut report = IngestReport::default();
    let mut ids = HashSet::new();
    let mut entries = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| CorpusError::Io { path: format!("line {line_no}"), source })?;
        if line.trim().is_empty() {
            continue;
        }
        report.lines += 1;
        let mut bad = |reason: String| report.malformed.push(MalformedLine { line: line_no, reason });
        let raw: RawComment = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                bad(e.to_string());
                continue;
            }
        };
        let names = count_name_tokens(&raw.body);
        if names != raw.mentions.len() {
            bad(format!("{names} [NAME] tokens but {} mentions", raw.mentions.len()));
            continue;
        }
        if !ids.insert(raw.id.clone()) {
            bad(format!("duplicate comment id '{}'", raw.id));
            continue;
        }
        let mut unresolved = BTreeMap::new();
        let mut points = Vec::new();
        for (k, m) in raw.mentions.iter().enumerate() {
            match registry.get(&m.entity) {
                Some(rec) => points.push(DataPoint {
                    comment_id: raw.id.clone(),
                    entity_id: m.entity.clone(),
                    gender: rec.gender,
                    surface: m.surface.clone(),
                    descriptors: m.descriptors.iter().map(|d| d.trim().to_lowercase()).filter(|d| !d.is_empty()).collect(),
                    external_sentiment: m.ext_sentiment,
                }),
                None => {
                    unresolved.insert(k, m.surface.as_str());
                }
            }
        }
        report.unresolved_mentions += unresolved.len();
        if points.is_empty() {
            report.rejected_comments += 1;
            continue;
        }
        let comment = Comment {
            comment_id: raw.id,
            group: groups.group_of(&raw.subreddit),
            subreddit: raw.subreddit,
            body: restore_surfaces(&raw.body, &unresolved),
            created_at: raw.created_utc,
            is_bot: false,
        };
        entries.push((comment, points));
    }
    let limit = options.max_malformed_fraction;
    if report.lines > 0 && report.malformed.len() as f64 > limit * report.lines as f64 {
        return Err(CorpusError::TooManyMalformed {
            malformed: report.malformed.len(),
            total: report.lines,
            limit: limit * 100.0,
            first: report.malformed.iter().take(10).map(|m| m.line).collect(),
        });
    }
    for m in &report.malformed {
        log::warn!("corpus line {}: {}", m.line, m.reason);
    }
    Ok((CorpusSnapshot::from_comments(entries)?, report))
}

/// Reads a corpus JSONL file. See [`parse_corpus`].
pub fn load_corpus(
    path: impl AsRef<Path>,
    registry: &Registry,
    groups: &GroupMap,
    options: IngestOptions,
) -> Result<(CorpusSnapshot, IngestReport), CorpusError> {
    parse_corpus(BufReader::new(open(path.as_ref())?), registry, groups, options)
}

/// Writes raw comments as JSONL.
pub fn write_corpus_jsonl<W: Write>(mut out: W, comments: &[RawComment]) -> std::io::Result<()> {
    for c in comments {
        serde_json::to_writer(&mut out, c)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
