//! Seeded synthetic inputs: registry, group map, VAD lexicon, annotations
//! and a JSONL corpus in the ingest format.

use crate::corpus::{write_corpus_jsonl, GroupMap, RawComment, RawMention};
use crate::registry::{EntityRecord, Registry, RegistryError};
use crate::sentiment::{SentimentError, Vad, VadLexicon};
use crate::types::{ExternalSentiment, Gender, Group};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::{Path, PathBuf};

const FEMALE_GIVEN: &[&str] = &[
    "Alma", "Berit", "Clara", "Dagny", "Edith", "Frida", "Greta", "Hilde", "Ingrid", "Johanna", "Karin", "Liv",
];
const MALE_GIVEN: &[&str] = &[
    "Anders", "Bruno", "Carl", "Dirk", "Emil", "Frank", "Gustav", "Henrik", "Ivar", "Jonas", "Karl", "Lars",
];
const SURNAMES: &[&str] = &[
    "Aalto", "Berg", "Castell", "Dahl", "Eklund", "Falk", "Grund", "Holm", "Isaksen", "Jahn", "Krog", "Lind",
    "Moberg", "Nyland", "Ostrom", "Persen", "Quist", "Rask", "Sand", "Tveit",
];

/// Words scored in the synthetic VAD lexicon.
const AFFECT_WORDS: &[&str] = &[
    "love", "hate", "win", "lose", "strong", "weak", "kind", "cruel", "brave", "afraid", "honest", "corrupt", "calm",
    "angry", "great", "terrible", "smart", "stupid", "proud", "shame", "hope", "fear", "trust", "lie", "support",
    "attack", "praise", "blame", "good", "bad",
];
const FILLER: &[&str] = &["the", "a", "is", "was", "and", "but", "of", "to", "about", "really", "just", "this"];

/// Descriptor vocabulary with a sense and a female weight in [0, 1].
const DESCRIPTORS: &[(&str, &str, i8, f64)] = &[
    ("chairwoman", "profession", 0, 0.95),
    ("pantsuit", "clothing", 0, 0.9),
    ("hair", "body", 0, 0.8),
    ("beautiful", "attribute", 1, 0.8),
    ("shrill", "attribute", -1, 0.85),
    ("mother", "family", 0, 0.85),
    ("feminist", "belief", 0, 0.8),
    ("lady", "label", 0, 0.9),
    ("senator", "profession", 0, 0.3),
    ("president", "profession", 0, 0.2),
    ("bloke", "label", -1, 0.05),
    ("conservative", "belief", 0, 0.25),
    ("liberal", "belief", 0, 0.4),
    ("corrupt", "attribute", -1, 0.35),
    ("strong", "attribute", 1, 0.3),
    ("old", "attribute", -1, 0.3),
    ("tall", "body", 0, 0.25),
    ("leader", "profession", 0, 0.3),
    ("candidate", "profession", 0, 0.5),
    ("politician", "other", 0, 0.5),
    ("guy", "label", 0, 0.05),
    ("father", "family", 0, 0.1),
    ("suit", "clothing", 0, 0.2),
    ("idiot", "label", -1, 0.4),
];

const SUBREDDITS: &[(&str, Group)] = &[
    ("politics", Group::Left),
    ("democrats", Group::Left),
    ("conservative", Group::Right),
    ("republican", Group::Right),
    ("the_donald", Group::AltRight),
    ("worldnews", Group::None),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthOptions {
    pub comments: usize,
    pub female_entities: usize,
    pub male_entities: usize,
    pub seed: u64,
    /// Probability that a comment mentions more than one entity.
    pub multi_mention: f64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { comments: 1_000, female_entities: 20, male_entities: 80, seed: 7, multi_mention: 0.3 }
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub registry: Vec<EntityRecord>,
    pub groups: Vec<(String, Group)>,
    pub vad: Vec<(String, Vad)>,
    pub comments: Vec<RawComment>,
}

/// Paths written by [`SynthData::write_dir`].
#[derive(Debug, Clone)]
pub struct SynthFiles {
    pub corpus: PathBuf,
    pub registry: PathBuf,
    pub groups: PathBuf,
    pub vad: PathBuf,
    pub annotations: PathBuf,
}

fn entity(i: usize, gender: Gender) -> EntityRecord {
    let given = if gender == Gender::Female { FEMALE_GIVEN } else { MALE_GIVEN };
    let g = given[i % given.len()];
    let s = SURNAMES[(i / given.len()) % SURNAMES.len()];
    let round = i / (given.len() * SURNAMES.len());
    let surname = if round == 0 { s.to_string() } else { format!("{s}{round}") };
    let prefix = if gender == Gender::Female { "F" } else { "M" };
    EntityRecord {
        given_name: Some(g.to_string()),
        surname: Some(surname.clone()),
        ..EntityRecord::new(format!("{prefix}{i:04}"), format!("{g} {surname}"), gender)
    }
}

pub fn generate(opts: &SynthOptions) -> SynthData {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let registry: Vec<EntityRecord> = (0..opts.female_entities)
        .map(|i| entity(i, Gender::Female))
        .chain((0..opts.male_entities).map(|i| entity(i, Gender::Male)))
        .collect();
    // Heavy-tailed popularity so in-degrees look like real mention counts.
    let weights: Vec<f64> = (0..registry.len()).map(|i| 1.0 / ((i % 37) as f64 + 1.0).powf(1.2)).collect();
    let pick = WeightedIndex::new(&weights).expect("positive weights");
    let vad: Vec<(String, Vad)> = AFFECT_WORDS
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let base = if i % 2 == 0 { 0.7 } else { 0.25 };
            let vad = Vad {
                valence: (base + rng.random_range(-0.2..0.2f64)).clamp(0.0, 1.0),
                arousal: rng.random_range(0.1..0.9),
                dominance: (base + rng.random_range(-0.25..0.25f64)).clamp(0.0, 1.0),
            };
            (w.to_string(), vad)
        })
        .collect();
    let mut comments = Vec::with_capacity(opts.comments);
    for c in 0..opts.comments {
        let n_mentions = if rng.random_bool(opts.multi_mention) { rng.random_range(2..=4) } else { 1 };
        let (sub, _) = SUBREDDITS[rng.random_range(0..SUBREDDITS.len())];
        let mut body = Vec::new();
        let mut mentions = Vec::with_capacity(n_mentions);
        for _ in 0..n_mentions {
            let e = &registry[pick.sample(&mut rng)];
            for _ in 0..rng.random_range(0..6) {
                body.push(word(&mut rng));
            }
            body.push(crate::corpus::NAME_TOKEN.to_string());
            let given_p = if e.gender == Gender::Female { 0.3 } else { 0.08 };
            let r: f64 = rng.random();
            let surface = if r < given_p {
                e.given_name.clone().unwrap()
            } else if r < given_p + 0.35 {
                e.full_name.clone()
            } else if r < 0.95 {
                e.surname.clone().unwrap()
            } else {
                format!("{}ie", e.given_name.as_deref().unwrap())
            };
            let descriptors = (0..rng.random_range(0..3))
                .filter_map(|_| {
                    let (w, _, _, fw) = DESCRIPTORS[rng.random_range(0..DESCRIPTORS.len())];
                    let keep = if e.gender == Gender::Female { fw } else { 1.0 - fw };
                    rng.random_bool(keep).then(|| w.to_string())
                })
                .collect();
            let ext_sentiment = match rng.random_range(0..3) {
                0 => Some(ExternalSentiment::Positive),
                1 => Some(ExternalSentiment::Negative),
                _ => None,
            };
            mentions.push(RawMention { entity: e.entity_id.clone(), surface, descriptors, ext_sentiment });
        }
        for _ in 0..rng.random_range(2..30) {
            body.push(word(&mut rng));
        }
        comments.push(RawComment {
            id: format!("t1_{c:07}"),
            subreddit: sub.to_string(),
            body: body.join(" "),
            created_utc: 1_500_000_000 + c as i64 * 60,
            mentions,
        });
    }
    SynthData {
        registry,
        groups: SUBREDDITS.iter().map(|(s, g)| (s.to_string(), *g)).collect(),
        vad,
        comments,
    }
}

fn word(rng: &mut ChaCha8Rng) -> String {
    if rng.random_bool(0.4) {
        AFFECT_WORDS[rng.random_range(0..AFFECT_WORDS.len())].to_string()
    } else {
        FILLER[rng.random_range(0..FILLER.len())].to_string()
    }
}

impl SynthData {
    pub fn registry(&self) -> Result<Registry, RegistryError> {
        Registry::from_records(self.registry.iter().cloned())
    }

    pub fn group_map(&self) -> GroupMap {
        GroupMap::new(self.groups.iter().cloned())
    }

    pub fn lexicon(&self) -> Result<VadLexicon, SentimentError> {
        VadLexicon::from_entries(self.vad.iter().cloned())
    }

    /// Writes the five input files into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> std::io::Result<SynthFiles> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let files = SynthFiles {
            corpus: dir.join("corpus.jsonl"),
            registry: dir.join("registry.csv"),
            groups: dir.join("groups.csv"),
            vad: dir.join("vad.tsv"),
            annotations: dir.join("annotations.csv"),
        };
        write_corpus_jsonl(std::io::BufWriter::new(std::fs::File::create(&files.corpus)?), &self.comments)?;

        let mut w = csv::Writer::from_path(&files.registry)?;
        w.write_record(["entity_id", "full_name", "given_name", "surname", "gender", "country"])?;
        for r in &self.registry {
            w.write_record([
                r.entity_id.as_str(),
                &r.full_name,
                r.given_name.as_deref().unwrap_or(""),
                r.surname.as_deref().unwrap_or(""),
                r.gender.as_str(),
                r.country.as_deref().unwrap_or(""),
            ])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(&files.groups)?;
        w.write_record(["subreddit", "group"])?;
        for (s, g) in &self.groups {
            w.write_record([s.as_str(), g.as_str()])?;
        }
        w.flush()?;

        let mut f = std::io::BufWriter::new(std::fs::File::create(&files.vad)?);
        writeln!(f, "word\tvalence\tarousal\tdominance")?;
        for (word, v) in &self.vad {
            writeln!(f, "{word}\t{:.3}\t{:.3}\t{:.3}", v.valence, v.arousal, v.dominance)?;
        }
        f.flush()?;

        let mut w = csv::Writer::from_path(&files.annotations)?;
        w.write_record(["word", "sense", "sentiment"])?;
        for (word, sense, sentiment, _) in DESCRIPTORS {
            w.write_record([*word, sense, &sentiment.to_string()])?;
        }
        w.flush()?;
        Ok(files)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{count_name_tokens, load_corpus, load_group_map, IngestOptions};
    use crate::lexical::load_annotations;
    use crate::sentiment::load_vad;

    #[test]
    fn deterministic_and_well_formed() {
        let opts = SynthOptions { comments: 300, ..Default::default() };
        let a = generate(&opts);
        let b = generate(&opts);
        assert_eq!(a.comments, b.comments);
        for c in &a.comments {
            assert_eq!(count_name_tokens(&c.body), c.mentions.len());
        }
        let other = generate(&SynthOptions { seed: 8, ..opts });
        assert_ne!(a.comments, other.comments);
    }

    #[test]
    fn round_trips_through_loaders() {
        let dir = tempfile::tempdir().unwrap();
        let data = generate(&SynthOptions { comments: 200, ..Default::default() });
        let files = data.write_dir(dir.path()).unwrap();
        let registry = Registry::load(&files.registry).unwrap();
        assert_eq!(registry.len(), 100);
        let groups = load_group_map(&files.groups).unwrap();
        let (corpus, report) = load_corpus(&files.corpus, &registry, &groups, IngestOptions::default()).unwrap();
        assert_eq!(corpus.len(), 200);
        assert!(report.malformed.is_empty());
        assert_eq!(load_vad(&files.vad).unwrap().len(), AFFECT_WORDS.len());
        assert_eq!(load_annotations(&files.annotations).unwrap().len(), DESCRIPTORS.len());
        assert!(corpus.counts().comments_by_group.len() >= 4);
    }
}
