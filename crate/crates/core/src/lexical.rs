//! Gendered descriptors: occurrence PMI, entity-level PMI and annotated
//! sense distributions.
//!
//! The entity-level score treats each politician as one document, so a word
//! used heavily about a single person cannot dominate a gender's list.

use crate::corpus::{partition, CorpusSnapshot, PartitionKey};
use crate::nominal::{chi_square_nonempty, ChiSquareSummary};
use crate::stats::{cohens_kappa, odds_ratio, ContingencyTable, StatsError, TestResult};
use crate::types::{Gender, Group, Outcome};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LexicalError {
    #[error("no descriptors in scope")]
    NoDescriptors,
    #[error("cannot read annotations {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("annotation line {line}: {message}")]
    Annotation { line: u64, message: String },
    #[error("no annotations for the {0} gender")]
    GenderAbsent(Gender),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

fn gi(g: Gender) -> usize {
    match g {
        Gender::Female => 0,
        _ => 1,
    }
}

/// Occurrence and entity-document counts of descriptors by gender.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DescriptorCounts {
    /// n(w, g), indexed `[female, male]`.
    pub occurrences: BTreeMap<String, [u64; 2]>,
    /// e(w, g): entities of gender g whose descriptors include w.
    pub entities: BTreeMap<String, [u64; 2]>,
    /// e(g): entities of gender g with at least one descriptor.
    pub entities_by_gender: [u64; 2],
    /// n(g): descriptor occurrences per gender.
    pub occurrences_by_gender: [u64; 2],
}

impl DescriptorCounts {
    /// E: entities with at least one descriptor.
    pub fn total_entities(&self) -> u64 {
        self.entities_by_gender.iter().sum()
    }

    pub fn total_occurrences(&self) -> u64 {
        self.occurrences_by_gender.iter().sum()
    }

    pub fn n(&self, w: &str) -> u64 {
        self.occurrences.get(w).map_or(0, |c| c[0] + c[1])
    }

    pub fn e(&self, w: &str) -> u64 {
        self.entities.get(w).map_or(0, |c| c[0] + c[1])
    }

    /// e(w, f) + e(w, m) == e(w) and e(w, g) <= e(g) for every word.
    pub fn is_consistent(&self) -> bool {
        self.entities.iter().all(|(w, c)| {
            c[0] <= self.entities_by_gender[0]
                && c[1] <= self.entities_by_gender[1]
                && c[0] + c[1] == self.e(w)
                && self.occurrences.contains_key(w)
        })
    }

    /// Merges another partial count. Entities must be disjoint.
    pub fn merge(&mut self, other: &DescriptorCounts) {
        for (w, c) in &other.occurrences {
            let e = self.occurrences.entry(w.clone()).or_default();
            e[0] += c[0];
            e[1] += c[1];
        }
        for (w, c) in &other.entities {
            let e = self.entities.entry(w.clone()).or_default();
            e[0] += c[0];
            e[1] += c[1];
        }
        for i in 0..2 {
            self.entities_by_gender[i] += other.entities_by_gender[i];
            self.occurrences_by_gender[i] += other.occurrences_by_gender[i];
        }
    }
}

/// Counts descriptors on female and male data points.
pub fn collect_counts(corpus: &CorpusSnapshot) -> Result<DescriptorCounts, LexicalError> {
    let mut per_entity: BTreeMap<&str, (Gender, BTreeSet<String>)> = BTreeMap::new();
    let mut counts = DescriptorCounts::default();
    for dp in corpus.datapoints().iter().filter(|d| d.gender.is_binary()) {
        for raw in &dp.descriptors {
            let w = raw.trim().to_lowercase();
            if w.is_empty() {
                continue;
            }
            counts.occurrences.entry(w.clone()).or_default()[gi(dp.gender)] += 1;
            counts.occurrences_by_gender[gi(dp.gender)] += 1;
            per_entity.entry(&dp.entity_id).or_insert_with(|| (dp.gender, BTreeSet::new())).1.insert(w);
        }
    }
    if counts.total_occurrences() == 0 {
        return Err(LexicalError::NoDescriptors);
    }
    for (gender, words) in per_entity.values() {
        counts.entities_by_gender[gi(*gender)] += 1;
        for w in words {
            counts.entities.entry(w.clone()).or_default()[gi(*gender)] += 1;
        }
    }
    debug_assert!(counts.is_consistent());
    Ok(counts)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinCountMode {
    /// n(w) >= min over both genders together.
    #[default]
    Total,
    /// n(w, g) >= min for each gender.
    PerGender,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinCount {
    pub min: u64,
    pub mode: MinCountMode,
}

impl Default for MinCount {
    fn default() -> Self {
        MinCount { min: 3, mode: MinCountMode::Total }
    }
}

impl MinCount {
    fn admits(&self, counts: &DescriptorCounts, w: &str) -> bool {
        let c = counts.occurrences.get(w).copied().unwrap_or_default();
        match self.mode {
            MinCountMode::Total => c[0] + c[1] >= self.min,
            MinCountMode::PerGender => c[0] >= self.min && c[1] >= self.min,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredWord {
    pub word: String,
    pub score: f64,
}

/// Per-gender word lists, highest score first, ties by word.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RankedLexicon {
    pub female: Vec<ScoredWord>,
    pub male: Vec<ScoredWord>,
}

impl RankedLexicon {
    pub fn list(&self, g: Gender) -> &[ScoredWord] {
        if g == Gender::Female {
            &self.female
        } else {
            &self.male
        }
    }

    /// 1-based rank of `word` in the list for `g`.
    pub fn rank(&self, g: Gender, word: &str) -> Option<usize> {
        self.list(g).iter().position(|s| s.word == word).map(|i| i + 1)
    }

    fn build(scores: impl Iterator<Item = (String, [Option<f64>; 2])>) -> Self {
        let mut lists = [Vec::new(), Vec::new()];
        for (word, s) in scores {
            for (list, score) in lists.iter_mut().zip(s) {
                if let Some(score) = score.filter(|x| x.is_finite()) {
                    list.push(ScoredWord { word: word.clone(), score });
                }
            }
        }
        for list in &mut lists {
            list.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.word.cmp(&b.word)));
        }
        let [female, male] = lists;
        RankedLexicon { female, male }
    }
}

/// PMI(w, g) = ln(P(w, g) / (P(w) P(g))) from occurrence counts.
pub fn pmi_traditional(counts: &DescriptorCounts, min: MinCount) -> RankedLexicon {
    let n = counts.total_occurrences() as f64;
    let ng = counts.occurrences_by_gender.map(|x| x as f64);
    RankedLexicon::build(counts.occurrences.iter().filter(|(w, _)| min.admits(counts, w)).map(|(w, c)| {
        let nw = (c[0] + c[1]) as f64;
        let score = |i: usize| (c[i] > 0 && ng[i] > 0.0).then(|| (c[i] as f64 * n / (nw * ng[i])).ln());
        (w.clone(), [score(0), score(1)])
    }))
}

/// PMIe(w, g) = ln(e(w, g) E / (e(w) e(g))).
pub fn pmi_entity(counts: &DescriptorCounts, min: MinCount) -> RankedLexicon {
    let e_total = counts.total_entities() as f64;
    let eg = counts.entities_by_gender.map(|x| x as f64);
    RankedLexicon::build(counts.entities.iter().filter(|(w, _)| min.admits(counts, w)).map(|(w, c)| {
        let ew = (c[0] + c[1]) as f64;
        let score = |i: usize| (c[i] > 0 && eg[i] > 0.0).then(|| (c[i] as f64 * e_total / (ew * eg[i])).ln());
        (w.clone(), [score(0), score(1)])
    }))
}

/// First `k` entries per gender. Warns when a list is shorter than `k`.
pub fn top_k(lexicon: &RankedLexicon, k: usize) -> RankedLexicon {
    let take = |g: Gender| {
        let list = lexicon.list(g);
        if list.len() < k {
            log::warn!("only {} {g} words available for top {k}", list.len());
        }
        list.iter().take(k).cloned().collect()
    };
    RankedLexicon { female: take(Gender::Female), male: take(Gender::Male) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Profession,
    Belief,
    Attribute,
    Body,
    Family,
    Clothing,
    Label,
    Other,
}

impl Sense {
    pub const ALL: [Sense; 8] = [
        Sense::Profession,
        Sense::Belief,
        Sense::Attribute,
        Sense::Body,
        Sense::Family,
        Sense::Clothing,
        Sense::Label,
        Sense::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Profession => "profession",
            Sense::Belief => "belief",
            Sense::Attribute => "attribute",
            Sense::Body => "body",
            Sense::Family => "family",
            Sense::Clothing => "clothing",
            Sense::Label => "label",
            Sense::Other => "other",
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sense {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        Sense::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown sense '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SenseAnnotation {
    pub word: String,
    /// Lists the word was drawn from.
    pub genders: Vec<Gender>,
    pub sense: Sense,
    /// -1, 0 or 1.
    pub sentiment: i8,
    /// A second annotator's sense, when available.
    pub second_sense: Option<Sense>,
}

#[derive(Debug, Deserialize)]
struct AnnotationRow {
    word: String,
    sense: String,
    sentiment: i8,
    #[serde(default)]
    gender: Option<String>,
    #[serde(default)]
    sense_b: Option<String>,
}

/// Reads `word,sense,sentiment` CSV with a header. Optional `gender` and
/// `sense_b` columns give the source list and a second annotation.
pub fn read_annotations<R: Read>(reader: R) -> Result<Vec<SenseAnnotation>, LexicalError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize::<AnnotationRow>() {
        let line = out.len() as u64 + 2;
        let bad = |message: String| LexicalError::Annotation { line, message };
        let row = row.map_err(|e| bad(e.to_string()))?;
        if !(-1..=1).contains(&row.sentiment) {
            return Err(bad(format!("sentiment {} not in {{-1, 0, 1}}", row.sentiment)));
        }
        let genders = match row.gender.as_deref().map(str::trim).filter(|s| !s.is_empty()) {
            Some(g) => vec![g.parse::<Gender>().map_err(bad)?],
            None => Vec::new(),
        };
        let second_sense = match row.sense_b.as_deref().map(str::trim).filter(|s| !s.is_empty()) {
            Some(s) => Some(s.parse::<Sense>().map_err(bad)?),
            None => None,
        };
        out.push(SenseAnnotation {
            word: row.word.to_lowercase(),
            genders,
            sense: row.sense.parse().map_err(bad)?,
            sentiment: row.sentiment,
            second_sense,
        });
    }
    Ok(out)
}

pub fn load_annotations(path: impl AsRef<Path>) -> Result<Vec<SenseAnnotation>, LexicalError> {
    let path = path.as_ref();
    let file =
        std::fs::File::open(path).map_err(|source| LexicalError::Io { path: path.display().to_string(), source })?;
    read_annotations(file)
}

/// Annotations for the words of a ranked lexicon, tagged by the list they
/// appear in. Words without an annotation are skipped.
pub fn annotate(lexicon: &RankedLexicon, annotations: &[SenseAnnotation]) -> Vec<SenseAnnotation> {
    let by_word: HashMap<&str, &SenseAnnotation> = annotations.iter().map(|a| (a.word.as_str(), a)).collect();
    let mut out = Vec::new();
    for g in Gender::BINARY {
        for s in lexicon.list(g) {
            if let Some(a) = by_word.get(s.word.as_str()) {
                out.push(SenseAnnotation { genders: vec![g], ..(*a).clone() });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SenseDistribution {
    /// Counts per sense, `[female, male]`.
    pub counts: BTreeMap<Sense, [u64; 2]>,
    /// Senses with no words at all, folded into `other` for the test.
    pub pooled_into_other: Vec<Sense>,
    pub chi_square: Outcome<ChiSquareSummary>,
    pub odds_ratios: Vec<SenseOdds>,
    /// Counts per sentiment value -1, 0, 1, `[female, male]`.
    pub sentiment: BTreeMap<i8, [u64; 2]>,
    pub sentiment_chi_square: Outcome<ChiSquareSummary>,
    /// Odds of a negative word for men relative to women.
    pub male_negative_odds: Outcome<TestResult>,
    /// Agreement with the second annotator where one is recorded.
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SenseOdds {
    pub senses: Vec<Sense>,
    pub numerator: Gender,
    pub result: Outcome<TestResult>,
}

fn sense_odds(counts: &BTreeMap<Sense, [u64; 2]>, senses: &[Sense], numerator: Gender) -> SenseOdds {
    let totals = counts.values().fold([0u64; 2], |acc, c| [acc[0] + c[0], acc[1] + c[1]]);
    let inside = senses.iter().fold([0u64; 2], |acc, s| {
        let c = counts.get(s).copied().unwrap_or_default();
        [acc[0] + c[0], acc[1] + c[1]]
    });
    let (a, b) = (gi(numerator), gi(numerator.swapped()));
    SenseOdds {
        senses: senses.to_vec(),
        numerator,
        result: odds_ratio(inside[a], totals[a] - inside[a], inside[b], totals[b] - inside[b]).into(),
    }
}

/// Gender x sense contingency analysis. Each annotation counts once per
/// gender it is tagged with.
pub fn sense_distribution(annotations: &[SenseAnnotation]) -> Result<SenseDistribution, LexicalError> {
    let mut counts: BTreeMap<Sense, [u64; 2]> = Sense::ALL.iter().map(|s| (*s, [0, 0])).collect();
    let mut sentiment: BTreeMap<i8, [u64; 2]> = [(-1, [0, 0]), (0, [0, 0]), (1, [0, 0])].into();
    for a in annotations {
        for g in a.genders.iter().filter(|g| g.is_binary()) {
            counts.get_mut(&a.sense).unwrap()[gi(*g)] += 1;
            sentiment.get_mut(&a.sentiment).unwrap()[gi(*g)] += 1;
        }
    }
    for g in Gender::BINARY {
        if counts.values().all(|c| c[gi(g)] == 0) {
            return Err(LexicalError::GenderAbsent(g));
        }
    }
    let pooled_into_other: Vec<Sense> =
        counts.iter().filter(|(s, c)| **s != Sense::Other && c[0] + c[1] == 0).map(|(s, _)| *s).collect();
    let kept: Vec<(Sense, [u64; 2])> =
        counts.iter().filter(|(s, _)| !pooled_into_other.contains(s)).map(|(s, c)| (*s, *c)).collect();
    let table = ContingencyTable {
        row_labels: vec!["female".into(), "male".into()],
        col_labels: kept.iter().map(|(s, _)| s.to_string()).collect(),
        counts: vec![kept.iter().map(|(_, c)| c[0]).collect(), kept.iter().map(|(_, c)| c[1]).collect()],
    };
    let sentiment_table = ContingencyTable {
        row_labels: vec!["female".into(), "male".into()],
        col_labels: sentiment.keys().map(|k| k.to_string()).collect(),
        counts: vec![sentiment.values().map(|c| c[0]).collect(), sentiment.values().map(|c| c[1]).collect()],
    };
    let neg = sentiment[&-1];
    let (nf, nm) = (neg[0], neg[1]);
    let (tf, tm) = (sentiment.values().map(|c| c[0]).sum::<u64>(), sentiment.values().map(|c| c[1]).sum::<u64>());
    let pairs: Vec<(Sense, Sense)> =
        annotations.iter().filter_map(|a| a.second_sense.map(|b| (a.sense, b))).collect();
    let kappa = if pairs.is_empty() {
        None
    } else {
        let (x, y): (Vec<Sense>, Vec<Sense>) = pairs.into_iter().unzip();
        Some(cohens_kappa(&x, &y)?)
    };
    Ok(SenseDistribution {
        chi_square: chi_square_nonempty(&table).into(),
        odds_ratios: vec![
            sense_odds(&counts, &[Sense::Body], Gender::Female),
            sense_odds(&counts, &[Sense::Profession, Sense::Belief], Gender::Male),
            sense_odds(&counts, &[Sense::Attribute], Gender::Female),
        ],
        sentiment_chi_square: chi_square_nonempty(&sentiment_table).into(),
        male_negative_odds: odds_ratio(nm, tm - nm, nf, tf - nf).into(),
        counts,
        pooled_into_other,
        sentiment,
        kappa,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LexicalReport {
    pub min_count: u64,
    pub min_count_mode: MinCountMode,
    pub entities: u64,
    pub top_k: usize,
    pub traditional: RankedLexicon,
    pub entity: RankedLexicon,
    /// Present when annotations were supplied.
    pub senses: Option<Outcome<SenseDistribution>>,
}

/// Counts, both PMI variants, their top-k lists and, given annotations,
/// the sense distribution of the entity-level top-k words.
pub fn lexical_report(
    corpus: &CorpusSnapshot,
    min: MinCount,
    k: usize,
    annotations: Option<&[SenseAnnotation]>,
) -> Result<LexicalReport, LexicalError> {
    let counts = collect_counts(corpus)?;
    let entity = top_k(&pmi_entity(&counts, min), k);
    let senses = annotations.map(|a| sense_distribution(&annotate(&entity, a)).into());
    Ok(LexicalReport {
        min_count: min.min,
        min_count_mode: min.mode,
        entities: counts.total_entities(),
        top_k: k,
        traditional: top_k(&pmi_traditional(&counts, min), k),
        entity,
        senses,
    })
}

/// Words kept per gender in each group's lexicon.
pub const GROUP_TOP_K: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupLexicon {
    pub entity: RankedLexicon,
    pub senses: Option<Outcome<SenseDistribution>>,
}

/// Female-list odds of one sense in group `a` against group `b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossGroupOdds {
    pub sense: Sense,
    pub group_a: Group,
    pub group_b: Group,
    pub result: Outcome<TestResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LexicalByGroup {
    pub groups: BTreeMap<Group, Outcome<GroupLexicon>>,
    pub female_sense_odds: Vec<CrossGroupOdds>,
}

/// Top-50 entity lexica per partisan group and, with annotations, the
/// female body and attribute shares compared between each pair of groups.
pub fn lexical_by_group(
    corpus: &CorpusSnapshot,
    min: MinCount,
    annotations: Option<&[SenseAnnotation]>,
) -> LexicalByGroup {
    let parts = partition(corpus, PartitionKey::Group);
    let mut groups = BTreeMap::new();
    let mut female_counts: BTreeMap<Group, BTreeMap<Sense, u64>> = BTreeMap::new();
    for group in Group::PARTISAN {
        let Some(part) = parts.get(group.as_str()) else { continue };
        let result = collect_counts(part).map(|counts| {
            let entity = top_k(&pmi_entity(&counts, min), GROUP_TOP_K);
            let senses = annotations.map(|a| {
                let tagged = annotate(&entity, a);
                let f = female_counts.entry(group).or_default();
                for t in tagged.iter().filter(|t| t.genders.contains(&Gender::Female)) {
                    *f.entry(t.sense).or_default() += 1;
                }
                sense_distribution(&tagged).into()
            });
            GroupLexicon { entity, senses }
        });
        groups.insert(group, result.into());
    }
    let mut female_sense_odds = Vec::new();
    for sense in [Sense::Body, Sense::Attribute] {
        for (i, a) in Group::PARTISAN.iter().enumerate() {
            for b in &Group::PARTISAN[i + 1..] {
                let (Some(ca), Some(cb)) = (female_counts.get(a), female_counts.get(b)) else { continue };
                let split = |c: &BTreeMap<Sense, u64>| {
                    let n = c.get(&sense).copied().unwrap_or(0);
                    (n, c.values().sum::<u64>() - n)
                };
                let ((ai, ao), (bi, bo)) = (split(ca), split(cb));
                female_sense_odds.push(CrossGroupOdds {
                    sense,
                    group_a: *a,
                    group_b: *b,
                    result: odds_ratio(ai, ao, bi, bo).into(),
                });
            }
        }
    }
    LexicalByGroup { groups, female_sense_odds }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::comment;
    use crate::corpus::{Comment, DataPoint};
    use proptest::prelude::*;
    use Gender::*;

    /// One comment per `(entity, gender, descriptors)`.
    fn corpus(rows: &[(&str, Gender, &[&str])]) -> CorpusSnapshot {
        let entries: Vec<(Comment, Vec<DataPoint>)> = rows
            .iter()
            .enumerate()
            .map(|(i, (e, g, ds))| {
                let (c, mut d) = comment(&format!("c{i}"), Group::None, "[NAME]", &[(e, *g)]);
                d[0].descriptors = ds.iter().map(|s| s.to_string()).collect();
                (c, d)
            })
            .collect();
        CorpusSnapshot::from_comments(entries).unwrap()
    }

    const ANY: MinCount = MinCount { min: 0, mode: MinCountMode::Total };

    #[test]
    fn dedup_within_entity() {
        let c = collect_counts(&corpus(&[("A", Male, &["a", "a", "b"])])).unwrap();
        assert_eq!(c.occurrences["a"], [0, 2]);
        assert_eq!(c.entities["a"], [0, 1]);
        assert_eq!(c.total_entities(), 1);
    }

    #[test]
    fn three_entity_tally() {
        let c = collect_counts(&corpus(&[
            ("F1", Female, &["smart", "Shrill"]),
            ("F1", Female, &["shrill"]),
            ("F2", Female, &["smart"]),
            ("M1", Male, &["smart", "tall", "tall"]),
            ("O", Other, &["smart"]),
        ]))
        .unwrap();
        assert_eq!(c.occurrences["smart"], [2, 1]);
        assert_eq!(c.occurrences["shrill"], [2, 0]);
        assert_eq!(c.entities["smart"], [2, 1]);
        assert_eq!(c.entities["shrill"], [1, 0]);
        assert_eq!(c.entities_by_gender, [2, 1]);
        assert_eq!(c.occurrences_by_gender, [4, 3]);
        assert!(c.is_consistent());
        assert!(matches!(collect_counts(&corpus(&[("A", Male, &[])])), Err(LexicalError::NoDescriptors)));
    }

    #[test]
    fn disjoint_vocabularies() {
        let c = collect_counts(&corpus(&[("F", Female, &["x", "y"]), ("M", Male, &["z"])])).unwrap();
        for (w, e) in &c.entities {
            assert!(e[0] == 0 || e[1] == 0);
            assert_eq!(c.e(w), e[0].max(e[1]));
        }
    }

    #[test]
    fn proportional_word_has_zero_pmi() {
        // Marginals 2:1 and the word split 2:1.
        let c = collect_counts(&corpus(&[("F", Female, &["w", "w", "a", "a"]), ("M", Male, &["w", "b"])])).unwrap();
        let l = pmi_traditional(&c, ANY);
        let w = l.female.iter().find(|s| s.word == "w").unwrap();
        assert!(w.score.abs() < 1e-12);
    }

    #[test]
    fn traditional_formula() {
        let c = collect_counts(&corpus(&[("F", Female, &["w", "a", "a"]), ("M", Male, &["w", "w", "w", "b"])])).unwrap();
        let l = pmi_traditional(&c, ANY);
        // N = 7; n(w) = 4; n(f) = 3; n(w, f) = 1.
        let expect = ((1.0 / 7.0) / ((4.0 / 7.0) * (3.0 / 7.0f64))).ln();
        let got = l.female.iter().find(|s| s.word == "w").unwrap().score;
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn entity_pmi_examples() {
        let c = collect_counts(&corpus(&[("F", Female, &["w"]), ("M", Male, &["w"])])).unwrap();
        assert!(pmi_entity(&c, ANY).female[0].score.abs() < 1e-12);
        let c = collect_counts(&corpus(&[("F1", Female, &["w"]), ("F2", Female, &["w"]), ("M", Male, &["x"])])).unwrap();
        let got = pmi_entity(&c, ANY).female.iter().find(|s| s.word == "w").unwrap().score;
        assert!((got - 1.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn min_count_modes() {
        let c = collect_counts(&corpus(&[("F", Female, &["a", "a", "b"]), ("M", Male, &["a", "b", "b", "c"])])).unwrap();
        let total = pmi_entity(&c, MinCount { min: 3, mode: MinCountMode::Total });
        let words: BTreeSet<&str> = total.female.iter().chain(&total.male).map(|s| s.word.as_str()).collect();
        assert_eq!(words, ["a", "b"].into());
        let strict = pmi_entity(&c, MinCount { min: 2, mode: MinCountMode::PerGender });
        assert!(strict.female.is_empty() && strict.male.is_empty());
        let strict = pmi_entity(&c, MinCount { min: 1, mode: MinCountMode::PerGender });
        assert_eq!(strict.male.len(), 2);
    }

    /// Background words spread over several entities, plus one word used
    /// heavily about a single man and once each about five women.
    fn confound_corpus() -> CorpusSnapshot {
        let mut rows: Vec<(String, Gender, Vec<String>)> = Vec::new();
        for i in 0..6 {
            rows.push((format!("M{i}"), Male, vec!["policy".into(), "tax".into()]));
            rows.push((format!("F{i}"), Female, vec!["policy".into(), "tax".into(), "family".into()]));
        }
        rows.push(("M0".into(), Male, vec!["tremendous".into(); 100]));
        for i in 1..6 {
            rows.push((format!("F{i}"), Female, vec!["tremendous".into()]));
        }
        let entries: Vec<(Comment, Vec<DataPoint>)> = rows
            .iter()
            .enumerate()
            .map(|(i, (e, g, ds))| {
                let (c, mut d) = comment(&format!("c{i}"), Group::None, "[NAME]", &[(e.as_str(), *g)]);
                d[0].descriptors = ds.clone();
                (c, d)
            })
            .collect();
        CorpusSnapshot::from_comments(entries).unwrap()
    }

    #[test]
    fn single_entity_word_is_suppressed() {
        let c = collect_counts(&confound_corpus()).unwrap();
        let trad = pmi_traditional(&c, MinCount::default());
        let ent = pmi_entity(&c, MinCount::default());
        let r_trad = trad.rank(Male, "tremendous").unwrap();
        let r_ent = ent.rank(Male, "tremendous").unwrap();
        assert_eq!(r_trad, 1);
        assert_eq!(r_ent, ent.male.len(), "{ent:?}");
        assert!(ent.male[r_ent - 1].score < 0.0);
    }

    #[test]
    fn top_k_and_ties() {
        let c = collect_counts(&corpus(&[("F", Female, &["b", "a", "c"]), ("M", Male, &["z"])])).unwrap();
        let l = pmi_entity(&c, ANY);
        let words: Vec<&str> = l.female.iter().map(|s| s.word.as_str()).collect();
        assert_eq!(words, ["a", "b", "c"]);
        let t = top_k(&l, 10);
        assert_eq!(t.female.len(), 3);
        assert_eq!(top_k(&l, 2).female.len(), 2);
    }

    fn ann(word: &str, sense: Sense, sentiment: i8, g: Gender) -> SenseAnnotation {
        SenseAnnotation { word: word.into(), genders: vec![g], sense, sentiment, second_sense: None }
    }

    #[test]
    fn identical_profiles() {
        let mut a = Vec::new();
        for (i, s) in Sense::ALL.iter().enumerate() {
            for g in Gender::BINARY {
                a.push(ann(&format!("{s}{i}{g}"), *s, 0, g));
            }
        }
        let d = sense_distribution(&a).unwrap();
        assert!(d.chi_square.ok().unwrap().result.effect_size.unwrap() < 1e-12);
    }

    #[test]
    fn sense_odds_formula_and_pooling() {
        let plan: &[(Sense, u64, u64)] = &[
            (Sense::Profession, 2, 6),
            (Sense::Belief, 1, 4),
            (Sense::Attribute, 5, 3),
            (Sense::Body, 6, 1),
            (Sense::Family, 2, 0),
            (Sense::Label, 3, 5),
            (Sense::Other, 4, 4),
        ];
        let mut a = Vec::new();
        for &(s, f, m) in plan {
            for i in 0..f {
                a.push(ann(&format!("f{s}{i}"), s, -1, Female));
            }
            for i in 0..m {
                a.push(ann(&format!("m{s}{i}"), s, if i % 2 == 0 { 0 } else { 1 }, Male));
            }
        }
        let d = sense_distribution(&a).unwrap();
        assert_eq!(d.pooled_into_other, vec![Sense::Clothing]);
        assert_eq!(d.chi_square.ok().unwrap().result.df, crate::stats::Df::One(6.0));
        let (tf, tm) = (23.0, 23.0);
        let body = d.odds_ratios[0].result.ok().unwrap().statistic;
        assert!((body - (6.0 / (tf - 6.0)) / (1.0 / (tm - 1.0))).abs() < 1e-12);
        let prof = d.odds_ratios[1].result.ok().unwrap().statistic;
        assert!((prof - (10.0 / (tm - 10.0)) / (3.0 / (tf - 3.0))).abs() < 1e-12);
        let attr = d.odds_ratios[2].result.ok().unwrap().statistic;
        assert!((attr - (5.0 / 18.0) / (3.0 / 20.0)).abs() < 1e-12);
        assert_eq!(d.sentiment[&-1], [23, 0]);
    }

    #[test]
    fn annotation_csv() {
        let text = "word,sense,sentiment,gender,sense_b\nPantsuit,clothing,0,female,clothing\nbloke,label,-1,male,other\n";
        let a = read_annotations(text.as_bytes()).unwrap();
        assert_eq!(a[0].word, "pantsuit");
        assert_eq!(a[1].genders, vec![Male]);
        let d = sense_distribution(&a).unwrap();
        assert!(d.kappa.is_some());
        assert!(read_annotations("word,sense,sentiment\nx,hair,0\n".as_bytes()).is_err());
        assert!(read_annotations("word,sense,sentiment\nx,body,2\n".as_bytes()).is_err());
        let plain = read_annotations("word,sense,sentiment\nx,body,1\n".as_bytes()).unwrap();
        assert!(plain[0].genders.is_empty());
    }

    #[test]
    fn annotate_tags_by_list() {
        let lex = RankedLexicon {
            female: vec![ScoredWord { word: "pantsuit".into(), score: 1.0 }],
            male: vec![ScoredWord { word: "bloke".into(), score: 1.0 }, ScoredWord { word: "x".into(), score: 0.5 }],
        };
        let anns = vec![ann("pantsuit", Sense::Clothing, 0, Male), ann("bloke", Sense::Label, -1, Female)];
        let tagged = annotate(&lex, &anns);
        assert_eq!(tagged.len(), 2);
        assert_eq!(tagged[0].genders, vec![Female]);
        assert_eq!(tagged[1].genders, vec![Male]);
    }

    #[test]
    fn group_lexica() {
        let mut rows = Vec::new();
        for (gi, group) in [Group::Left, Group::Right].into_iter().enumerate() {
            for i in 0..3 {
                let f = format!("F{gi}{i}");
                let m = format!("M{gi}{i}");
                rows.push((f, Female, vec!["hair", "smart", "smart", "smart"], group));
                rows.push((m, Male, vec!["senator", "senator", "senator", "smart"], group));
            }
        }
        let entries: Vec<(Comment, Vec<DataPoint>)> = rows
            .iter()
            .enumerate()
            .map(|(i, (e, g, ds, group))| {
                let (c, mut d) = comment(&format!("c{i}"), *group, "[NAME]", &[(e.as_str(), *g)]);
                d[0].descriptors = ds.iter().map(|s| s.to_string()).collect();
                (c, d)
            })
            .collect();
        let corpus = CorpusSnapshot::from_comments(entries).unwrap();
        let anns = vec![
            ann("hair", Sense::Body, 0, Female),
            ann("smart", Sense::Attribute, 1, Female),
            ann("senator", Sense::Profession, 0, Male),
        ];
        let r = lexical_by_group(&corpus, MinCount::default(), Some(&anns));
        assert_eq!(r.groups.len(), 2);
        let left = r.groups[&Group::Left].ok().unwrap();
        assert_eq!(left.entity.rank(Female, "hair"), Some(1));
        assert!(left.senses.as_ref().unwrap().is_ok());
        // Identical groups, but two female cells are empty on both sides.
        assert_eq!(r.female_sense_odds.len(), 2);
    }

    fn arb_rows() -> impl Strategy<Value = Vec<(u8, bool, Vec<u8>)>> {
        prop::collection::vec((0u8..6, any::<bool>(), prop::collection::vec(0u8..8, 0..6)), 1..20)
    }

    fn build(rows: &[(u8, bool, Vec<u8>)], copies: usize) -> CorpusSnapshot {
        let mut entries = Vec::new();
        for copy in 0..copies {
            for (i, (e, f, ds)) in rows.iter().enumerate() {
                let g = if *f { Female } else { Male };
                let id = format!("{}{e}-{copy}", if *f { "F" } else { "M" });
                let (c, mut d) = comment(&format!("c{copy}-{i}"), Group::None, "[NAME]", &[(id.as_str(), g)]);
                d[0].descriptors = ds.iter().map(|w| format!("w{w}")).collect();
                entries.push((c, d));
            }
        }
        CorpusSnapshot::from_comments(entries).unwrap()
    }

    proptest! {
        #[test]
        fn counts_are_consistent(rows in arb_rows()) {
            if let Ok(c) = collect_counts(&build(&rows, 1)) {
                prop_assert!(c.is_consistent());
                for (w, e) in &c.entities {
                    prop_assert_eq!(e[0] + e[1], c.e(w));
                }
            }
        }

        #[test]
        fn entity_pmi_invariant_under_duplicating_entities(rows in arb_rows()) {
            if let (Ok(a), Ok(b)) = (collect_counts(&build(&rows, 1)), collect_counts(&build(&rows, 3))) {
                let (la, lb) = (pmi_entity(&a, ANY), pmi_entity(&b, ANY));
                for g in Gender::BINARY {
                    prop_assert_eq!(la.list(g).len(), lb.list(g).len());
                    for (x, y) in la.list(g).iter().zip(lb.list(g)) {
                        prop_assert_eq!(&x.word, &y.word);
                        prop_assert!((x.score - y.score).abs() < 1e-12);
                    }
                }
            }
        }

        #[test]
        fn ranking_is_sorted_and_finite(rows in arb_rows()) {
            if let Ok(c) = collect_counts(&build(&rows, 1)) {
                for l in [pmi_entity(&c, ANY), pmi_traditional(&c, ANY)] {
                    for g in Gender::BINARY {
                        let list = l.list(g);
                        prop_assert!(list.iter().all(|s| s.score.is_finite()));
                        prop_assert!(list.windows(2).all(|w| w[0].score > w[1].score || (w[0].score == w[1].score && w[0].word < w[1].word)));
                    }
                }
            }
        }

        #[test]
        fn merge_matches_whole(rows in arb_rows(), split in 0usize..20) {
            let split = split.min(rows.len());
            let (a, b) = rows.split_at(split);
            let b: Vec<_> = b.iter().map(|(e, f, d)| (e + 100, *f, d.clone())).collect();
            let whole: Vec<_> = a.iter().cloned().chain(b.iter().cloned()).collect();
            if let (Ok(ca), Ok(cb), Ok(cw)) = (collect_counts(&build(a, 1)), collect_counts(&build(&b, 1)), collect_counts(&build(&whole, 1))) {
                let mut merged = ca.clone();
                merged.merge(&cb);
                prop_assert_eq!(merged, cw);
            }
        }
    }
}
