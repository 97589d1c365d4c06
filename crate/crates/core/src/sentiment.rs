//! Affect scoring with a valence/arousal/dominance lexicon, plus tests on
//! externally supplied positive/negative labels.

use crate::corpus::{partition, tokenize, CorpusSnapshot, PartitionKey};
use crate::coverage::{compare_genders, cross_partisan, CoverageError, CrossPartisan, GenderComparison};
use crate::nominal::{chi_square_nonempty, ChiSquareSummary};
use crate::stats::{odds_ratio, ContingencyTable, TestResult};
use crate::types::{ExternalSentiment, Gender, Group, Outcome};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("no scored comments for the {0} gender")]
    GenderAbsent(Gender),
    #[error("no external sentiment labels for the {0} gender")]
    LabelsAbsent(Gender),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vad {
    pub valence: f64,
    pub arousal: f64,
    pub dominance: f64,
}

#[derive(Debug, Clone, Default)]
pub struct VadLexicon {
    entries: HashMap<String, Vad>,
}

impl VadLexicon {
    /// Fails if any score lies outside [0, 1].
    pub fn from_entries(entries: impl IntoIterator<Item = (String, Vad)>) -> Result<Self, SentimentError> {
        let mut lex = VadLexicon::default();
        for (i, (word, vad)) in entries.into_iter().enumerate() {
            check_range(&vad).map_err(|message| SentimentError::Malformed { line: i + 1, message })?;
            lex.entries.insert(word.to_lowercase(), vad);
        }
        Ok(lex)
    }

    /// Parses `word<TAB>valence<TAB>arousal<TAB>dominance` lines. A first
    /// line whose scores are not numeric is taken as a header.
    pub fn parse(text: &str) -> Result<Self, SentimentError> {
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = |message: String| SentimentError::Malformed { line: line_no, message };
            if fields.len() != 4 {
                return Err(bad(format!("expected 4 tab-separated fields, got {}", fields.len())));
            }
            let scores: Result<Vec<f64>, _> = fields[1..].iter().map(|f| f.trim().parse::<f64>()).collect();
            let scores = match scores {
                Ok(s) => s,
                Err(_) if line_no == 1 => continue,
                Err(e) => return Err(bad(e.to_string())),
            };
            let vad = Vad { valence: scores[0], arousal: scores[1], dominance: scores[2] };
            check_range(&vad).map_err(bad)?;
            entries.insert(fields[0].trim().to_lowercase(), vad);
        }
        if entries.is_empty() {
            log::warn!("VAD lexicon is empty");
        }
        Ok(VadLexicon { entries })
    }

    pub fn get(&self, word: &str) -> Option<&Vad> {
        self.entries.get(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn check_range(v: &Vad) -> Result<(), String> {
    for (name, x) in [("valence", v.valence), ("arousal", v.arousal), ("dominance", v.dominance)] {
        if !(0.0..=1.0).contains(&x) {
            return Err(format!("{name} {x} outside [0, 1]"));
        }
    }
    Ok(())
}

pub fn load_vad(path: impl AsRef<Path>) -> Result<VadLexicon, SentimentError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| SentimentError::Io { path: path.display().to_string(), source })?;
    VadLexicon::parse(&text)
}

/// Lexicon averages over the tokens of one body that the lexicon covers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommentAffect {
    /// `None` when no token is in the lexicon.
    pub valence_avg: Option<f64>,
    pub arousal_avg: Option<f64>,
    pub dominance_avg: Option<f64>,
    pub in_corpus_count: usize,
    pub total_tokens: usize,
}

impl CommentAffect {
    pub fn is_defined(&self) -> bool {
        self.in_corpus_count > 0
    }
}

/// Lowercased, unlemmatized tokens looked up directly in the lexicon.
pub fn score_comment(body: &str, lex: &VadLexicon) -> CommentAffect {
    let tokens = tokenize(body);
    let (mut v, mut a, mut d, mut n) = (0.0, 0.0, 0.0, 0usize);
    for t in &tokens.tokens {
        if let Some(s) = lex.get(t) {
            v += s.valence;
            a += s.arousal;
            d += s.dominance;
            n += 1;
        }
    }
    let avg = |x: f64| (n > 0).then(|| x / n as f64);
    CommentAffect {
        valence_avg: avg(v),
        arousal_avg: avg(a),
        dominance_avg: avg(d),
        in_corpus_count: n,
        total_tokens: tokens.count,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Valence,
    Dominance,
}

impl Dimension {
    pub const ALL: [Dimension; 2] = [Dimension::Valence, Dimension::Dominance];

    pub fn of(self, a: &CommentAffect) -> Option<f64> {
        match self {
            Dimension::Valence => a.valence_avg,
            Dimension::Dominance => a.dominance_avg,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Valence => "valence",
            Dimension::Dominance => "dominance",
        }
    }
}

/// One scored (comment, gender) observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffectObservation {
    pub group: Group,
    pub gender: Gender,
    pub affect: CommentAffect,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AffectCoverage {
    pub comments_considered: usize,
    pub scored: usize,
    /// Comments with no lexicon token; excluded, never scored as 0.
    pub excluded_undefined: usize,
}

/// Scores the comments in scope. By default only single-entity comments
/// count; with `include_multi` a comment contributes once per distinct
/// binary gender it mentions.
pub fn score_corpus(
    corpus: &CorpusSnapshot,
    lex: &VadLexicon,
    include_multi: bool,
) -> (Vec<AffectObservation>, AffectCoverage) {
    let mut out = Vec::new();
    let mut cov = AffectCoverage::default();
    for (c, dps) in corpus.iter() {
        let single = dps.iter().all(|d| d.entity_id == dps[0].entity_id);
        if !single && !include_multi {
            continue;
        }
        let mut genders: Vec<Gender> = dps.iter().map(|d| d.gender).filter(|g| g.is_binary()).collect();
        genders.sort();
        genders.dedup();
        if genders.is_empty() {
            continue;
        }
        cov.comments_considered += 1;
        let affect = score_comment(&c.body, lex);
        if !affect.is_defined() {
            cov.excluded_undefined += 1;
            continue;
        }
        cov.scored += 1;
        out.extend(genders.into_iter().map(|gender| AffectObservation { group: c.group, gender, affect }));
    }
    (out, cov)
}

/// Sarle's bimodality coefficient from sample skewness and excess
/// kurtosis. Values above 5/9 suggest more than one mode.
pub fn bimodality_coefficient(xs: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 4 {
        return None;
    }
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let m = |k: i32| xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / nf;
    let (m2, m3, m4) = (m(2), m(3), m(4));
    if m2 == 0.0 {
        return None;
    }
    let g1 = m3 / m2.powf(1.5) * (nf * (nf - 1.0)).sqrt() / (nf - 2.0);
    let g2 = ((nf + 1.0) * (m4 / (m2 * m2) - 3.0) + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0));
    Some((g1 * g1 + 1.0) / (g2 + 3.0 * (nf - 1.0).powi(2) / ((nf - 2.0) * (nf - 3.0))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionBias {
    pub comparison: GenderComparison,
    pub bimodality: BTreeMap<Gender, Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffectBias {
    pub coverage: AffectCoverage,
    pub dimensions: BTreeMap<Dimension, DimensionBias>,
}

fn values_by_gender(obs: &[AffectObservation], dim: Dimension) -> BTreeMap<Gender, Vec<f64>> {
    let mut out: BTreeMap<Gender, Vec<f64>> = BTreeMap::new();
    for o in obs {
        if let Some(v) = dim.of(&o.affect) {
            out.entry(o.gender).or_default().push(v);
        }
    }
    out
}

/// Pooled t-test and Cohen's d of male against female affect, per
/// dimension.
pub fn affect_bias(corpus: &CorpusSnapshot, lex: &VadLexicon, include_multi: bool) -> Result<AffectBias, SentimentError> {
    let (obs, coverage) = score_corpus(corpus, lex, include_multi);
    let mut dimensions = BTreeMap::new();
    for dim in Dimension::ALL {
        let values = values_by_gender(&obs, dim);
        for g in Gender::BINARY {
            if values.get(&g).is_none_or(Vec::is_empty) {
                return Err(SentimentError::GenderAbsent(g));
            }
        }
        let bimodality = Gender::BINARY.iter().map(|g| (*g, bimodality_coefficient(&values[g]))).collect();
        dimensions.insert(dim, DimensionBias { comparison: compare_genders(&values)?, bimodality });
    }
    Ok(AffectBias { coverage, dimensions })
}

/// Two-way ANOVA, Tukey HSD and within-group d for each dimension.
pub fn cross_partisan_affect(
    corpus: &CorpusSnapshot,
    lex: &VadLexicon,
    include_multi: bool,
) -> BTreeMap<Dimension, Outcome<CrossPartisan>> {
    let (obs, _) = score_corpus(corpus, lex, include_multi);
    Dimension::ALL
        .iter()
        .map(|&dim| {
            let rows = obs.iter().filter_map(|o| dim.of(&o.affect).map(|v| (o.group, o.gender, v)));
            (dim, cross_partisan(rows).into())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramRow {
    pub dimension: Dimension,
    pub gender: Gender,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Histograms of affect averages on [0, 1] per dimension and gender.
pub fn affect_histograms(obs: &[AffectObservation], bins: usize) -> Vec<HistogramRow> {
    let bins = bins.max(1);
    let mut rows = Vec::new();
    for dim in Dimension::ALL {
        let values = values_by_gender(obs, dim);
        for g in Gender::BINARY {
            let mut counts = vec![0usize; bins];
            for v in values.get(&g).into_iter().flatten() {
                counts[((v * bins as f64) as usize).min(bins - 1)] += 1;
            }
            for (b, count) in counts.into_iter().enumerate() {
                rows.push(HistogramRow {
                    dimension: dim,
                    gender: g,
                    lo: b as f64 / bins as f64,
                    hi: (b + 1) as f64 / bins as f64,
                    count,
                });
            }
        }
    }
    rows
}

/// Gender x label counts, `[positive, negative]` per gender.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LabelCounts {
    pub female: [u64; 2],
    pub male: [u64; 2],
}

impl LabelCounts {
    pub fn of(corpus: &CorpusSnapshot) -> Self {
        let mut c = LabelCounts::default();
        for dp in corpus.datapoints() {
            let row = match dp.gender {
                Gender::Female => &mut c.female,
                Gender::Male => &mut c.male,
                Gender::Other => continue,
            };
            match dp.external_sentiment {
                Some(ExternalSentiment::Positive) => row[0] += 1,
                Some(ExternalSentiment::Negative) => row[1] += 1,
                None => {}
            }
        }
        c
    }

    fn row(&self, g: Gender) -> [u64; 2] {
        if g == Gender::Female {
            self.female
        } else {
            self.male
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelTest {
    pub counts: LabelCounts,
    pub chi_square: Outcome<ChiSquareSummary>,
    /// Odds of a positive label for men relative to women.
    pub male_positive_odds: Outcome<TestResult>,
}

fn label_test(counts: LabelCounts) -> Result<LabelTest, SentimentError> {
    for g in Gender::BINARY {
        if counts.row(g).iter().sum::<u64>() == 0 {
            return Err(SentimentError::LabelsAbsent(g));
        }
    }
    let table = ContingencyTable {
        row_labels: vec!["female".into(), "male".into()],
        col_labels: vec!["positive".into(), "negative".into()],
        counts: vec![counts.female.to_vec(), counts.male.to_vec()],
    };
    Ok(LabelTest {
        counts,
        chi_square: chi_square_nonempty(&table).into(),
        male_positive_odds: odds_ratio(counts.male[0], counts.male[1], counts.female[0], counts.female[1]).into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExternalLabelBias {
    pub overall: LabelTest,
    pub by_group: BTreeMap<String, Outcome<LabelTest>>,
    /// For each gender, partisan group x label.
    pub partisanship: BTreeMap<Gender, Outcome<ChiSquareSummary>>,
}

/// Gender x label analysis of the optional per-mention sentiment labels.
pub fn external_label_bias(corpus: &CorpusSnapshot) -> Result<ExternalLabelBias, SentimentError> {
    let overall = label_test(LabelCounts::of(corpus))?;
    let parts = partition(corpus, PartitionKey::Group);
    let per_group: BTreeMap<Group, LabelCounts> = Group::PARTISAN
        .iter()
        .filter_map(|g| parts.get(g.as_str()).map(|p| (*g, LabelCounts::of(p))))
        .collect();
    let by_group = per_group.iter().map(|(g, c)| (g.to_string(), label_test(*c).into())).collect();
    let partisanship = Gender::BINARY
        .iter()
        .map(|&gender| {
            let table = ContingencyTable {
                row_labels: per_group.keys().map(|g| g.to_string()).collect(),
                col_labels: vec!["positive".into(), "negative".into()],
                counts: per_group.values().map(|c| c.row(gender).to_vec()).collect(),
            };
            (gender, chi_square_nonempty(&table).into())
        })
        .collect();
    Ok(ExternalLabelBias { overall, by_group, partisanship })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentimentReport {
    pub include_multi_entity: bool,
    pub affect: Outcome<AffectBias>,
    pub cross_partisan: BTreeMap<Dimension, Outcome<CrossPartisan>>,
    pub external_labels: Outcome<ExternalLabelBias>,
    #[serde(skip)]
    pub histograms: Vec<HistogramRow>,
}

pub fn sentiment_report(corpus: &CorpusSnapshot, lex: &VadLexicon, include_multi: bool) -> SentimentReport {
    let (obs, _) = score_corpus(corpus, lex, include_multi);
    SentimentReport {
        include_multi_entity: include_multi,
        affect: affect_bias(corpus, lex, include_multi).into(),
        cross_partisan: cross_partisan_affect(corpus, lex, include_multi),
        external_labels: external_label_bias(corpus).into(),
        histograms: affect_histograms(&obs, 20),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::comment;
    use crate::stats::ALPHA;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use Gender::*;

    fn lex() -> VadLexicon {
        VadLexicon::parse("word\tvalence\tarousal\tdominance\nkill\t0.052\t0.9\t0.736\nloved\t1.0\t0.5\t0.673\n").unwrap()
    }

    #[test]
    fn parse_entries() {
        let l = lex();
        assert_eq!(l.len(), 2);
        assert_eq!(l.get("kill").unwrap().valence, 0.052);
        assert_eq!(l.get("loved").unwrap().dominance, 0.673);
        assert!(VadLexicon::parse("").unwrap().is_empty());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(VadLexicon::parse("a\t0.5\t0.5\n"), Err(SentimentError::Malformed { line: 1, .. })));
        assert!(matches!(VadLexicon::parse("a\t0.5\t0.5\t0.5\nb\tx\t0\t0\n"), Err(SentimentError::Malformed { line: 2, .. })));
        assert!(matches!(VadLexicon::parse("a\t1.5\t0.5\t0.5\n"), Err(SentimentError::Malformed { .. })));
    }

    #[test]
    fn kill_loved() {
        let a = score_comment("Kill, loved!", &lex());
        assert!((a.valence_avg.unwrap() - 0.526).abs() < 1e-12);
        assert!((a.dominance_avg.unwrap() - 0.7045).abs() < 1e-12);
        assert_eq!(a.in_corpus_count, 2);
        assert_eq!(a.total_tokens, 2);
    }

    #[test]
    fn no_lexicon_words() {
        let a = score_comment("[NAME] said nothing", &lex());
        assert!(!a.is_defined());
        assert_eq!(a.valence_avg, None);
    }

    #[test]
    fn undefined_comments_are_counted_not_scored() {
        let s = CorpusSnapshot::from_comments(vec![
            comment("a", Group::Left, "[NAME] loved", &[("M", Male)]),
            comment("b", Group::Left, "[NAME] hmm", &[("F", Female)]),
            comment("c", Group::Left, "[NAME] [NAME] kill", &[("M", Male), ("F", Female)]),
        ])
        .unwrap();
        let (obs, cov) = score_corpus(&s, &lex(), false);
        assert_eq!(cov, AffectCoverage { comments_considered: 2, scored: 1, excluded_undefined: 1 });
        assert_eq!(obs.len(), 1);
        let (obs, cov) = score_corpus(&s, &lex(), true);
        assert_eq!(cov.scored, 2);
        assert_eq!(obs.len(), 3);
        assert!(matches!(affect_bias(&s, &lex(), false), Err(SentimentError::GenderAbsent(Female))));
    }

    fn synthetic(seed: u64, shift: f64) -> (CorpusSnapshot, VadLexicon) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let words: Vec<(String, Vad)> = (0..50)
            .map(|i| {
                let v = i as f64 / 49.0;
                (format!("w{i}"), Vad { valence: v, arousal: 0.5, dominance: 1.0 - v })
            })
            .collect();
        let lex = VadLexicon::from_entries(words).unwrap();
        let mut entries = Vec::new();
        for group in Group::PARTISAN {
            for (gender, id) in [(Male, "M"), (Female, "F")] {
                for i in 0..300 {
                    let centre: f64 = rng.random_range(0.2..0.7) + if gender == Male { shift } else { 0.0 };
                    let w = ((centre * 49.0).round() as usize).min(49);
                    entries.push(comment(&format!("{group}{gender}{i}"), group, &format!("[NAME] w{w}"), &[(id, gender)]));
                }
            }
        }
        (CorpusSnapshot::from_comments(entries).unwrap(), lex)
    }

    #[test]
    fn planted_valence_shift_is_recovered() {
        let (s, l) = synthetic(3, 0.1);
        let bias = affect_bias(&s, &l, false).unwrap();
        let val = &bias.dimensions[&Dimension::Valence].comparison;
        // Expected d: 0.1 over the sd of a uniform on a width-0.5 interval.
        let expected = 0.1 / (0.5 / 12f64.sqrt());
        let d = val.test.effect_size.unwrap();
        assert!((d - expected).abs() / expected < 0.1, "d = {d}, expected {expected}");
        assert!(val.test.statistic > 0.0);
        let dom = &bias.dimensions[&Dimension::Dominance].comparison;
        assert!(dom.test.statistic < 0.0);
    }

    #[test]
    fn identical_texts_give_zero_t() {
        let s = CorpusSnapshot::from_comments(vec![
            comment("a", Group::Left, "[NAME] loved kill", &[("M", Male)]),
            comment("b", Group::Left, "[NAME] loved", &[("M", Male)]),
            comment("c", Group::Left, "[NAME] loved kill", &[("F", Female)]),
            comment("d", Group::Left, "[NAME] loved", &[("F", Female)]),
        ])
        .unwrap();
        let b = affect_bias(&s, &lex(), false).unwrap();
        assert_eq!(b.dimensions[&Dimension::Valence].comparison.test.statistic, 0.0);
    }

    #[test]
    fn cross_partisan_null_calibration() {
        let mut hits = 0;
        let mut tests = 0;
        for seed in 0..10 {
            let (s, l) = synthetic(100 + seed, 0.0);
            for (_, r) in cross_partisan_affect(&s, &l, false) {
                let r = r.ok().unwrap().clone();
                tests += r.anova.terms.len();
                hits += r.anova.terms.iter().filter(|t| t.p_value < ALPHA).count();
            }
        }
        assert!(hits <= 3, "{hits} of {tests} null terms significant");
    }

    #[test]
    fn single_group_is_missing_cells() {
        let s = CorpusSnapshot::from_comments(vec![
            comment("a", Group::Left, "[NAME] loved", &[("M", Male)]),
            comment("b", Group::Left, "[NAME] kill", &[("F", Female)]),
        ])
        .unwrap();
        let r = cross_partisan_affect(&s, &lex(), false);
        assert!(r.values().all(|o| !o.is_ok()));
    }

    #[test]
    fn bimodality() {
        let two: Vec<f64> = (0..200).map(|i| if i % 2 == 0 { 0.1 } else { 0.9 }).collect();
        let flat: Vec<f64> = (0..200).map(|i| i as f64 / 199.0).collect();
        assert!(bimodality_coefficient(&two).unwrap() > 5.0 / 9.0);
        assert!(bimodality_coefficient(&flat).unwrap() < 5.0 / 9.0);
        assert_eq!(bimodality_coefficient(&[1.0, 1.0, 1.0, 1.0]), None);
    }

    fn labelled(counts: [[u64; 2]; 2]) -> CorpusSnapshot {
        let mut entries = Vec::new();
        for (gi, (gender, id)) in [(Female, "F"), (Male, "M")].into_iter().enumerate() {
            for (li, label) in [ExternalSentiment::Positive, ExternalSentiment::Negative].into_iter().enumerate() {
                for i in 0..counts[gi][li] {
                    let group = Group::PARTISAN[i as usize % 3];
                    let (c, mut d) = comment(&format!("{id}{li}-{i}"), group, "[NAME]", &[(id, gender)]);
                    d[0].external_sentiment = Some(label);
                    entries.push((c, d));
                }
            }
        }
        CorpusSnapshot::from_comments(entries).unwrap()
    }

    #[test]
    fn external_labels_formula() {
        let r = external_label_bias(&labelled([[30, 60], [70, 40]])).unwrap();
        let or = r.overall.male_positive_odds.ok().unwrap();
        assert!((or.statistic - (70.0 / 40.0) / (30.0 / 60.0)).abs() < 1e-12);
        assert_eq!(r.by_group.len(), 3);
        let indep = external_label_bias(&labelled([[20, 40], [40, 80]])).unwrap();
        assert!((indep.overall.male_positive_odds.ok().unwrap().statistic - 1.0).abs() < 1e-12);
        let none = labelled([[0, 0], [3, 4]]);
        assert!(matches!(external_label_bias(&none), Err(SentimentError::LabelsAbsent(Female))));
    }

    proptest! {
        #[test]
        fn averages_within_score_range(words in prop::collection::vec(0usize..5, 1..30)) {
            let vocab = ["kill", "loved", "meh", "kill,", "LOVED"];
            let body: Vec<&str> = words.iter().map(|&i| vocab[i]).collect();
            let a = score_comment(&body.join(" "), &lex());
            if let Some(v) = a.valence_avg {
                prop_assert!((0.052 - 1e-12..=1.0 + 1e-12).contains(&v));
                let d = a.dominance_avg.unwrap();
                prop_assert!((0.673 - 1e-12..=0.736 + 1e-12).contains(&d));
            }
        }

        #[test]
        fn order_and_duplication_invariant(words in prop::collection::vec(0usize..3, 1..20)) {
            let vocab = ["kill", "loved", "meh"];
            let body: Vec<&str> = words.iter().map(|&i| vocab[i]).collect();
            let mut rev = body.clone();
            rev.reverse();
            let a = score_comment(&body.join(" "), &lex());
            let b = score_comment(&rev.join(" "), &lex());
            let c = score_comment(&format!("{0} {0}", body.join(" ")), &lex());
            for x in [b, c] {
                match (a.valence_avg, x.valence_avg) {
                    (Some(p), Some(q)) => prop_assert!((p - q).abs() < 1e-12),
                    (None, None) => {}
                    _ => prop_assert!(false),
                }
            }
        }
    }
}
