//! Coverage: who gets mentioned, how often, and how much is written.

use crate::corpus::{partition, tokenize, CorpusSnapshot, PartitionKey};
use crate::registry::Registry;
use crate::stats::{
    anova_two_way, cohens_d_summary, ks_two_sample, t_test_pooled, tukey_hsd_with_error, AnovaTable,
    SampleSummary, StatsError, TestResult, TukeyPair,
};
use crate::types::{Gender, GenderCounts, Group, Outcome};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverageError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no {0} entities in scope")]
    GenderAbsent(Gender),
    #[error("no {gender} observations in group {group}")]
    EmptyCell { gender: Gender, group: Group },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Shares in percent keyed by gender.
pub type GenderShares = BTreeMap<Gender, f64>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MentionProportions {
    pub datapoints: GenderCounts,
    /// Data-point share over female and male only; sums to 100.
    pub datapoint_pct: GenderShares,
    pub entities_mentioned: GenderCounts,
    pub registry_entities: GenderCounts,
    /// Percent of registry entities of each gender mentioned at least once.
    pub entity_pct_mentioned: GenderShares,
}

fn pct(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

pub fn mention_proportions(corpus: &CorpusSnapshot, registry: &Registry) -> Result<MentionProportions, CoverageError> {
    if corpus.is_empty() {
        return Err(CoverageError::EmptyCorpus);
    }
    let datapoints = corpus.counts().datapoints_by_gender;
    let binary = datapoints.female + datapoints.male;
    let datapoint_pct = Gender::BINARY.iter().map(|&g| (g, pct(datapoints.get(g), binary))).collect();

    let mut seen = HashSet::new();
    let mut entities_mentioned = GenderCounts::default();
    for dp in corpus.datapoints() {
        if seen.insert(dp.entity_id.as_str()) {
            entities_mentioned.add(dp.gender, 1);
        }
    }
    let registry_entities = registry.gender_totals();
    let entity_pct_mentioned = [Gender::Female, Gender::Male, Gender::Other]
        .iter()
        .filter(|&&g| registry_entities.get(g) > 0)
        .map(|&g| (g, pct(entities_mentioned.get(g), registry_entities.get(g))))
        .collect();
    Ok(MentionProportions { datapoints, datapoint_pct, entities_mentioned, registry_entities, entity_pct_mentioned })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMode {
    /// One count per data point.
    #[default]
    Mentions,
    /// One count per distinct comment.
    Comments,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InDegree {
    pub entity_id: String,
    pub gender: Gender,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InDegreeTable {
    pub mode: DegreeMode,
    /// Sorted by entity id.
    pub entries: Vec<InDegree>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CcdfPoint {
    pub k: usize,
    pub ccdf: f64,
}

impl InDegreeTable {
    pub fn degrees(&self, gender: Gender) -> Vec<usize> {
        self.entries.iter().filter(|e| e.gender == gender).map(|e| e.degree).collect()
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.degree).sum()
    }

    /// Fraction of this gender's mentioned entities with in-degree >= k.
    pub fn ccdf_at(&self, gender: Gender, k: usize) -> f64 {
        let d = self.degrees(gender);
        if d.is_empty() {
            return 0.0;
        }
        d.iter().filter(|&&x| x >= k).count() as f64 / d.len() as f64
    }

    /// CCDF evaluated at every observed degree, then once past the maximum.
    pub fn ccdf(&self, gender: Gender) -> Vec<CcdfPoint> {
        let mut d = self.degrees(gender);
        if d.is_empty() {
            return Vec::new();
        }
        d.sort_unstable();
        let n = d.len() as f64;
        let mut points = Vec::new();
        let mut i = 0;
        while i < d.len() {
            points.push(CcdfPoint { k: d[i], ccdf: (d.len() - i) as f64 / n });
            let k = d[i];
            while i < d.len() && d[i] == k {
                i += 1;
            }
        }
        points.push(CcdfPoint { k: d[d.len() - 1] + 1, ccdf: 0.0 });
        points
    }
}

pub fn in_degree_distribution(corpus: &CorpusSnapshot, mode: DegreeMode) -> InDegreeTable {
    let mut degrees: BTreeMap<&str, (Gender, usize)> = BTreeMap::new();
    for (_, dps) in corpus.iter() {
        let mut in_comment = HashSet::new();
        for dp in dps {
            if mode == DegreeMode::Comments && !in_comment.insert(dp.entity_id.as_str()) {
                continue;
            }
            degrees.entry(dp.entity_id.as_str()).or_insert((dp.gender, 0)).1 += 1;
        }
    }
    let entries = degrees
        .into_iter()
        .map(|(id, (gender, degree))| InDegree { entity_id: id.to_string(), gender, degree })
        .collect();
    InDegreeTable { mode, entries }
}

/// KS test of female against male in-degrees.
pub fn compare_in_degrees(table: &InDegreeTable) -> Result<TestResult, CoverageError> {
    let sample = |g| -> Result<Vec<f64>, CoverageError> {
        let d: Vec<f64> = table.degrees(g).into_iter().map(|x| x as f64).collect();
        if d.is_empty() {
            return Err(CoverageError::GenderAbsent(g));
        }
        Ok(d)
    };
    Ok(ks_two_sample(&sample(Gender::Female)?, &sample(Gender::Male)?)?)
}

/// Token counts of single-entity comments, split by the entity's gender.
pub fn single_entity_lengths(corpus: &CorpusSnapshot) -> BTreeMap<Gender, Vec<f64>> {
    let mut out: BTreeMap<Gender, Vec<f64>> = BTreeMap::new();
    for (c, dp) in corpus.single_entity() {
        if dp.gender.is_binary() {
            out.entry(dp.gender).or_default().push(tokenize(&c.body).count as f64);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenderComparison {
    pub male: SampleSummary,
    pub female: SampleSummary,
    /// Pooled t-test of male minus female values; effect size is Cohen's d.
    pub test: TestResult,
}

pub fn compare_lengths(corpus: &CorpusSnapshot) -> Result<GenderComparison, CoverageError> {
    compare_genders(&single_entity_lengths(corpus))
}

/// Pooled t-test and Cohen's d of male against female values.
pub fn compare_genders(values: &BTreeMap<Gender, Vec<f64>>) -> Result<GenderComparison, CoverageError> {
    let get = |g| values.get(&g).filter(|v| !v.is_empty()).ok_or(CoverageError::GenderAbsent(g));
    let (m, f) = (get(Gender::Male)?, get(Gender::Female)?);
    let test = t_test_pooled(m, f)?;
    Ok(GenderComparison { male: SampleSummary::of(m), female: SampleSummary::of(f), test })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupEffect {
    pub group: Group,
    pub male: SampleSummary,
    pub female: SampleSummary,
    /// Cohen's d of male against female values within the group.
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossPartisan {
    /// Terms in order gender, group, gender:group.
    pub anova: AnovaTable,
    /// All pairs of the six gender x group cells.
    pub cells: Vec<TukeyPair>,
    pub gender_marginal: Vec<TukeyPair>,
    pub group_marginal: Vec<TukeyPair>,
    pub within_group: Vec<GroupEffect>,
}

fn cell_name(g: Gender, group: Group) -> String {
    format!("{group}:{g}")
}

/// Two-way ANOVA of single-entity comment length on gender and partisan
/// group. See [`cross_partisan`].
pub fn cross_partisan_lengths(corpus: &CorpusSnapshot) -> Result<CrossPartisan, CoverageError> {
    cross_partisan(
        corpus
            .single_entity()
            .map(|(c, dp)| (c.group, dp.gender, tokenize(&c.body).count as f64)),
    )
}

/// Two-way ANOVA of a per-observation value on gender and partisan group,
/// followed by Tukey HSD on the six cells and on both marginals using the
/// model's residual mean square. Observations outside the binary genders or
/// the partisan groups are ignored.
pub fn cross_partisan(
    observations: impl IntoIterator<Item = (Group, Gender, f64)>,
) -> Result<CrossPartisan, CoverageError> {
    let (mut values, mut genders, mut groups) = (Vec::new(), Vec::new(), Vec::new());
    let mut cells: BTreeMap<(Group, Gender), Vec<f64>> = BTreeMap::new();
    for (group, gender, value) in observations {
        if !gender.is_binary() || !Group::PARTISAN.contains(&group) {
            continue;
        }
        values.push(value);
        genders.push(gender);
        groups.push(group);
        cells.entry((group, gender)).or_default().push(value);
    }
    for group in Group::PARTISAN {
        for gender in Gender::BINARY {
            if cells.get(&(group, gender)).is_none_or(|v| v.is_empty()) {
                return Err(CoverageError::EmptyCell { gender, group });
            }
        }
    }
    let anova = anova_two_way(&values, &genders, &groups)?.with_names("gender", "group");
    let (mse, df) = (anova.residual_ms(), anova.residual_df);

    let cell_map: BTreeMap<String, Vec<f64>> =
        cells.iter().map(|(&(grp, g), v)| (cell_name(g, grp), v.clone())).collect();
    let mut by_gender: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut by_group: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for ((grp, g), v) in &cells {
        by_gender.entry(g.to_string()).or_default().extend(v);
        by_group.entry(grp.to_string()).or_default().extend(v);
    }
    let within_group = Group::PARTISAN
        .iter()
        .map(|&group| {
            let male = SampleSummary::of(&cells[&(group, Gender::Male)]);
            let female = SampleSummary::of(&cells[&(group, Gender::Female)]);
            let d = cohens_d_summary(male, female)?;
            Ok(GroupEffect { group, male, female, d })
        })
        .collect::<Result<Vec<_>, StatsError>>()?;
    Ok(CrossPartisan {
        cells: tukey_hsd_with_error(&cell_map, mse, df)?,
        gender_marginal: tukey_hsd_with_error(&by_gender, mse, df)?,
        group_marginal: tukey_hsd_with_error(&by_group, mse, df)?,
        anova,
        within_group,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageSummary {
    pub proportions: Outcome<MentionProportions>,
    pub in_degree_ks: Outcome<TestResult>,
    pub lengths: Outcome<GenderComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub degree_mode: DegreeMode,
    pub overall: CoverageSummary,
    pub by_group: BTreeMap<String, CoverageSummary>,
    pub cross_partisan: Outcome<CrossPartisan>,
    #[serde(skip)]
    pub in_degrees: InDegreeTable,
}

fn summary(corpus: &CorpusSnapshot, registry: &Registry, mode: DegreeMode) -> (CoverageSummary, InDegreeTable) {
    let table = in_degree_distribution(corpus, mode);
    let s = CoverageSummary {
        proportions: mention_proportions(corpus, registry).into(),
        in_degree_ks: compare_in_degrees(&table).into(),
        lengths: compare_lengths(corpus).into(),
    };
    (s, table)
}

/// All coverage analyses, overall and for each partisan group.
pub fn coverage_report(corpus: &CorpusSnapshot, registry: &Registry, mode: DegreeMode) -> CoverageReport {
    let (overall, in_degrees) = summary(corpus, registry, mode);
    let by_group = partition(corpus, PartitionKey::Group)
        .into_iter()
        .map(|(k, part)| (k, summary(&part, registry, mode).0))
        .collect();
    CoverageReport {
        degree_mode: mode,
        overall,
        by_group,
        cross_partisan: cross_partisan_lengths(corpus).into(),
        in_degrees,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::comment;
    use crate::registry::EntityRecord;
    use crate::stats::{sample_sd, ALPHA};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use Gender::*;

    fn snap(entries: Vec<(crate::corpus::Comment, Vec<crate::corpus::DataPoint>)>) -> CorpusSnapshot {
        CorpusSnapshot::from_comments(entries).unwrap()
    }

    #[test]
    fn proportions_fixture() {
        let mut records: Vec<EntityRecord> = (1..=4).map(|i| EntityRecord::new(format!("M{i}"), "A B", Male)).collect();
        records.push(EntityRecord::new("F1", "C D", Female));
        let registry = Registry::from_records(records).unwrap();
        let s = snap(vec![
            comment("a", Group::Left, "[NAME] [NAME]", &[("M1", Male), ("F1", Female)]),
            comment("b", Group::Left, "[NAME]", &[("M2", Male)]),
            comment("c", Group::Left, "[NAME]", &[("M1", Male)]),
        ]);
        let p = mention_proportions(&s, &registry).unwrap();
        assert_eq!(p.entity_pct_mentioned[&Male], 50.0);
        assert_eq!(p.entity_pct_mentioned[&Female], 100.0);
        assert_eq!(p.datapoint_pct[&Female], 25.0);
        assert_eq!(p.datapoint_pct[&Female] + p.datapoint_pct[&Male], 100.0);
        assert_eq!(mention_proportions(&CorpusSnapshot::default(), &registry), Err(CoverageError::EmptyCorpus));
    }

    #[test]
    fn everyone_mentioned_once() {
        let registry = Registry::from_records(vec![EntityRecord::new("M", "A B", Male), EntityRecord::new("F", "C D", Female)]).unwrap();
        let s = snap(vec![comment("a", Group::None, "[NAME] [NAME]", &[("M", Male), ("F", Female)])]);
        let p = mention_proportions(&s, &registry).unwrap();
        assert!(p.entity_pct_mentioned.values().all(|&v| v == 100.0));
    }

    #[test]
    fn ccdf_single_entity() {
        let s = snap((0..5).map(|i| comment(&format!("c{i}"), Group::None, "[NAME]", &[("T", Male)])).collect());
        let t = in_degree_distribution(&s, DegreeMode::Mentions);
        assert_eq!(t.ccdf_at(Male, 5), 1.0);
        assert_eq!(t.ccdf_at(Male, 6), 0.0);
    }

    #[test]
    fn ccdf_hand_count() {
        // Degrees 1, 2, 4.
        let mut entries = vec![comment("a", Group::None, "", &[("A", Male), ("B", Male), ("C", Male)])];
        entries.push(comment("b", Group::None, "", &[("B", Male), ("C", Male)]));
        entries.push(comment("c", Group::None, "", &[("C", Male), ("C", Male)]));
        let t = in_degree_distribution(&snap(entries), DegreeMode::Mentions);
        let pts: Vec<(usize, f64)> = t.ccdf(Male).iter().map(|p| (p.k, p.ccdf)).collect();
        assert_eq!(pts, vec![(1, 1.0), (2, 2.0 / 3.0), (4, 1.0 / 3.0), (5, 0.0)]);
        assert_eq!(t.ccdf_at(Male, 3), 1.0 / 3.0);
        let unique = in_degree_distribution(
            &snap(vec![comment("c", Group::None, "", &[("C", Male), ("C", Male)])]),
            DegreeMode::Comments,
        );
        assert_eq!(unique.degrees(Male), vec![1]);
    }

    #[test]
    fn ks_on_degrees() {
        let s = snap(vec![
            comment("a", Group::None, "", &[("M", Male), ("F", Female)]),
            comment("b", Group::None, "", &[("M", Male), ("F", Female)]),
        ]);
        let t = in_degree_distribution(&s, DegreeMode::Mentions);
        assert_eq!(compare_in_degrees(&t).unwrap().statistic, 0.0);
        let only_m = snap(vec![comment("a", Group::None, "", &[("M", Male)])]);
        assert_eq!(
            compare_in_degrees(&in_degree_distribution(&only_m, DegreeMode::Mentions)),
            Err(CoverageError::GenderAbsent(Female))
        );
    }

    fn words(n: usize) -> String {
        std::iter::once("[NAME]").chain(std::iter::repeat_n("w", n - 1)).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn length_fixture_matches_formula() {
        let male = [3usize, 5, 7, 9];
        let female = [2usize, 4, 4];
        let mut entries = Vec::new();
        for (i, &n) in male.iter().enumerate() {
            entries.push(comment(&format!("m{i}"), Group::Left, &words(n), &[("M", Male)]));
        }
        for (i, &n) in female.iter().enumerate() {
            entries.push(comment(&format!("f{i}"), Group::Left, &words(n), &[("F", Female)]));
        }
        entries.push(comment("multi", Group::Left, &words(40), &[("M", Male), ("F", Female)]));
        let r = compare_lengths(&snap(entries)).unwrap();
        // Means 6 and 10/3; pooled variance (20 + 8/3) / 5.
        let sp = ((20.0 + 8.0 / 3.0) / 5.0f64).sqrt();
        let t = (6.0 - 10.0 / 3.0) / (sp * (1.0 / 4.0 + 1.0 / 3.0f64).sqrt());
        assert!((r.test.statistic - t).abs() < 1e-12);
        assert!((r.test.effect_size.unwrap() - (6.0 - 10.0 / 3.0) / sp).abs() < 1e-12);
        assert_eq!(r.male.n, 4);
    }

    #[test]
    fn identical_lengths() {
        let entries = (0..6)
            .map(|i| {
                let g = if i % 2 == 0 { ("M", Male) } else { ("F", Female) };
                comment(&format!("c{i}"), Group::Left, &words(3 + i / 2), &[g])
            })
            .collect();
        let r = compare_lengths(&snap(entries)).unwrap();
        assert_eq!(r.test.statistic, 0.0);
        assert_eq!(r.test.effect_size, Some(0.0));
    }

    fn partisan_corpus(seed: u64, per_cell: usize, offset: impl Fn(Group, Gender) -> usize) -> CorpusSnapshot {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut entries = Vec::new();
        for group in Group::PARTISAN {
            for (gender, id) in [(Male, "M"), (Female, "F")] {
                for i in 0..per_cell {
                    let n = rng.random_range(5..=25) + offset(group, gender);
                    entries.push(comment(&format!("{group}{gender}{i}"), group, &words(n), &[(id, gender)]));
                }
            }
        }
        snap(entries)
    }

    #[test]
    fn null_design_has_no_effects() {
        let mut significant = 0;
        for seed in 0..10 {
            let r = cross_partisan_lengths(&partisan_corpus(seed, 40, |_, _| 0)).unwrap();
            significant += r.anova.terms.iter().filter(|t| t.p_value < ALPHA).count();
            assert_eq!(r.cells.len(), 15);
            assert_eq!(r.within_group.len(), 3);
        }
        // 30 tests at alpha .01; more than 3 hits would be implausible.
        assert!(significant <= 3, "{significant} significant terms under the null");
    }

    #[test]
    fn planted_interaction() {
        let r = cross_partisan_lengths(&partisan_corpus(7, 80, |grp, g| {
            if grp == Group::Right && g == Male {
                5
            } else {
                0
            }
        }))
        .unwrap();
        let interaction = &r.anova.terms[2];
        assert_eq!(interaction.name, "gender:group");
        assert!(interaction.p_value < ALPHA, "interaction p = {}", interaction.p_value);
        let right = r.within_group.iter().find(|e| e.group == Group::Right).unwrap();
        assert!(right.d > 0.5);
        let key = ("right:female", "right:male");
        let pair = r.cells.iter().find(|p| (p.group_a.as_str(), p.group_b.as_str()) == key).unwrap();
        assert!(pair.result.p_value < ALPHA);
    }

    #[test]
    fn missing_cell() {
        let s = snap(vec![comment("a", Group::Left, "[NAME]", &[("M", Male)])]);
        assert!(matches!(cross_partisan_lengths(&s), Err(CoverageError::EmptyCell { .. })));
    }

    #[test]
    fn report_sections_fail_independently() {
        let registry = Registry::from_records(vec![EntityRecord::new("M", "A B", Male)]).unwrap();
        let s = snap(vec![comment("a", Group::Left, "[NAME] x", &[("M", Male)])]);
        let r = coverage_report(&s, &registry, DegreeMode::Mentions);
        assert!(r.overall.proportions.is_ok());
        assert!(!r.overall.in_degree_ks.is_ok());
        assert!(!r.cross_partisan.is_ok());
        assert!(r.by_group.contains_key("left"));
    }

    proptest! {
        #[test]
        fn degree_invariants(ms in prop::collection::vec(prop::collection::vec(0u8..8, 1..4), 1..25)) {
            let entries: Vec<_> = ms.iter().enumerate().map(|(i, m)| {
                let owned: Vec<(String, Gender)> = m.iter().map(|e| {
                    let g = if e % 2 == 0 { Female } else { Male };
                    (format!("E{e}"), g)
                }).collect();
                let refs: Vec<(&str, Gender)> = owned.iter().map(|(e, g)| (e.as_str(), *g)).collect();
                comment(&format!("c{i}"), Group::None, "", &refs)
            }).collect();
            let s = snap(entries);
            let t = in_degree_distribution(&s, DegreeMode::Mentions);
            prop_assert_eq!(t.total(), s.datapoints().len());
            for g in Gender::BINARY {
                let sum: usize = t.degrees(g).iter().sum();
                prop_assert_eq!(sum, s.counts().datapoints_by_gender.get(g));
                let c = t.ccdf(g);
                if !c.is_empty() {
                    prop_assert_eq!(t.ccdf_at(g, 1), 1.0);
                    prop_assert_eq!(c.last().unwrap().ccdf, 0.0);
                    prop_assert!(c.windows(2).all(|w| w[0].ccdf >= w[1].ccdf && w[0].k < w[1].k));
                }
            }
        }

        #[test]
        fn duplication_scales_t(lens in prop::collection::vec((3usize..40, any::<bool>()), 6..30)) {
            let build = |copies: usize| {
                let mut entries = Vec::new();
                for c in 0..copies {
                    for (i, &(n, f)) in lens.iter().enumerate() {
                        let g = if f { ("F", Female) } else { ("M", Male) };
                        entries.push(comment(&format!("{c}-{i}"), Group::Left, &words(n), &[g]));
                    }
                }
                snap(entries)
            };
            let males: Vec<f64> = lens.iter().filter(|l| !l.1).map(|l| l.0 as f64).collect();
            let females: Vec<f64> = lens.iter().filter(|l| l.1).map(|l| l.0 as f64).collect();
            prop_assume!(males.len() >= 2 && females.len() >= 2);
            prop_assume!(sample_sd(&males) > 0.0 || sample_sd(&females) > 0.0);
            let once = compare_lengths(&build(1)).unwrap();
            let twice = compare_lengths(&build(2)).unwrap();
            let d1 = once.test.effect_size.unwrap();
            let d2 = twice.test.effect_size.unwrap();
            // The pooled sd's df goes from N-2 to 2N-2, so d moves by a
            // factor sqrt((N-1)/(N-2)) and t by sqrt(2) times that.
            let n = lens.len() as f64;
            let ratio = ((n - 1.0) / (n - 2.0)).sqrt();
            prop_assert!((d2 - d1 * ratio).abs() < 1e-9 * (1.0 + d1.abs()));
            let t1 = once.test.statistic;
            prop_assert!((twice.test.statistic - t1 * ratio * 2f64.sqrt()).abs() < 1e-9 * (1.0 + t1.abs()));
        }
    }
}
