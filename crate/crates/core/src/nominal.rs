//! Naming: is a politician referred to by given name, surname or full name?

use crate::corpus::{partition, CorpusSnapshot, PartitionKey};
use crate::registry::{effective_names, Names, Registry};
use crate::stats::{chi_square, odds_ratio, ContingencyTable, StatsError, TestResult};
use crate::types::{Gender, Group, Outcome};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NominalError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("entity '{0}' is not in the registry")]
    UnknownEntity(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NameClass {
    Given,
    Surname,
    Full,
    Other,
}

impl NameClass {
    pub const ALL: [NameClass; 4] = [NameClass::Given, NameClass::Surname, NameClass::Full, NameClass::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            NameClass::Given => "given",
            NameClass::Surname => "surname",
            NameClass::Full => "full",
            NameClass::Other => "other",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for NameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Titles removed from the front of a surface before matching.
pub const DEFAULT_HONORIFICS: &[&str] = &[
    "mr", "mrs", "ms", "miss", "mx", "dr", "prof", "professor", "sir", "dame", "lord", "lady", "madam", "madame",
    "senator", "sen", "congressman", "congresswoman", "rep", "representative", "governor", "gov", "president",
    "vice president", "prime minister", "pm", "minister", "chancellor", "secretary", "speaker", "mayor", "judge",
    "justice",
];

/// Honorific stripping configuration; an empty list disables stripping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Honorifics(Vec<String>);

impl Honorifics {
    pub fn new(words: impl IntoIterator<Item = impl AsRef<str>>) -> Self {
        let mut v: Vec<String> = words.into_iter().map(|w| normalize(w.as_ref())).filter(|w| !w.is_empty()).collect();
        // Longest first so "vice president" wins over "president".
        v.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Honorifics(v)
    }

    pub fn none() -> Self {
        Honorifics(Vec::new())
    }

    pub fn is_enabled(&self) -> bool {
        !self.0.is_empty()
    }

    /// Strips leading honorifics (with optional trailing period) from an
    /// already normalized surface. A surface that is only a title is kept.
    fn strip<'a>(&self, mut s: &'a str) -> &'a str {
        'outer: loop {
            for h in &self.0 {
                if let Some(rest) = s.strip_prefix(h.as_str()) {
                    let rest = rest.strip_prefix('.').unwrap_or(rest);
                    if let Some(rest) = rest.strip_prefix(' ') {
                        if !rest.is_empty() {
                            s = rest;
                            continue 'outer;
                        }
                    }
                }
            }
            return s;
        }
    }
}

impl Default for Honorifics {
    fn default() -> Self {
        Honorifics::new(DEFAULT_HONORIFICS)
    }
}

/// Lowercase with runs of whitespace collapsed. Diacritics are kept.
fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Exact case-insensitive match against full, then given, then surname.
pub fn classify_reference(surface: &str, names: &Names, honorifics: &Honorifics) -> NameClass {
    let norm = normalize(surface);
    let s = honorifics.strip(&norm);
    if s == normalize(&names.full) {
        NameClass::Full
    } else if s == normalize(&names.given) {
        NameClass::Given
    } else if s == normalize(&names.surname) {
        NameClass::Surname
    } else {
        NameClass::Other
    }
}

/// Counts of name classes for female (row 0) and male (row 1) data points.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct NameTable {
    pub female: [u64; 4],
    pub male: [u64; 4],
}

impl NameTable {
    pub fn row(&self, g: Gender) -> &[u64; 4] {
        match g {
            Gender::Female => &self.female,
            _ => &self.male,
        }
    }

    fn row_mut(&mut self, g: Gender) -> &mut [u64; 4] {
        match g {
            Gender::Female => &mut self.female,
            _ => &mut self.male,
        }
    }

    pub fn count(&self, g: Gender, c: NameClass) -> u64 {
        self.row(g)[c.index()]
    }

    pub fn total(&self) -> u64 {
        self.female.iter().chain(&self.male).sum()
    }

    /// Percent of each gender's data points per class.
    pub fn proportions(&self) -> BTreeMap<Gender, BTreeMap<NameClass, f64>> {
        Gender::BINARY
            .iter()
            .map(|&g| {
                let row = self.row(g);
                let n: u64 = row.iter().sum();
                let pct = NameClass::ALL
                    .iter()
                    .map(|&c| (c, if n == 0 { 0.0 } else { 100.0 * row[c.index()] as f64 / n as f64 }))
                    .collect();
                (g, pct)
            })
            .collect()
    }

    pub fn contingency(&self) -> ContingencyTable {
        ContingencyTable {
            row_labels: vec!["female".into(), "male".into()],
            col_labels: NameClass::ALL.iter().map(|c| c.to_string()).collect(),
            counts: vec![self.female.to_vec(), self.male.to_vec()],
        }
    }

    /// 2x2 counts `(in, out)` of `classes` for gender `g`.
    fn split(&self, g: Gender, classes: &[NameClass]) -> (u64, u64) {
        let row = self.row(g);
        let inside: u64 = classes.iter().map(|c| row[c.index()]).sum();
        (inside, row.iter().sum::<u64>() - inside)
    }

    /// Odds of `classes` for gender `a` relative to gender `b`.
    pub fn odds_ratio(&self, classes: &[NameClass], a: Gender, b: Gender) -> Result<TestResult, StatsError> {
        let (a_in, a_out) = self.split(a, classes);
        let (b_in, b_out) = self.split(b, classes);
        odds_ratio(a_in, a_out, b_in, b_out)
    }

    pub fn swapped(&self) -> NameTable {
        NameTable { female: self.male, male: self.female }
    }
}

pub fn name_distribution(
    corpus: &CorpusSnapshot,
    registry: &Registry,
    honorifics: &Honorifics,
) -> Result<NameTable, NominalError> {
    if corpus.is_empty() {
        return Err(NominalError::EmptyCorpus);
    }
    let mut names: BTreeMap<&str, Names> = BTreeMap::new();
    let mut table = NameTable::default();
    for dp in corpus.datapoints().iter().filter(|d| d.gender.is_binary()) {
        if !names.contains_key(dp.entity_id.as_str()) {
            let rec = registry.get(&dp.entity_id).ok_or_else(|| NominalError::UnknownEntity(dp.entity_id.clone()))?;
            names.insert(&dp.entity_id, effective_names(rec));
        }
        let class = classify_reference(&dp.surface, &names[dp.entity_id.as_str()], honorifics);
        table.row_mut(dp.gender)[class.index()] += 1;
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedOdds {
    pub name: String,
    /// The group whose odds are in the numerator, e.g. "female".
    pub numerator: String,
    pub denominator: String,
    pub result: Outcome<TestResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareSummary {
    pub result: TestResult,
    pub n: u64,
    /// Categories left out because no observation fell in them.
    pub dropped: Vec<String>,
}

/// Chi-square on a table after removing empty rows and columns.
pub fn chi_square_nonempty(table: &ContingencyTable) -> Result<ChiSquareSummary, StatsError> {
    let (t, dropped) = table.drop_empty()?;
    Ok(ChiSquareSummary { result: chi_square(&t)?, n: t.total(), dropped })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NominalTests {
    /// Gender x name class; the effect size is Cramér's V.
    pub chi_square: Outcome<ChiSquareSummary>,
    pub odds_ratios: Vec<NamedOdds>,
}

fn gender_odds(table: &NameTable, name: &str, classes: &[NameClass], a: Gender) -> NamedOdds {
    let b = a.swapped();
    NamedOdds {
        name: name.into(),
        numerator: a.to_string(),
        denominator: b.to_string(),
        result: table.odds_ratio(classes, a, b).into(),
    }
}

/// Chi-square over the 2x4 table plus the named odds ratios: given name
/// (female vs male), surname (male vs female), full name (female vs male)
/// and professional reference, surname or full (male vs female).
pub fn nominal_tests(table: &NameTable) -> NominalTests {
    use NameClass::*;
    NominalTests {
        chi_square: chi_square_nonempty(&table.contingency()).into(),
        odds_ratios: vec![
            gender_odds(table, "given", &[Given], Gender::Female),
            gender_odds(table, "surname", &[Surname], Gender::Male),
            gender_odds(table, "full", &[Full], Gender::Female),
            gender_odds(table, "professional", &[Surname, Full], Gender::Male),
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupNominal {
    pub table: NameTable,
    pub proportions: BTreeMap<Gender, BTreeMap<NameClass, f64>>,
    pub tests: NominalTests,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NominalByGroup {
    pub groups: BTreeMap<String, GroupNominal>,
    /// For each gender, partisan group x name class.
    pub partisanship: BTreeMap<Gender, Outcome<ChiSquareSummary>>,
    /// Professional reference of women across pairs of partisan groups.
    pub female_professional: Vec<NamedOdds>,
}

/// Stratified follow-ups: one gender test per partisan group, one
/// partisanship test per gender, and professional-reference odds for women
/// between groups.
pub fn nominal_by_group(
    corpus: &CorpusSnapshot,
    registry: &Registry,
    honorifics: &Honorifics,
) -> Result<NominalByGroup, NominalError> {
    let parts = partition(corpus, PartitionKey::Group);
    let mut tables: BTreeMap<Group, NameTable> = BTreeMap::new();
    for group in Group::PARTISAN {
        if let Some(part) = parts.get(group.as_str()) {
            tables.insert(group, name_distribution(part, registry, honorifics)?);
        }
    }
    let groups = tables
        .iter()
        .map(|(g, t)| {
            (g.to_string(), GroupNominal { table: *t, proportions: t.proportions(), tests: nominal_tests(t) })
        })
        .collect();
    let partisanship = Gender::BINARY
        .iter()
        .map(|&gender| {
            let table = ContingencyTable {
                row_labels: tables.keys().map(|g| g.to_string()).collect(),
                col_labels: NameClass::ALL.iter().map(|c| c.to_string()).collect(),
                counts: tables.values().map(|t| t.row(gender).to_vec()).collect(),
            };
            (gender, chi_square_nonempty(&table).into())
        })
        .collect();
    let professional = [NameClass::Surname, NameClass::Full];
    let mut female_professional = Vec::new();
    for (a, b) in [(Group::Left, Group::AltRight), (Group::Right, Group::AltRight), (Group::Left, Group::Right)] {
        let (Some(ta), Some(tb)) = (tables.get(&a), tables.get(&b)) else { continue };
        let (a_in, a_out) = ta.split(Gender::Female, &professional);
        let (b_in, b_out) = tb.split(Gender::Female, &professional);
        female_professional.push(NamedOdds {
            name: "professional".into(),
            numerator: a.to_string(),
            denominator: b.to_string(),
            result: odds_ratio(a_in, a_out, b_in, b_out).into(),
        });
    }
    Ok(NominalByGroup { groups, partisanship, female_professional })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NominalVariant {
    pub honorifics_stripped: bool,
    pub table: NameTable,
    pub proportions: BTreeMap<Gender, BTreeMap<NameClass, f64>>,
    pub tests: NominalTests,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NominalReport {
    pub primary: NominalVariant,
    /// The other honorific mode, present when any cell proportion differs
    /// from the primary by more than half a percentage point.
    pub alternate: Option<NominalVariant>,
    pub by_group: Outcome<NominalByGroup>,
}

/// Largest absolute difference in cell proportions, in percentage points.
pub fn max_proportion_gap(a: &NameTable, b: &NameTable) -> f64 {
    let (pa, pb) = (a.proportions(), b.proportions());
    pa.iter()
        .flat_map(|(g, row)| row.iter().map(|(c, v)| (v - pb[g][c]).abs()))
        .fold(0.0, f64::max)
}

fn variant(corpus: &CorpusSnapshot, registry: &Registry, h: &Honorifics) -> Result<NominalVariant, NominalError> {
    let table = name_distribution(corpus, registry, h)?;
    Ok(NominalVariant {
        honorifics_stripped: h.is_enabled(),
        proportions: table.proportions(),
        tests: nominal_tests(&table),
        table,
    })
}

pub fn nominal_report(
    corpus: &CorpusSnapshot,
    registry: &Registry,
    honorifics: &Honorifics,
) -> Result<NominalReport, NominalError> {
    let primary = variant(corpus, registry, honorifics)?;
    let other = if honorifics.is_enabled() { Honorifics::none() } else { Honorifics::default() };
    let alt = variant(corpus, registry, &other)?;
    let alternate = (max_proportion_gap(&primary.table, &alt.table) > 0.5).then_some(alt);
    Ok(NominalReport { primary, alternate, by_group: nominal_by_group(corpus, registry, honorifics).into() })
}
