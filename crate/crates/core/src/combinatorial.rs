//! Conditional co-mention measure and its permutation null.
//!
//! `L(given, add)` is the mean number of additional `add`-gender mentions in
//! comments that already mention someone of gender `given`. The mention
//! that qualifies a comment is not counted, so a comment naming a single
//! woman contributes 0 to `L(female, female)`.

use crate::corpus::CorpusSnapshot;
use crate::stats::{empirical_p, EmpiricalP, Tail};
use crate::types::Gender;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CombinatorialError {
    #[error("corpus has no comments")]
    EmptyCorpus,
    #[error("permutation count must be at least 1")]
    NoPermutations,
    #[error("L({given}, {add}) is undefined: no comment mentions a {given} entity")]
    Undefined { given: Gender, add: Gender },
}

/// The four cells, in report order.
pub const CELLS: [(Gender, Gender); 4] = [
    (Gender::Female, Gender::Female),
    (Gender::Female, Gender::Male),
    (Gender::Male, Gender::Female),
    (Gender::Male, Gender::Male),
];

fn idx(g: Gender) -> usize {
    match g {
        Gender::Female => 0,
        _ => 1,
    }
}

pub fn cell_name(given: Gender, add: Gender) -> String {
    format!("{given}|{add}")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LTable {
    /// Sums of additional mentions, indexed `[given][add]`.
    pub numerators: [[u64; 2]; 2],
    /// Comments with at least one mention of each gender.
    pub denominators: [u64; 2],
}

impl LTable {
    /// Builds the table from per-comment `(female, male)` counts.
    pub fn from_shapes(shapes: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut t = LTable::default();
        for (f, m) in shapes {
            let (f, m) = (u64::from(f), u64::from(m));
            if f > 0 {
                t.denominators[0] += 1;
                t.numerators[0][0] += f - 1;
                t.numerators[0][1] += m;
            }
            if m > 0 {
                t.denominators[1] += 1;
                t.numerators[1][0] += f;
                t.numerators[1][1] += m - 1;
            }
        }
        t
    }

    /// `None` when no comment mentions the given gender, or for `other`.
    pub fn get(&self, given: Gender, add: Gender) -> Option<f64> {
        if !given.is_binary() || !add.is_binary() {
            return None;
        }
        let den = self.denominators[idx(given)];
        (den > 0).then(|| self.numerators[idx(given)][idx(add)] as f64 / den as f64)
    }

    pub fn values(&self) -> BTreeMap<String, Option<f64>> {
        CELLS.iter().map(|&(g, a)| (cell_name(g, a), self.get(g, a))).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationUnit {
    /// Shuffle genders across all mention slots.
    #[default]
    Mention,
    /// Shuffle genders across entities; every mention follows its entity.
    Entity,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LOptions {
    /// Count each entity once per comment.
    pub dedup: bool,
    pub unit: PermutationUnit,
}

/// Binary-gender mention structure of a corpus, ready for permutation.
#[derive(Debug, Clone)]
pub struct MentionSlots {
    /// Comment `i` owns `entity[offsets[i]..offsets[i + 1]]`.
    offsets: Vec<usize>,
    /// Dense entity index per slot.
    entity: Vec<u32>,
    /// Gender per entity, true for female.
    entity_female: Vec<bool>,
}

impl MentionSlots {
    pub fn build(corpus: &CorpusSnapshot, dedup: bool) -> Self {
        let mut ids: BTreeMap<&str, u32> = BTreeMap::new();
        let mut entity_female = Vec::new();
        let mut offsets = vec![0];
        let mut entity = Vec::new();
        for (_, dps) in corpus.iter() {
            let mut seen = HashSet::new();
            for dp in dps.iter().filter(|d| d.gender.is_binary()) {
                if dedup && !seen.insert(dp.entity_id.as_str()) {
                    continue;
                }
                let next = ids.len() as u32;
                let e = *ids.entry(dp.entity_id.as_str()).or_insert_with(|| {
                    entity_female.push(dp.gender == Gender::Female);
                    next
                });
                entity.push(e);
            }
            if entity.len() > *offsets.last().unwrap() {
                offsets.push(entity.len());
            }
        }
        MentionSlots { offsets, entity, entity_female }
    }

    pub fn comments(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn slots(&self) -> usize {
        self.entity.len()
    }

    /// Observed gender per slot, true for female.
    pub fn slot_genders(&self) -> Vec<bool> {
        self.entity.iter().map(|&e| self.entity_female[e as usize]).collect()
    }

    pub fn shapes_of(&self, slot_female: &[bool]) -> Vec<(u32, u32)> {
        self.offsets
            .windows(2)
            .map(|w| {
                let f = slot_female[w[0]..w[1]].iter().filter(|&&x| x).count() as u32;
                (f, (w[1] - w[0]) as u32 - f)
            })
            .collect()
    }

    pub fn observed(&self) -> LTable {
        LTable::from_shapes(self.shapes_of(&self.slot_genders()))
    }

    /// Slot genders for null sample `index`. Each sample has its own
    /// ChaCha stream, so samples do not depend on evaluation order.
    pub fn permuted(&self, unit: PermutationUnit, seed: u64, index: u64) -> Vec<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        match unit {
            PermutationUnit::Mention => {
                let mut draw = SequentialDraw::new(self.slots(), self.female_slots());
                (0..self.slots()).map(|_| draw.next(&mut rng)).collect()
            }
            PermutationUnit::Entity => {
                let mut by_entity = self.entity_female.clone();
                by_entity.shuffle(&mut rng);
                self.entity.iter().map(|&e| by_entity[e as usize]).collect()
            }
        }
    }

    fn female_slots(&self) -> usize {
        self.entity.iter().filter(|&&e| self.entity_female[e as usize]).count()
    }

    /// L table of null sample `index`; the same as building it from
    /// `permuted(unit, seed, index)` but without the slot vector.
    pub fn null_table(&self, unit: PermutationUnit, seed: u64, index: u64) -> LTable {
        match unit {
            PermutationUnit::Mention => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(index);
                let mut draw = SequentialDraw::new(self.slots(), self.female_slots());
                LTable::from_shapes(self.offsets.windows(2).map(|w| {
                    let n = (w[1] - w[0]) as u32;
                    let f = (0..n).filter(|_| draw.next(&mut rng)).count() as u32;
                    (f, n - f)
                }))
            }
            PermutationUnit::Entity => LTable::from_shapes(self.shapes_of(&self.permuted(unit, seed, index))),
        }
    }
}

/// Lays out a fixed number of `true` values in uniformly random order,
/// one position at a time.
struct SequentialDraw {
    remaining: u32,
    remaining_true: u32,
}

impl SequentialDraw {
    fn new(n: usize, trues: usize) -> Self {
        SequentialDraw { remaining: n as u32, remaining_true: trues as u32 }
    }

    fn next(&mut self, rng: &mut ChaCha8Rng) -> bool {
        let hit = rng.random_range(0..self.remaining) < self.remaining_true;
        self.remaining -= 1;
        if hit {
            self.remaining_true -= 1;
        }
        hit
    }
}

pub fn conditional_l(corpus: &CorpusSnapshot, dedup: bool) -> Result<LTable, CombinatorialError> {
    if corpus.is_empty() {
        return Err(CombinatorialError::EmptyCorpus);
    }
    Ok(MentionSlots::build(corpus, dedup).observed())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullEnsemble {
    pub k: usize,
    pub seed: u64,
    pub unit: PermutationUnit,
    pub samples: Vec<LTable>,
}

impl NullEnsemble {
    pub fn cell_values(&self, given: Gender, add: Gender) -> Vec<f64> {
        self.samples.iter().filter_map(|s| s.get(given, add)).collect()
    }
}

pub fn null_ensemble(
    corpus: &CorpusSnapshot,
    k: usize,
    seed: u64,
    options: LOptions,
) -> Result<NullEnsemble, CombinatorialError> {
    if k == 0 {
        return Err(CombinatorialError::NoPermutations);
    }
    let slots = MentionSlots::build(corpus, options.dedup);
    let samples = (0..k as u64)
        .into_par_iter()
        .map(|i| slots.null_table(options.unit, seed, i))
        .collect();
    Ok(NullEnsemble { k, seed, unit: options.unit, samples })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSignificance {
    pub given: Gender,
    pub add: Gender,
    pub observed: f64,
    pub null_mean: f64,
    pub p: EmpiricalP,
    /// `p` as text, with "<" when no null sample was as extreme.
    pub p_display: String,
}

/// Two-sided empirical p-value for every cell.
pub fn combinatorial_significance(
    observed: &LTable,
    ensemble: &NullEnsemble,
) -> Result<Vec<CellSignificance>, CombinatorialError> {
    CELLS
        .iter()
        .map(|&(given, add)| {
            let obs = observed.get(given, add).ok_or(CombinatorialError::Undefined { given, add })?;
            let nulls = ensemble.cell_values(given, add);
            let null_mean = nulls.iter().sum::<f64>() / nulls.len().max(1) as f64;
            let p = empirical_p(obs, &nulls, Tail::TwoSided);
            Ok(CellSignificance { given, add, observed: obs, null_mean, p_display: p.display(), p })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub cell: String,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Equal-width histogram of each cell's null values.
pub fn null_histograms(ensemble: &NullEnsemble, bins: usize) -> Vec<HistogramBin> {
    let bins = bins.max(1);
    let mut out = Vec::new();
    for &(given, add) in &CELLS {
        let values = ensemble.cell_values(given, add);
        if values.is_empty() {
            continue;
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
        let mut counts = vec![0usize; bins];
        for v in values {
            let b = (((v - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        for (b, count) in counts.into_iter().enumerate() {
            out.push(HistogramBin {
                cell: cell_name(given, add),
                lo: lo + b as f64 * width,
                hi: lo + (b + 1) as f64 * width,
                count,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinatorialReport {
    pub dedup: bool,
    pub observed: LTable,
    pub values: BTreeMap<String, Option<f64>>,
    pub k: usize,
    pub seed: u64,
    pub unit: PermutationUnit,
    pub significance: Vec<CellSignificance>,
    #[serde(skip)]
    pub histograms: Vec<HistogramBin>,
}

pub fn combinatorial_report(
    corpus: &CorpusSnapshot,
    k: usize,
    seed: u64,
    options: LOptions,
) -> Result<CombinatorialReport, CombinatorialError> {
    let observed = conditional_l(corpus, options.dedup)?;
    let ensemble = null_ensemble(corpus, k, seed, options)?;
    Ok(CombinatorialReport {
        dedup: options.dedup,
        values: observed.values(),
        significance: combinatorial_significance(&observed, &ensemble)?,
        histograms: null_histograms(&ensemble, 50),
        observed,
        k,
        seed,
        unit: options.unit,
    })
}
