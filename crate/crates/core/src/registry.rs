//! Politician records and name approximation.

use crate::types::{Gender, GenderCounts};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("cannot read registry {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("registry line {line}: {source}")]
    Csv {
        line: u64,
        #[source]
        source: csv::Error,
    },
    #[error("registry line {line}: duplicate entity id '{id}'")]
    DuplicateId { line: u64, id: String },
    #[error("registry line {line}: missing full_name for '{id}'")]
    MissingFullName { line: u64, id: String },
    #[error("registry line {line}: {message}")]
    BadGender { line: u64, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityRecord {
    pub entity_id: String,
    pub full_name: String,
    pub given_name: Option<String>,
    pub surname: Option<String>,
    pub gender: Gender,
    pub country: Option<String>,
}

impl EntityRecord {
    pub fn new(entity_id: impl Into<String>, full_name: impl Into<String>, gender: Gender) -> Self {
        EntityRecord {
            entity_id: entity_id.into(),
            full_name: full_name.into(),
            given_name: None,
            surname: None,
            gender,
            country: None,
        }
    }
}

/// The three names an entity may be referred to by.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Names {
    pub given: String,
    pub surname: String,
    pub full: String,
}

/// Given name = text before the first space, surname = text after the last
/// space. A name without spaces maps to itself on both sides.
pub fn approximate_names(full_name: &str) -> (String, String) {
    let name = full_name.trim();
    let given = name.split(' ').next().unwrap_or(name);
    let surname = name.rsplit(' ').next().unwrap_or(name);
    (given.to_string(), surname.to_string())
}

/// Recorded names where present, approximations otherwise.
pub fn effective_names(record: &EntityRecord) -> Names {
    let (given, surname) = approximate_names(&record.full_name);
    let pick = |recorded: &Option<String>, fallback: String| match recorded {
        Some(n) if !n.trim().is_empty() => n.trim().to_string(),
        _ => fallback,
    };
    Names {
        given: pick(&record.given_name, given),
        surname: pick(&record.surname, surname),
        full: record.full_name.trim().to_string(),
    }
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    records: BTreeMap<String, EntityRecord>,
    gender_totals: GenderCounts,
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    entity_id: String,
    full_name: String,
    #[serde(default)]
    given_name: String,
    #[serde(default)]
    surname: String,
    gender: String,
    #[serde(default)]
    country: String,
}

fn non_empty(s: String) -> Option<String> {
    let t = s.trim();
    (!t.is_empty()).then(|| t.to_string())
}

impl Registry {
    pub fn from_records(records: impl IntoIterator<Item = EntityRecord>) -> Result<Self, RegistryError> {
        let mut registry = Registry::default();
        for (i, r) in records.into_iter().enumerate() {
            registry.insert(r, i as u64 + 1)?;
        }
        Ok(registry)
    }

    fn insert(&mut self, record: EntityRecord, line: u64) -> Result<(), RegistryError> {
        if record.full_name.trim().is_empty() {
            return Err(RegistryError::MissingFullName { line, id: record.entity_id });
        }
        if self.records.contains_key(&record.entity_id) {
            return Err(RegistryError::DuplicateId { line, id: record.entity_id });
        }
        self.gender_totals.add(record.gender, 1);
        self.records.insert(record.entity_id.clone(), record);
        Ok(())
    }

    /// Reads `entity_id,full_name,given_name,surname,gender,country` CSV with a
    /// header row.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, RegistryError> {
        let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
        let mut registry = Registry::default();
        for row in rdr.deserialize::<CsvRow>() {
            let row = row.map_err(|e| RegistryError::Csv {
                line: e.position().map_or(0, |p| p.line()),
                source: e,
            })?;
            let line = registry.records.len() as u64 + 2;
            let gender = row
                .gender
                .parse::<Gender>()
                .map_err(|message| RegistryError::BadGender { line, message })?;
            let record = EntityRecord {
                entity_id: row.entity_id.trim().to_string(),
                full_name: row.full_name.trim().to_string(),
                given_name: non_empty(row.given_name),
                surname: non_empty(row.surname),
                gender,
                country: non_empty(row.country),
            };
            registry.insert(record, line)?;
        }
        Ok(registry)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RegistryError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| RegistryError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn get(&self, entity_id: &str) -> Option<&EntityRecord> {
        self.records.get(entity_id)
    }

    pub fn contains(&self, entity_id: &str) -> bool {
        self.records.contains_key(entity_id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn gender_totals(&self) -> GenderCounts {
        self.gender_totals
    }

    pub fn iter(&self) -> impl Iterator<Item = &EntityRecord> {
        self.records.values()
    }
}

/// Convenience wrapper over [`Registry::load`].
pub fn load_registry(path: impl AsRef<Path>) -> Result<Registry, RegistryError> {
    Registry::load(path)
}
