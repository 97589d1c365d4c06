use crate::combinatorial::PermutationUnit;
use crate::coverage::DegreeMode;
use crate::lexical::MinCountMode;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Coverage,
    Combinatorial,
    Nominal,
    Sentiment,
    Lexical,
}

impl Analysis {
    pub const ALL: [Analysis; 5] =
        [Analysis::Coverage, Analysis::Combinatorial, Analysis::Nominal, Analysis::Sentiment, Analysis::Lexical];

    pub fn as_str(self) -> &'static str {
        match self {
            Analysis::Coverage => "coverage",
            Analysis::Combinatorial => "combinatorial",
            Analysis::Nominal => "nominal",
            Analysis::Sentiment => "sentiment",
            Analysis::Lexical => "lexical",
        }
    }
}

impl std::str::FromStr for Analysis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Analysis::ALL
            .into_iter()
            .find(|a| a.as_str() == s.trim())
            .ok_or_else(|| format!("unknown analysis '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

fn all_analyses() -> BTreeSet<Analysis> {
    Analysis::ALL.into()
}

fn all_formats() -> BTreeSet<Format> {
    [Format::Json, Format::Csv].into()
}

/// Everything a run depends on. Loaded from TOML; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub registry: PathBuf,
    pub groups: Option<PathBuf>,
    pub vad: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub bot_patterns: Option<PathBuf>,
    #[serde(default = "all_analyses")]
    pub analyses: BTreeSet<Analysis>,
    pub permutations: usize,
    pub seed: u64,
    pub min_count: u64,
    pub min_count_mode: MinCountMode,
    pub top_k: usize,
    pub exclude_entities: Vec<String>,
    pub out: PathBuf,
    #[serde(default = "all_formats")]
    pub formats: BTreeSet<Format>,
    pub strip_honorifics: bool,
    pub include_multi_entity: bool,
    pub degree_mode: DegreeMode,
    pub dedup_mentions: bool,
    pub permutation_unit: PermutationUnit,
    pub max_malformed_fraction: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: PathBuf::new(),
            registry: PathBuf::new(),
            groups: None,
            vad: None,
            annotations: None,
            bot_patterns: None,
            analyses: all_analyses(),
            permutations: 1000,
            seed: 0,
            min_count: 3,
            min_count_mode: MinCountMode::Total,
            top_k: 100,
            exclude_entities: Vec::new(),
            out: PathBuf::from("report"),
            formats: all_formats(),
            strip_honorifics: true,
            include_multi_entity: false,
            degree_mode: DegreeMode::Mentions,
            dedup_mentions: false,
            permutation_unit: PermutationUnit::Mention,
            max_malformed_fraction: 0.01,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Reads a TOML file. Relative paths are resolved against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        let mut config = Self::from_toml_str(&text)?;
        if let Some(base) = path.parent() {
            config.resolve_relative(base);
        }
        Ok(config)
    }

    fn resolve_relative(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.corpus);
        fix(&mut self.registry);
        fix(&mut self.out);
        for p in [&mut self.groups, &mut self.vad, &mut self.annotations, &mut self.bot_patterns].into_iter().flatten() {
            fix(p);
        }
    }

    pub fn enabled(&self, a: Analysis) -> bool {
        self.analyses.contains(&a)
    }

    /// Checks value ranges and that every referenced input exists.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.permutations == 0 {
            return bad("permutations must be at least 1".into());
        }
        if self.top_k == 0 {
            return bad("top_k must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.max_malformed_fraction) {
            return bad("max_malformed_fraction must be in [0, 1]".into());
        }
        if self.formats.is_empty() {
            return bad("at least one output format is required".into());
        }
        if self.enabled(Analysis::Sentiment) && self.vad.is_none() {
            return bad("sentiment analysis needs a vad lexicon".into());
        }
        let required = [("corpus", Some(&self.corpus)), ("registry", Some(&self.registry))];
        let optional = [
            ("groups", self.groups.as_ref()),
            ("vad", self.vad.as_ref()),
            ("annotations", self.annotations.as_ref()),
            ("bot_patterns", self.bot_patterns.as_ref()),
        ];
        for (name, path) in required.into_iter().chain(optional) {
            match path {
                Some(p) if p.as_os_str().is_empty() => return bad(format!("{name} path is required")),
                Some(p) if !p.is_file() => return bad(format!("{name} file {} does not exist", p.display())),
                _ => {}
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}
