use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Female,
    Male,
    Other,
}

impl Gender {
    /// The two genders compared by every two-sample analysis.
    pub const BINARY: [Gender; 2] = [Gender::Female, Gender::Male];

    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Female => "female",
            Gender::Male => "male",
            Gender::Other => "other",
        }
    }

    pub fn is_binary(self) -> bool {
        self != Gender::Other
    }

    /// Female <-> male; other is fixed.
    pub fn swapped(self) -> Gender {
        match self {
            Gender::Female => Gender::Male,
            Gender::Male => Gender::Female,
            Gender::Other => Gender::Other,
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "female" | "f" | "woman" => Ok(Gender::Female),
            "male" | "m" | "man" => Ok(Gender::Male),
            "other" | "o" | "nonbinary" | "non-binary" => Ok(Gender::Other),
            other => Err(format!("unknown gender '{other}'")),
        }
    }
}

/// Partisan affiliation of a community.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Left,
    Right,
    AltRight,
    None,
}

impl Group {
    /// The explicitly partisan groups, in report order.
    pub const PARTISAN: [Group; 3] = [Group::Left, Group::Right, Group::AltRight];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Left => "left",
            Group::Right => "right",
            Group::AltRight => "alt_right",
            Group::None => "none",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "left" => Ok(Group::Left),
            "right" => Ok(Group::Right),
            "alt_right" | "altright" => Ok(Group::AltRight),
            "none" | "" | "___" => Ok(Group::None),
            other => Err(format!("unknown group '{other}'")),
        }
    }
}

/// Counts split by gender.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GenderCounts {
    pub female: usize,
    pub male: usize,
    pub other: usize,
}

impl GenderCounts {
    pub fn get(&self, g: Gender) -> usize {
        match g {
            Gender::Female => self.female,
            Gender::Male => self.male,
            Gender::Other => self.other,
        }
    }

    pub fn add(&mut self, g: Gender, n: usize) {
        match g {
            Gender::Female => self.female += n,
            Gender::Male => self.male += n,
            Gender::Other => self.other += n,
        }
    }

    pub fn total(&self) -> usize {
        self.female + self.male + self.other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExternalSentiment {
    Positive,
    Negative,
}

/// Result of one analysis section. A failed section carries its error
/// message so the rest of a report can still be produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome<T> {
    Ok(T),
    Error(String),
}

impl<T> Outcome<T> {
    pub fn is_ok(&self) -> bool {
        matches!(self, Outcome::Ok(_))
    }

    pub fn ok(&self) -> Option<&T> {
        match self {
            Outcome::Ok(v) => Some(v),
            Outcome::Error(_) => None,
        }
    }

    pub fn error(&self) -> Option<&str> {
        match self {
            Outcome::Ok(_) => None,
            Outcome::Error(e) => Some(e),
        }
    }
}

impl<T, E: fmt::Display> From<Result<T, E>> for Outcome<T> {
    fn from(r: Result<T, E>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    }
}
