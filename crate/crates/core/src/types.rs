//! Domain types shared across the crate.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every instance offers exactly this many candidate images.
pub const CANDIDATES_PER_INSTANCE: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Language {
    En,
    It,
    Fa,
    Other(String),
}

impl Language {
    pub fn code(&self) -> &str {
        match self {
            Language::En => "en",
            Language::It => "it",
            Language::Fa => "fa",
            Language::Other(code) => code,
        }
    }

    pub fn is_english(&self) -> bool {
        matches!(self, Language::En)
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let code = s.trim().to_ascii_lowercase();
        match code.as_str() {
            "en" => Ok(Language::En),
            "it" => Ok(Language::It),
            "fa" => Ok(Language::Fa),
            "" => Err(Error::Config("empty language code".into())),
            _ if code.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') => {
                Ok(Language::Other(code))
            }
            _ => Err(Error::Config(format!("invalid language code {s:?}"))),
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl Serialize for Language {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for Language {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One disambiguation sample: a focus word in a short context, ten candidate
/// images and (for labelled data) the gold image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub focus_word: String,
    pub context: String,
    pub augmented_context: Option<String>,
    pub language: Language,
    pub candidates: Vec<String>,
    pub gold: Option<String>,
    /// Set when the focus word does not occur in the context.
    pub focus_not_in_context: bool,
    /// Untranslated context, kept when the context was machine translated.
    pub original_context: Option<String>,
}

impl Instance {
    pub fn new(
        focus_word: impl Into<String>,
        context: impl Into<String>,
        language: Language,
        candidates: Vec<String>,
        gold: Option<String>,
    ) -> Result<Self> {
        let focus_word = focus_word.into();
        let context = context.into();
        let focus_not_in_context = !contains_focus(&context, &focus_word);
        let instance = Instance {
            focus_word,
            context,
            augmented_context: None,
            language,
            candidates,
            gold,
            focus_not_in_context,
            original_context: None,
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn validate(&self) -> Result<()> {
        if self.candidates.len() != CANDIDATES_PER_INSTANCE {
            return Err(Error::Validation(format!(
                "expected {CANDIDATES_PER_INSTANCE} candidates, got {}",
                self.candidates.len()
            )));
        }
        let mut seen = HashSet::with_capacity(self.candidates.len());
        for candidate in &self.candidates {
            if candidate.is_empty() {
                return Err(Error::Validation("empty candidate image id".into()));
            }
            if !seen.insert(candidate.as_str()) {
                return Err(Error::Validation(format!("duplicate candidate {candidate:?}")));
            }
        }
        if let Some(gold) = &self.gold {
            if !seen.contains(gold.as_str()) {
                return Err(Error::Integrity(format!(
                    "gold {gold:?} is not among the candidates"
                )));
            }
        }
        if !self.focus_not_in_context && !contains_focus(&self.context, &self.focus_word) {
            return Err(Error::Validation(format!(
                "focus word {:?} not in context {:?} and not flagged",
                self.focus_word, self.context
            )));
        }
        Ok(())
    }

    /// The text used as "the context" for scoring: augmented when available.
    pub fn scoring_context(&self) -> &str {
        self.augmented_context.as_deref().unwrap_or(&self.context)
    }

    pub fn candidate_index(&self, image: &str) -> Option<usize> {
        self.candidates.iter().position(|c| c == image)
    }
}

fn contains_focus(context: &str, focus: &str) -> bool {
    context.to_lowercase().contains(&focus.to_lowercase())
}

/// Non-negative weights for the image-context, image-gloss and context-gloss terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub ic: f64,
    pub ig: f64,
    pub cg: f64,
}

impl Weights {
    pub const ALL_ONES: Weights = Weights {
        ic: 1.0,
        ig: 1.0,
        cg: 1.0,
    };
    pub const CONTEXT_ONLY: Weights = Weights {
        ic: 1.0,
        ig: 0.0,
        cg: 0.0,
    };

    pub fn new(ic: f64, ig: f64, cg: f64) -> Result<Self> {
        let w = Weights { ic, ig, cg };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("w_ic", self.ic), ("w_ig", self.ig), ("w_cg", self.cg)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!(
                    "weight {name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if self.ic == 0.0 && self.ig == 0.0 && self.cg == 0.0 {
            return Err(Error::Config(
                "weights (w_ic, w_ig, w_cg) must not all be zero".into(),
            ));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Weights {
        Weights {
            ic: self.ic * factor,
            ig: self.ig * factor,
            cg: self.cg * factor,
        }
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.ic, self.ig, self.cg)
    }
}

impl FromStr for Weights {
    type Err = Error;

    /// Parses `"a,b,c"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "weights must be three comma-separated numbers, got {s:?}"
            )));
        }
        let mut values = [0.0; 3];
        for (slot, part) in values.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|_| Error::Config(format!("invalid weight {part:?}")))?;
        }
        Weights::new(values[0], values[1], values[2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(Error::Config(format!("unknown split {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub language: Language,
    pub split: Split,
    pub instances: Vec<Instance>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        language: Language,
        split: Split,
        instances: Vec<Instance>,
    ) -> Result<Self> {
        let name = name.into();
        if instances.is_empty() {
            return Err(Error::Validation(format!("dataset {name:?} is empty")));
        }
        if let Some(bad) = instances.iter().find(|i| i.language != language) {
            return Err(Error::Validation(format!(
                "dataset {name:?} is {language} but contains a {} instance",
                bad.language
            )));
        }
        Ok(Dataset {
            name,
            language,
            split,
            instances,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn has_gold(&self) -> bool {
        self.instances.iter().all(|i| i.gold.is_some())
    }
}
