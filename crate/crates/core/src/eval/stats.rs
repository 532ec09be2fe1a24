use serde::Serialize;

use crate::error::{Error, Result};
use crate::knowledge::{PartOfSpeech, SenseInventory};
use crate::types::Instance;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub instances: usize,
    /// Fraction of instances whose focus word is in the inventory.
    pub coverage: f64,
    /// Mean sense count over covered instances; absent when none are covered.
    pub mean_polysemy: Option<f64>,
    /// Fraction of covered instances whose focus word's first sense is a noun.
    pub noun_fraction: Option<f64>,
}

pub fn dataset_stats(instances: &[Instance], inventory: &SenseInventory) -> Result<DatasetStats> {
    if instances.is_empty() {
        return Err(Error::Evaluation("statistics of an empty dataset".into()));
    }
    let mut covered = 0usize;
    let mut senses = 0usize;
    let mut nouns = 0usize;
    for inst in instances {
        let s = inventory.senses(&inst.focus_word);
        if let Some(first) = s.first() {
            covered += 1;
            senses += s.len();
            if first.pos == PartOfSpeech::Noun {
                nouns += 1;
            }
        }
    }
    let (mean_polysemy, noun_fraction) = if covered == 0 {
        (None, None)
    } else {
        (Some(senses as f64 / covered as f64), Some(nouns as f64 / covered as f64))
    };
    Ok(DatasetStats {
        instances: instances.len(),
        coverage: covered as f64 / instances.len() as f64,
        mean_polysemy,
        noun_fraction,
    })
}
