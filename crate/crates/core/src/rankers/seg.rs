//! Ranking by mean segmentation-mask value.
//!
//! Mask values come from a TSV file with one row per (instance, candidate):
//! `instance_index<TAB>candidate_id<TAB>value`, values in `[0, 1]`.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use super::algorithm::Prediction;
use crate::error::{Error, Result};
use crate::types::Instance;

/// `instance index -> candidate id -> mean mask value`
pub type MaskValues = BTreeMap<usize, HashMap<String, f64>>;

pub fn parse_mask_values(text: &str) -> Result<MaskValues> {
    let mut out = MaskValues::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse("masks", n + 1, format!("expected 3 fields, got {}", fields.len())));
        }
        let index: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::parse("masks", n + 1, format!("bad instance index {:?}", fields[0])))?;
        let value: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse("masks", n + 1, format!("bad mask value {:?}", fields[2])))?;
        if !value.is_finite() {
            return Err(Error::parse("masks", n + 1, "mask value is not finite"));
        }
        if out.entry(index).or_default().insert(fields[1].to_string(), value).is_some() {
            return Err(Error::parse(
                "masks",
                n + 1,
                format!("duplicate value for instance {index}, candidate {:?}", fields[1]),
            ));
        }
    }
    Ok(out)
}

pub fn load_mask_values(path: &Path) -> Result<MaskValues> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mask_values(&text).map_err(|e| match e {
        Error::Parse { line, message, .. } => Error::parse(path.display().to_string(), line, message),
        other => other,
    })
}

/// Argmax of the mean mask value; ties go to the earlier candidate.
pub fn seg_select(instance_index: usize, instance: &Instance, values: &HashMap<String, f64>) -> Result<Prediction> {
    let totals = instance
        .candidates
        .iter()
        .map(|c| {
            let v = *values.get(c).ok_or_else(|| {
                Error::Integrity(format!("no mask value for instance {instance_index}, candidate {c:?}"))
            })?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Validation(format!("mask value {v} for {c:?} is outside [0, 1]")));
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Prediction::from_totals(instance_index, instance, &totals)
}
