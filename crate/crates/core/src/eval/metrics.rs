use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rankers::Prediction;

fn gold_of(p: &Prediction) -> Result<&str> {
    p.gold
        .as_deref()
        .ok_or_else(|| Error::Evaluation(format!("instance {} has no gold image", p.instance_index)))
}

fn nonempty(predictions: &[Prediction]) -> Result<()> {
    if predictions.is_empty() {
        return Err(Error::Evaluation("no predictions to evaluate".into()));
    }
    Ok(())
}

/// Fraction of instances whose top-ranked image is the gold image.
pub fn hit_rate(predictions: &[Prediction]) -> Result<f64> {
    nonempty(predictions)?;
    let mut hits = 0usize;
    for p in predictions {
        if p.chosen() == gold_of(p)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / predictions.len() as f64)
}

/// Mean of `1 / rank(gold)`, ranks starting at 1.
pub fn mrr(predictions: &[Prediction]) -> Result<f64> {
    nonempty(predictions)?;
    let mut sum = 0.0;
    for p in predictions {
        let gold = gold_of(p)?;
        let rank = p.rank_of(gold).ok_or_else(|| {
            Error::Integrity(format!("gold {gold:?} missing from the ranking of instance {}", p.instance_index))
        })?;
        sum += 1.0 / rank as f64;
    }
    Ok(sum / predictions.len() as f64)
}

/// Unweighted mean of per-language scores.
pub fn macro_average<K>(per_language: &BTreeMap<K, f64>) -> Result<f64> {
    if per_language.is_empty() {
        return Err(Error::Evaluation("macro average of no languages".into()));
    }
    Ok(per_language.values().sum::<f64>() / per_language.len() as f64)
}

/// Rounds to one decimal place, for presentation only.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::Degenerate("pearson needs at least two points".into()));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(Error::Degenerate("pearson of a constant series".into()));
    }
    Ok((cov / (va.sqrt() * vb.sqrt())).clamp(-1.0, 1.0))
}
