use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::metrics::{hit_rate, macro_average, mrr, pearson, round1};
use crate::config::{GenParams, SystemConfig};
use crate::error::{Error, Result};
use crate::rankers::{Counters, DatasetRun, Prediction, ResolvedPreset};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LanguageBlock {
    pub dataset: String,
    pub n: usize,
    /// Absent for unlabelled datasets.
    pub hit_rate: Option<f64>,
    pub mrr: Option<f64>,
    pub preset: ResolvedPreset,
    pub counters: Counters,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub system: String,
    pub max_input_chars: Option<usize>,
    /// Present for the generated-image system only.
    pub gen: Option<GenParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub seed: u64,
    pub config: ConfigEcho,
    /// Keyed by language code.
    pub languages: BTreeMap<String, LanguageBlock>,
    /// Unweighted mean of per-language hit rates.
    pub macro_avg: Option<f64>,
    /// Correlation of hit rate and MRR across languages; needs two or more
    /// labelled languages with varying scores.
    pub pearson_acc_mrr: Option<f64>,
    pub counters: Counters,
}

impl EvalReport {
    pub fn build(config: &SystemConfig, runs: &[DatasetRun], names: &[String]) -> Result<Self> {
        if runs.len() != names.len() {
            return Err(Error::Shape {
                expected: runs.len(),
                actual: names.len(),
            });
        }
        let mut languages = BTreeMap::new();
        let mut counters = Counters::default();
        for (run, name) in runs.iter().zip(names) {
            let labelled = run.predictions.iter().all(|p| p.gold.is_some());
            let (h, m) = if labelled {
                (Some(hit_rate(&run.predictions)?), Some(mrr(&run.predictions)?))
            } else {
                (None, None)
            };
            let lang = run
                .instances
                .first()
                .map(|i| i.language.code().to_string())
                .ok_or_else(|| Error::Evaluation(format!("dataset {name:?} produced no predictions")))?;
            counters.add(&run.counters);
            let block = LanguageBlock {
                dataset: name.clone(),
                n: run.predictions.len(),
                hit_rate: h,
                mrr: m,
                preset: run.preset.clone(),
                counters: run.counters.clone(),
            };
            if languages.insert(lang.clone(), block).is_some() {
                return Err(Error::Config(format!("more than one dataset for language {lang}")));
            }
        }
        let hits: BTreeMap<&String, f64> = languages
            .iter()
            .filter_map(|(k, b)| b.hit_rate.map(|h| (k, h)))
            .collect();
        let macro_avg = if hits.is_empty() { None } else { Some(macro_average(&hits)?) };
        let (a, b): (Vec<f64>, Vec<f64>) = languages
            .values()
            .filter_map(|blk| blk.hit_rate.zip(blk.mrr))
            .unzip();
        let pearson_acc_mrr = pearson(&a, &b).ok();
        let uses_gen = runs.iter().any(|r| r.preset.strategy == crate::config::Strategy::Gen);
        Ok(EvalReport {
            seed: config.seed,
            config: ConfigEcho {
                system: config.system.to_string(),
                max_input_chars: config.max_input_chars,
                gen: uses_gen.then(|| config.gen.clone()),
            },
            languages,
            macro_avg,
            pearson_acc_mrr,
            counters,
        })
    }

    /// Pretty JSON with a trailing newline; identical inputs give identical
    /// bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Aligned plain-text table, scores as percentages with one decimal.
    pub fn to_table(&self) -> String {
        let pct = |x: Option<f64>| x.map(|v| format!("{:.1}", round1(v * 100.0))).unwrap_or_else(|| "-".into());
        let mut rows: Vec<[String; 5]> = vec![[
            "lang".into(),
            "dataset".into(),
            "n".into(),
            "hit".into(),
            "mrr".into(),
        ]];
        for (lang, b) in &self.languages {
            rows.push([lang.clone(), b.dataset.clone(), b.n.to_string(), pct(b.hit_rate), pct(b.mrr)]);
        }
        rows.push(["macro".into(), String::new(), String::new(), pct(self.macro_avg), String::new()]);
        let widths: Vec<usize> = (0..5).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = format!("system: {}  seed: {}\n", self.config.system, self.seed);
        for r in &rows {
            let line = format!(
                "{:<w0$}  {:<w1$}  {:>w2$}  {:>w3$}  {:>w4$}",
                r[0],
                r[1],
                r[2],
                r[3],
                r[4],
                w0 = widths[0],
                w1 = widths[1],
                w2 = widths[2],
                w3 = widths[3],
                w4 = widths[4]
            );
            let _ = writeln!(out, "{}", line.trim_end());
        }
        if let Some(p) = self.pearson_acc_mrr {
            let _ = writeln!(out, "pearson(hit, mrr): {p:.4}");
        }
        out
    }
}

/// `language<TAB>index<TAB>ranked ids (comma separated)<TAB>totals`, with a
/// header row.
pub fn predictions_tsv(runs: &[DatasetRun]) -> String {
    let mut out = String::from("language\tindex\tranking\ttotals\n");
    for run in runs {
        let lang = run.instances.first().map(|i| i.language.code()).unwrap_or("");
        for p in &run.predictions {
            push_prediction(&mut out, lang, p);
        }
    }
    out
}

fn push_prediction(out: &mut String, lang: &str, p: &Prediction) {
    let totals: Vec<String> = p.totals.iter().map(|t| t.to_string()).collect();
    let _ = writeln!(out, "{lang}\t{}\t{}\t{}", p.instance_index, p.ranking.join(","), totals.join(","));
}
