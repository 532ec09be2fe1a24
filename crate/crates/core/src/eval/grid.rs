use std::cmp::Ordering;

use serde::Serialize;

use super::metrics::{hit_rate, mrr};
use crate::config::GenAggregation;
use crate::error::{Error, Result};
use crate::rankers::{gen_score, predictions_from_tables, GenInputs, Prediction, SimilarityTable};
use crate::types::{Instance, Weights};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub weights: Weights,
    pub accuracy: f64,
    pub mrr: f64,
}

/// `{0,1}^3` without the all-zero point, in lexicographic order.
pub fn binary_weight_grid() -> Vec<Weights> {
    let mut out = Vec::with_capacity(7);
    for ic in [0.0, 1.0] {
        for ig in [0.0, 1.0] {
            for cg in [0.0, 1.0] {
                if ic + ig + cg > 0.0 {
                    out.push(Weights { ic, ig, cg });
                }
            }
        }
    }
    out
}

fn lex_cmp(a: &Weights, b: &Weights) -> Ordering {
    a.ic.total_cmp(&b.ic).then(a.ig.total_cmp(&b.ig)).then(a.cg.total_cmp(&b.cg))
}

/// Evaluates every weight setting over precomputed similarity tables.
/// Rows come back by accuracy (descending), then weights (lexicographically
/// descending).
pub fn grid_search(tables: &[SimilarityTable], instances: &[Instance], grid: &[Weights]) -> Result<Vec<GridRow>> {
    if tables.len() != instances.len() {
        return Err(Error::Shape {
            expected: instances.len(),
            actual: tables.len(),
        });
    }
    let mut rows = grid
        .iter()
        .map(|w| {
            w.validate()?;
            let preds = predictions_from_tables(tables, instances, w)?;
            Ok(GridRow {
                weights: *w,
                accuracy: hit_rate(&preds)?,
                mrr: mrr(&preds)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.accuracy.total_cmp(&a.accuracy).then(lex_cmp(&b.weights, &a.weights)));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub count: usize,
    pub accuracy: f64,
    pub mrr: f64,
}

/// Accuracy of generated-image matching using only the first `n` generated
/// images, for each `n` in `counts`.
pub fn gen_sweep(
    inputs: &[GenInputs],
    instances: &[Instance],
    counts: &[usize],
    aggregation: GenAggregation,
) -> Result<Vec<SweepPoint>> {
    counts
        .iter()
        .map(|&n| {
            let preds = inputs
                .iter()
                .zip(instances)
                .enumerate()
                .map(|(k, (g, inst))| {
                    if n == 0 || n > g.generated.len() {
                        return Err(Error::Config(format!(
                            "sweep point {n} needs 1..={} generated images",
                            g.generated.len()
                        )));
                    }
                    let b = gen_score(&g.candidates, &g.generated[..n], aggregation)?;
                    Prediction::from_totals(k, inst, &b.totals())
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepPoint {
                count: n,
                accuracy: hit_rate(&preds)?,
                mrr: mrr(&preds)?,
            })
        })
        .collect()
}
