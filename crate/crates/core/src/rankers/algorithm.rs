//! Weighted image/context/gloss scoring.
//!
//! For each candidate image `i`:
//!
//! ```text
//! s_g = 0
//! for g in G:
//!     s_g = max(s_g, w_ig * sim_vl(i, g) + w_cg * sim_l(c, g))
//! score(i) = s_g + w_ic * sim_vl(i, c)
//! ```
//!
//! The context-gloss term sits inside the per-gloss max. Glosses are visited
//! in order and only a strictly larger term replaces the current best, so the
//! earliest gloss wins ties.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::{Instance, Weights};

/// Every similarity the scorer can need for one instance, computed once and
/// reusable under any weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityTable {
    pub candidates: Vec<String>,
    pub glosses: Vec<String>,
    /// `s_ic[i]`
    pub s_ic: Vec<f64>,
    /// `s_ig[i][g]`
    pub s_ig: Vec<Vec<f64>>,
    /// `s_cg[g]`
    pub s_cg: Vec<f64>,
}

impl SimilarityTable {
    /// Evaluates all similarities against `context`. Provider failures are
    /// reported with the candidate (and gloss) being scored.
    pub fn compute<V, L>(instance: &Instance, context: &str, glosses: &[String], sim_vl: V, sim_l: L) -> Result<Self>
    where
        V: Fn(&str, &str) -> Result<f64>,
        L: Fn(&str, &str) -> Result<f64>,
    {
        let wrap = |candidate: &str, gloss: Option<&str>| {
            let candidate = candidate.to_string();
            let gloss = gloss.map(str::to_string);
            move |e: Error| Error::Scoring {
                candidate,
                gloss,
                source: Box::new(e),
            }
        };
        let s_cg = glosses
            .iter()
            .map(|g| sim_l(context, g).map_err(wrap("<context>", Some(g))))
            .collect::<Result<Vec<_>>>()?;
        let mut s_ic = Vec::with_capacity(instance.candidates.len());
        let mut s_ig = Vec::with_capacity(instance.candidates.len());
        for image in &instance.candidates {
            s_ic.push(sim_vl(image, context).map_err(wrap(image, None))?);
            s_ig.push(
                glosses
                    .iter()
                    .map(|g| sim_vl(image, g).map_err(wrap(image, Some(g))))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(SimilarityTable {
            candidates: instance.candidates.clone(),
            glosses: glosses.to_vec(),
            s_ic,
            s_ig,
            s_cg,
        })
    }

    pub fn score(&self, weights: &Weights) -> ScoreBreakdown {
        let candidates = self
            .candidates
            .iter()
            .enumerate()
            .map(|(i, image)| {
                let mut s_g = 0.0;
                let mut best: Option<usize> = None;
                for (g, (&ig, &cg)) in self.s_ig[i].iter().zip(&self.s_cg).enumerate() {
                    let term = weights.ig * ig + weights.cg * cg;
                    if term > s_g {
                        s_g = term;
                        best = Some(g);
                    }
                }
                CandidateScore {
                    image: image.clone(),
                    total: s_g + weights.ic * self.s_ic[i],
                    s_ic: Some(self.s_ic[i]),
                    s_ig: best.map(|g| self.s_ig[i][g]),
                    s_cg: best.map(|g| self.s_cg[g]),
                    best_gloss: best.map(|g| self.glosses[g].clone()),
                }
            })
            .collect();
        ScoreBreakdown { candidates }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateScore {
    pub image: String,
    pub total: f64,
    pub s_ic: Option<f64>,
    pub s_ig: Option<f64>,
    pub s_cg: Option<f64>,
    /// The gloss whose weighted term was selected, if any term exceeded zero.
    pub best_gloss: Option<String>,
}

/// Per-candidate scores, in candidate order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreBreakdown {
    pub candidates: Vec<CandidateScore>,
}

impl ScoreBreakdown {
    pub fn totals(&self) -> Vec<f64> {
        self.candidates.iter().map(|c| c.total).collect()
    }
}

/// Scores one instance against its scoring context (augmented when present).
pub fn score_instance<V, L>(
    instance: &Instance,
    glosses: &[String],
    weights: &Weights,
    sim_vl: V,
    sim_l: L,
) -> Result<ScoreBreakdown>
where
    V: Fn(&str, &str) -> Result<f64>,
    L: Fn(&str, &str) -> Result<f64>,
{
    weights.validate()?;
    let table = SimilarityTable::compute(instance, instance.scoring_context(), glosses, sim_vl, sim_l)?;
    Ok(table.score(weights))
}

/// A ranked candidate list for one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub instance_index: usize,
    /// Candidates by descending total; ties keep the original candidate order.
    pub ranking: Vec<String>,
    /// Totals aligned with `ranking`.
    pub totals: Vec<f64>,
    pub gold: Option<String>,
}

impl Prediction {
    /// `totals` are in candidate order.
    pub fn from_totals(instance_index: usize, instance: &Instance, totals: &[f64]) -> Result<Self> {
        if totals.len() != instance.candidates.len() {
            return Err(Error::Shape {
                expected: instance.candidates.len(),
                actual: totals.len(),
            });
        }
        if let Some(bad) = totals.iter().position(|t| !t.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite score for candidate {:?}",
                instance.candidates[bad]
            )));
        }
        let order = rank_order(totals);
        Ok(Prediction {
            instance_index,
            ranking: order.iter().map(|&i| instance.candidates[i].clone()).collect(),
            totals: order.iter().map(|&i| totals[i]).collect(),
            gold: instance.gold.clone(),
        })
    }

    pub fn chosen(&self) -> &str {
        &self.ranking[0]
    }

    /// 1-based rank of `image`.
    pub fn rank_of(&self, image: &str) -> Option<usize> {
        self.ranking.iter().position(|c| c == image).map(|p| p + 1)
    }

    pub fn is_correct(&self) -> Option<bool> {
        self.gold.as_deref().map(|g| g == self.chosen())
    }
}

/// Candidate indices by descending score, ascending index on ties.
pub fn rank_order(totals: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..totals.len()).collect();
    order.sort_by(|&a, &b| totals[b].total_cmp(&totals[a]).then(a.cmp(&b)));
    order
}
