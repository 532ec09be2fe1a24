//! Synthetic datasets with a planted signal and a matching embedding store
//! and inventory.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::knowledge::{PartOfSpeech, SenseEntry, SenseInventory};
use crate::providers::{cosine_slices, EmbeddingStore, EmbeddingVector, Modality};
use crate::types::{Dataset, Instance, Language, Split, CANDIDATES_PER_INSTANCE};

pub const FIXTURE_DIM: usize = 16;
pub const FIXTURE_VL_MODEL: &str = "fixture-vl";
pub const FIXTURE_L_MODEL: &str = "fixture-l";

const HALF: usize = FIXTURE_DIM / 2;
const MAX_SENSES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantedSignal {
    /// Gold image equals the context's vision-language embedding; images and
    /// glosses live in orthogonal subspaces, so image-gloss terms are zero.
    ImageContext,
    /// Gold image equals one gloss embedding; the context is orthogonal to
    /// every image.
    ImageGloss,
    /// No signal.
    Noise,
}

impl std::str::FromStr for PlantedSignal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ic" => Ok(PlantedSignal::ImageContext),
            "ig" => Ok(PlantedSignal::ImageGloss),
            "noise" => Ok(PlantedSignal::Noise),
            _ => Err(Error::Config(format!("unknown planted-signal mode {s:?} (ic|ig|noise)"))),
        }
    }
}

pub struct Fixture {
    pub dataset: Dataset,
    pub store: EmbeddingStore,
    pub inventory: SenseInventory,
}

#[derive(Clone, Copy)]
enum Span {
    Low,
    High,
    Full,
}

fn random_vector(rng: &mut ChaCha8Rng, span: Span) -> Vec<f32> {
    let (lo, hi) = match span {
        Span::Low => (0, HALF),
        Span::High => (HALF, FIXTURE_DIM),
        Span::Full => (0, FIXTURE_DIM),
    };
    loop {
        let mut v = vec![0.0f32; FIXTURE_DIM];
        for x in &mut v[lo..hi] {
            *x = rng.gen_range(-1.0f32..1.0);
        }
        if v.iter().any(|x| x.abs() > 1e-3) {
            return v;
        }
    }
}

/// Random vector whose cosine with every target stays clearly below 1.
fn distinct_vector(rng: &mut ChaCha8Rng, span: Span, targets: &[&Vec<f32>]) -> Vec<f32> {
    loop {
        let v = random_vector(rng, span);
        if targets
            .iter()
            .all(|t| cosine_slices(&v, t).map(|c| c < 1.0 - 1e-6).unwrap_or(true))
        {
            return v;
        }
    }
}

/// Builds `n` English instances. Instance `k` has focus word `w{k}`,
/// context `c{k} w{k}`, 1 to 4 senses and the gold at a uniformly drawn
/// position.
pub fn make_fixture_dataset(n: usize, mode: PlantedSignal, seed: u64) -> Result<Fixture> {
    if n == 0 {
        return Err(Error::Config("fixture needs at least one instance".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = EmbeddingStore::in_memory();
    let mut senses = BTreeMap::new();
    let mut instances = Vec::with_capacity(n);

    let put = |store: &mut EmbeddingStore, model: &str, modality: Modality, key: &str, values: Vec<f32>| {
        store.insert(EmbeddingVector::new(model, modality, key, values)?).map(|_| ())
    };

    for k in 0..n {
        let lemma = format!("w{k}");
        let context = format!("c{k} {lemma}");
        let n_senses = rng.gen_range(1..=MAX_SENSES);
        let glosses: Vec<String> = (0..n_senses).map(|s| format!("{lemma} sense {s} gloss")).collect();
        let noun_first = rng.gen_bool(0.75);
        let entries = glosses
            .iter()
            .enumerate()
            .map(|(s, g)| SenseEntry {
                sense_id: format!("fx:{k}:{s}"),
                lemma: lemma.clone(),
                pos: if s == 0 && !noun_first { PartOfSpeech::Verb } else { PartOfSpeech::Noun },
                language: Language::En,
                glosses: vec![g.clone(), format!("{g} (alternative wording)")],
            })
            .collect();
        senses.insert(lemma.clone(), entries);

        let gold_pos = rng.gen_range(0..CANDIDATES_PER_INSTANCE);
        let candidates: Vec<String> = (0..CANDIDATES_PER_INSTANCE).map(|i| format!("n{k}_i{i}.jpg")).collect();

        let (ctx_vl, gloss_vl, images) = match mode {
            PlantedSignal::ImageContext => {
                let c = random_vector(&mut rng, Span::Low);
                let g: Vec<Vec<f32>> = glosses.iter().map(|_| random_vector(&mut rng, Span::High)).collect();
                let imgs = (0..CANDIDATES_PER_INSTANCE)
                    .map(|i| if i == gold_pos { c.clone() } else { distinct_vector(&mut rng, Span::Low, &[&c]) })
                    .collect::<Vec<_>>();
                (c, g, imgs)
            }
            PlantedSignal::ImageGloss => {
                let c = random_vector(&mut rng, Span::High);
                let g: Vec<Vec<f32>> = glosses.iter().map(|_| random_vector(&mut rng, Span::Low)).collect();
                let target = rng.gen_range(0..g.len());
                let refs: Vec<&Vec<f32>> = g.iter().collect();
                let imgs = (0..CANDIDATES_PER_INSTANCE)
                    .map(|i| if i == gold_pos { g[target].clone() } else { distinct_vector(&mut rng, Span::Low, &refs) })
                    .collect::<Vec<_>>();
                (c, g, imgs)
            }
            PlantedSignal::Noise => {
                let c = random_vector(&mut rng, Span::Full);
                let g: Vec<Vec<f32>> = glosses.iter().map(|_| random_vector(&mut rng, Span::Full)).collect();
                let imgs = (0..CANDIDATES_PER_INSTANCE)
                    .map(|_| random_vector(&mut rng, Span::Full))
                    .collect::<Vec<_>>();
                (c, g, imgs)
            }
        };

        put(&mut store, FIXTURE_VL_MODEL, Modality::Text, &context, ctx_vl)?;
        put(&mut store, FIXTURE_L_MODEL, Modality::Text, &context, random_vector(&mut rng, Span::Full))?;
        for (gloss, v) in glosses.iter().zip(gloss_vl) {
            put(&mut store, FIXTURE_VL_MODEL, Modality::Text, gloss, v)?;
            put(&mut store, FIXTURE_L_MODEL, Modality::Text, gloss, random_vector(&mut rng, Span::Full))?;
        }
        for (id, v) in candidates.iter().zip(images) {
            put(&mut store, FIXTURE_VL_MODEL, Modality::Image, id, v)?;
        }

        let gold = candidates[gold_pos].clone();
        instances.push(Instance::new(lemma, context, Language::En, candidates, Some(gold))?);
    }

    Ok(Fixture {
        dataset: Dataset::new(format!("fixture-{n}"), Language::En, Split::Dev, instances)?,
        store,
        inventory: SenseInventory::new(senses)?,
    })
}
