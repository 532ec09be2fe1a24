//! Sense inventory, gloss selection and the supplementary-instance builder.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Dataset, Instance, Language, Split, CANDIDATES_PER_INSTANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartOfSpeech {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Other,
}

impl PartOfSpeech {
    fn as_str(&self) -> &'static str {
        match self {
            PartOfSpeech::Noun => "NOUN",
            PartOfSpeech::Verb => "VERB",
            PartOfSpeech::Adjective => "ADJ",
            PartOfSpeech::Adverb => "ADV",
            PartOfSpeech::Other => "X",
        }
    }
}

impl fmt::Display for PartOfSpeech {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for PartOfSpeech {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for PartOfSpeech {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(match s.to_ascii_lowercase().as_str() {
            "noun" | "n" => PartOfSpeech::Noun,
            "verb" | "v" => PartOfSpeech::Verb,
            "adj" | "adjective" | "a" | "s" => PartOfSpeech::Adjective,
            "adv" | "adverb" | "r" => PartOfSpeech::Adverb,
            _ => PartOfSpeech::Other,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenseEntry {
    pub sense_id: String,
    pub lemma: String,
    pub pos: PartOfSpeech,
    pub language: Language,
    pub glosses: Vec<String>,
}

/// Senses per lemma, in inventory order. Serialized as a JSON object
/// `{lemma: [SenseEntry, ...]}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SenseInventory {
    senses: BTreeMap<String, Vec<SenseEntry>>,
}

impl SenseInventory {
    pub fn new(senses: BTreeMap<String, Vec<SenseEntry>>) -> Result<Self> {
        let inv = SenseInventory { senses };
        inv.validate()?;
        Ok(inv)
    }

    fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for (lemma, entries) in &self.senses {
            for e in entries {
                if e.glosses.is_empty() {
                    return Err(Error::Validation(format!(
                        "sense {:?} of {lemma:?} has no glosses",
                        e.sense_id
                    )));
                }
                if !ids.insert(e.sense_id.as_str()) {
                    return Err(Error::Validation(format!("duplicate sense id {:?}", e.sense_id)));
                }
            }
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let inv: SenseInventory = serde_json::from_str(text)
            .map_err(|e| Error::parse("inventory", e.line(), e.to_string()))?;
        inv.validate()?;
        Ok(inv)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::parse(path.display().to_string(), line, message),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("inventory serializes")
    }

    /// Exact lemma match first, then lowercase.
    pub fn senses(&self, lemma: &str) -> &[SenseEntry] {
        self.senses
            .get(lemma)
            .or_else(|| self.senses.get(&lemma.to_lowercase()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn contains(&self, lemma: &str) -> bool {
        !self.senses(lemma).is_empty()
    }

    pub fn lemma_count(&self) -> usize {
        self.senses.len()
    }
}

/// One gloss per sense of `lemma`: the first gloss listed for each sense,
/// in inventory sense order. Unknown lemmas give an empty list.
pub fn select_glosses(lemma: &str, inventory: &SenseInventory) -> Vec<String> {
    inventory
        .senses(lemma)
        .iter()
        .filter_map(|s| s.glosses.first().cloned())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelatedSynset {
    pub synset_id: String,
    pub lemma: String,
}

/// A synset with the images that depict it, its lemmas and related synsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageMapping {
    pub synset_id: String,
    pub image_ids: Vec<String>,
    pub lemmas: Vec<String>,
    #[serde(default)]
    pub related: Vec<RelatedSynset>,
}

/// Parses a JSON-lines image resource. Blank lines are skipped.
pub fn parse_image_mappings(text: &str) -> Result<Vec<ImageMapping>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let m: ImageMapping =
            serde_json::from_str(line).map_err(|e| Error::parse("resource", idx + 1, e.to_string()))?;
        if m.image_ids.is_empty() {
            return Err(Error::parse("resource", idx + 1, format!("synset {:?} has no images", m.synset_id)));
        }
        if m.lemmas.is_empty() {
            return Err(Error::parse("resource", idx + 1, format!("synset {:?} has no lemmas", m.synset_id)));
        }
        out.push(m);
    }
    Ok(out)
}

pub fn load_image_mappings(path: &Path) -> Result<Vec<ImageMapping>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_image_mappings(&text)
}

fn check_field(what: &str, s: &str) -> Result<()> {
    if s.is_empty() || s.contains(['\t', '\n', '\r']) {
        return Err(Error::Build(format!("{what} {s:?} is empty or contains tab/newline")));
    }
    Ok(())
}

/// Builds one silver instance per (synset, image) pair.
///
/// The context is `"<related lemma> <base lemma>"` and the focus word the
/// base lemma (`lemmas[0]`). The k-th image of a synset uses
/// `related[k % related.len()]`; synsets without related synsets are
/// skipped. Distractors are drawn without replacement from the images of
/// other synsets and the gold lands at a uniformly drawn position, all from
/// one ChaCha8 stream seeded with `seed`.
pub fn build_supplementary(resource: &[ImageMapping], per_pair_distractors: usize, seed: u64) -> Result<Dataset> {
    if per_pair_distractors + 1 != CANDIDATES_PER_INSTANCE {
        return Err(Error::Config(format!(
            "instances need {} distractors, got {per_pair_distractors}",
            CANDIDATES_PER_INSTANCE - 1
        )));
    }
    let mut seen = HashSet::new();
    let mut all_images: Vec<&str> = Vec::new();
    for m in resource {
        for img in &m.image_ids {
            check_field("image id", img)?;
            if seen.insert(img.as_str()) {
                all_images.push(img);
            }
        }
    }
    if all_images.len() < CANDIDATES_PER_INSTANCE {
        return Err(Error::Build(format!(
            "resource has {} distinct images, need at least {CANDIDATES_PER_INSTANCE}",
            all_images.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::new();
    for m in resource {
        if m.related.is_empty() {
            log::warn!("synset {} has no related synsets; skipped", m.synset_id);
            continue;
        }
        let base = m
            .lemmas
            .first()
            .ok_or_else(|| Error::Build(format!("synset {} has no lemmas", m.synset_id)))?;
        check_field("lemma", base)?;
        for r in &m.related {
            check_field("lemma", &r.lemma)?;
        }
        let own: HashSet<&str> = m.image_ids.iter().map(String::as_str).collect();
        let pool: Vec<&str> = all_images.iter().copied().filter(|i| !own.contains(i)).collect();
        if pool.len() < per_pair_distractors {
            return Err(Error::Build(format!(
                "synset {} has only {} distractor images available, need {per_pair_distractors}",
                m.synset_id,
                pool.len()
            )));
        }
        let mut done = HashSet::new();
        for (k, gold) in m.image_ids.iter().enumerate() {
            if !done.insert(gold.as_str()) {
                continue;
            }
            let related = &m.related[k % m.related.len()];
            let context = format!("{} {}", related.lemma, base);
            let mut candidates: Vec<String> = index::sample(&mut rng, pool.len(), per_pair_distractors)
                .into_iter()
                .map(|i| pool[i].to_string())
                .collect();
            let gold_pos = rng.gen_range(0..CANDIDATES_PER_INSTANCE);
            candidates.insert(gold_pos, gold.clone());
            instances.push(Instance::new(
                base.clone(),
                context,
                Language::En,
                candidates,
                Some(gold.clone()),
            )?);
        }
    }
    if instances.is_empty() {
        return Err(Error::Build("no synset produced an instance".into()));
    }
    Dataset::new("supplementary", Language::En, Split::Train, instances)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sense(id: &str, lemma: &str, pos: PartOfSpeech, glosses: &[&str]) -> SenseEntry {
        SenseEntry {
            sense_id: id.into(),
            lemma: lemma.into(),
            pos,
            language: Language::En,
            glosses: glosses.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn inventory() -> SenseInventory {
        let mut m = BTreeMap::new();
        m.insert(
            "bat".to_string(),
            vec![
                sense("s1", "bat", PartOfSpeech::Noun, &["g1a", "g1b", "g1c"]),
                sense("s2", "bat", PartOfSpeech::Noun, &["g2a"]),
            ],
        );
        m.insert("shorea".to_string(), vec![sense("s3", "shorea", PartOfSpeech::Noun, &["a genus"])]);
        SenseInventory::new(m).unwrap()
    }

    #[test]
    fn first_gloss_per_sense() {
        let inv = inventory();
        assert_eq!(select_glosses("bat", &inv), vec!["g1a", "g2a"]);
        assert_eq!(select_glosses("Bat", &inv), vec!["g1a", "g2a"]);
        assert!(select_glosses("unknown", &inv).is_empty());
        assert_eq!(select_glosses("shorea", &inv), vec!["a genus"]);
    }

    #[test]
    fn extra_glosses_do_not_change_selection() {
        let mut inv = inventory();
        inv.senses.get_mut("bat").unwrap()[1].glosses.push("another".into());
        assert_eq!(select_glosses("bat", &inv), vec!["g1a", "g2a"]);
    }

    #[test]
    fn inventory_json_roundtrip_and_validation() {
        let inv = inventory();
        let back = SenseInventory::from_json_str(&inv.to_json()).unwrap();
        assert_eq!(back, inv);
        let bad = r#"{"x": [{"sense_id": "a", "lemma": "x", "pos": "NOUN", "language": "en", "glosses": []}]}"#;
        assert!(SenseInventory::from_json_str(bad).is_err());
        let dup = r#"{"x": [{"sense_id": "a", "lemma": "x", "pos": "n", "language": "en", "glosses": ["g"]}],
                      "y": [{"sense_id": "a", "lemma": "y", "pos": "v", "language": "en", "glosses": ["g"]}]}"#;
        assert!(SenseInventory::from_json_str(dup).is_err());
        assert!(SenseInventory::from_json_str("[").is_err());
    }

    fn mapping(id: &str, lemma: &str, related: &str, images: &[&str]) -> ImageMapping {
        ImageMapping {
            synset_id: id.into(),
            image_ids: images.iter().map(|s| s.to_string()).collect(),
            lemmas: vec![lemma.into()],
            related: vec![RelatedSynset {
                synset_id: format!("{id}-rel"),
                lemma: related.into(),
            }],
        }
    }

    #[test]
    fn baseball_bat_context() {
        let mut resource = vec![mapping("bn:bat", "bat", "baseball", &["bat.jpg"])];
        for i in 0..9 {
            resource.push(mapping(&format!("bn:{i}"), &format!("w{i}"), "r", &[&format!("x{i}.jpg")]));
        }
        let ds = build_supplementary(&resource, 9, 0).unwrap();
        let inst = &ds.instances[0];
        assert_eq!(inst.context, "baseball bat");
        assert_eq!(inst.focus_word, "bat");
        assert_eq!(inst.gold.as_deref(), Some("bat.jpg"));
    }

    #[test]
    fn exactly_ten_images_uses_the_full_pool() {
        let resource: Vec<ImageMapping> = (0..10)
            .map(|i| mapping(&format!("s{i}"), &format!("w{i}"), "rel", &[&format!("i{i}.jpg")]))
            .collect();
        let ds = build_supplementary(&resource, 9, 4).unwrap();
        let pool: HashSet<String> = (0..10).map(|i| format!("i{i}.jpg")).collect();
        for inst in &ds.instances {
            let cands: HashSet<String> = inst.candidates.iter().cloned().collect();
            assert_eq!(cands, pool);
        }
    }

    /// Exhaustive check of every property of every built instance.
    fn check_built(resource: &[ImageMapping], ds: &Dataset) {
        let expected: usize = resource.iter().map(|m| m.image_ids.len()).sum();
        assert_eq!(ds.len(), expected);
        let mut pairs = Vec::new();
        for m in resource {
            for img in &m.image_ids {
                pairs.push((m, img));
            }
        }
        for (inst, (m, img)) in ds.instances.iter().zip(pairs) {
            assert_eq!(inst.candidates.len(), 10);
            assert_eq!(inst.candidates.iter().filter(|c| *c == img).count(), 1);
            assert_eq!(inst.gold.as_ref(), Some(img));
            for c in &inst.candidates {
                if c != img {
                    assert!(!m.image_ids.contains(c), "distractor from own synset");
                }
            }
            let uniq: HashSet<&String> = inst.candidates.iter().collect();
            assert_eq!(uniq.len(), 10);
            assert_eq!(inst.context, format!("{} {}", m.related[0].lemma, m.lemmas[0]));
            assert_eq!(inst.focus_word, m.lemmas[0]);
            inst.validate().unwrap();
        }
    }

    #[test]
    fn small_resources() {
        // three synsets of two images cannot yield ten distinct candidates
        let tiny: Vec<ImageMapping> = (0..3)
            .map(|s| mapping(&format!("s{s}"), &format!("w{s}"), "r", &[&format!("a{s}"), &format!("b{s}")]))
            .collect();
        assert!(matches!(build_supplementary(&tiny, 9, 1), Err(Error::Build(_))));

        let resource: Vec<ImageMapping> = (0..3)
            .map(|s| {
                let imgs: Vec<String> = (0..5).map(|i| format!("s{s}_{i}.jpg")).collect();
                let refs: Vec<&str> = imgs.iter().map(String::as_str).collect();
                mapping(&format!("s{s}"), &format!("w{s}"), &format!("r{s}"), &refs)
            })
            .collect();
        let ds = build_supplementary(&resource, 9, 1).unwrap();
        assert_eq!(ds.len(), 15);
        check_built(&resource, &ds);
    }

    #[test]
    fn deterministic_under_seed() {
        let resource: Vec<ImageMapping> = (0..12)
            .map(|s| mapping(&format!("s{s}"), &format!("w{s}"), "r", &[&format!("a{s}"), &format!("b{s}")]))
            .collect();
        let a = build_supplementary(&resource, 9, 42).unwrap();
        let b = build_supplementary(&resource, 9, 42).unwrap();
        let c = build_supplementary(&resource, 9, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(build_supplementary(&resource, 8, 42).is_err());
    }

    #[test]
    fn jsonl_resource() {
        let text = r#"{"synset_id":"bn:1","image_ids":["a.jpg"],"lemmas":["bat"],"related":[{"synset_id":"bn:2","lemma":"baseball"}]}

{"synset_id":"bn:3","image_ids":["b.jpg","c.jpg"],"lemmas":["club"]}
"#;
        let ms = parse_image_mappings(text).unwrap();
        assert_eq!(ms.len(), 2);
        assert!(ms[1].related.is_empty());
        let err = parse_image_mappings(r#"{"synset_id":"x","image_ids":[],"lemmas":["a"]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }
}
