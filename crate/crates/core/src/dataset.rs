//! Dataset ingestion: the tab-separated task format, gold files, dataset
//! manifests and the seeded dev split.
//!
//! A data line has 12 tab-separated fields: focus word, context, then ten
//! candidate image ids. A gold file has one image id per line, aligned with
//! the data file by line index.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Dataset, Instance, Language, Split, CANDIDATES_PER_INSTANCE};

pub const FIELDS_PER_LINE: usize = 2 + CANDIDATES_PER_INSTANCE;

pub fn load_dataset(data_path: &Path, gold_path: Option<&Path>, language: Language) -> Result<Dataset> {
    let data = fs::read_to_string(data_path).map_err(|e| Error::io(data_path, e))?;
    let gold = match gold_path {
        Some(p) => Some(fs::read_to_string(p).map_err(|e| Error::io(p, e))?),
        None => None,
    };
    let name = data_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    let mut dataset = parse_dataset(&name, &data, gold.as_deref(), language)?;
    dataset.name = name;
    Ok(dataset)
}

fn split_lines(text: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    lines
}

/// Parses dataset text (and optional gold text) already in memory.
pub fn parse_dataset(name: &str, data: &str, gold: Option<&str>, language: Language) -> Result<Dataset> {
    let lines = split_lines(data);
    let gold_lines = gold.map(split_lines);
    if let Some(g) = &gold_lines {
        if g.len() != lines.len() {
            return Err(Error::Integrity(format!(
                "{name}: data has {} lines but gold has {}",
                lines.len(),
                g.len()
            )));
        }
    }

    let mut instances = Vec::with_capacity(lines.len());
    for (idx, line) in lines.iter().enumerate() {
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != FIELDS_PER_LINE {
            return Err(Error::parse(
                name,
                lineno,
                format!("expected {FIELDS_PER_LINE} tab-separated fields, found {}", fields.len()),
            ));
        }
        if fields[0].trim().is_empty() {
            return Err(Error::parse(name, lineno, "empty focus word"));
        }
        let candidates: Vec<String> = fields[2..].iter().map(|s| s.to_string()).collect();
        let gold_id = gold_lines
            .as_ref()
            .map(|g| g[idx].trim().to_string());
        if let Some(g) = &gold_id {
            if !candidates.iter().any(|c| c == g) {
                return Err(Error::Integrity(format!(
                    "{name}:{lineno}: gold {g:?} is not among the line's candidates"
                )));
            }
        }
        let instance = Instance::new(fields[0], fields[1], language.clone(), candidates, gold_id)
            .map_err(|e| Error::parse(name, lineno, e.to_string()))?;
        instances.push(instance);
    }
    if instances.is_empty() {
        return Err(Error::parse(name, 0, "no instances"));
    }
    Dataset::new(name, language, Split::Test, instances)
}

/// Serializes a dataset back into (data text, gold text). Gold text is `None`
/// unless every instance has a gold id.
pub fn serialize_dataset(dataset: &Dataset) -> (String, Option<String>) {
    let mut data = String::new();
    for inst in &dataset.instances {
        data.push_str(&inst.focus_word);
        data.push('\t');
        data.push_str(&inst.context);
        for c in &inst.candidates {
            data.push('\t');
            data.push_str(c);
        }
        data.push('\n');
    }
    let gold = dataset.has_gold().then(|| {
        dataset
            .instances
            .iter()
            .map(|i| format!("{}\n", i.gold.as_deref().unwrap_or_default()))
            .collect()
    });
    (data, gold)
}

pub fn write_dataset(dataset: &Dataset, data_path: &Path, gold_path: Option<&Path>) -> Result<()> {
    let (data, gold) = serialize_dataset(dataset);
    fs::write(data_path, data).map_err(|e| Error::io(data_path, e))?;
    if let (Some(path), Some(gold)) = (gold_path, gold) {
        fs::write(path, gold).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Deterministically partitions `dataset` into `(train, dev)`.
///
/// The dev set has `round(fraction * N)` instances, clamped to `[1, N-1]`.
/// Both halves keep the original file order.
pub fn split_dev(dataset: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!("dev fraction must be in (0, 1), got {fraction}")));
    }
    let n = dataset.len();
    if n < 2 {
        return Err(Error::Config(format!(
            "cannot split a dataset of {n} instance(s) into train and dev"
        )));
    }
    let mut dev_size = (fraction * n as f64).round() as usize;
    if dev_size == 0 {
        log::warn!("dev fraction {fraction} of {n} instances rounds to 0; using 1");
        dev_size = 1;
    } else if dev_size >= n {
        log::warn!("dev fraction {fraction} of {n} instances leaves no training data; using {}", n - 1);
        dev_size = n - 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut in_dev = vec![false; n];
    for &i in &order[..dev_size] {
        in_dev[i] = true;
    }

    let (mut train, mut dev) = (Vec::with_capacity(n - dev_size), Vec::with_capacity(dev_size));
    for (inst, dev_member) in dataset.instances.iter().zip(in_dev) {
        if dev_member {
            dev.push(inst.clone());
        } else {
            train.push(inst.clone());
        }
    }
    let lang = dataset.language.clone();
    Ok((
        Dataset::new(format!("{}.train", dataset.name), lang.clone(), Split::Train, train)?,
        Dataset::new(format!("{}.dev", dataset.name), lang, Split::Dev, dev)?,
    ))
}

/// A seeded subset of `n` instances in file order; the whole dataset when
/// `n >= N`.
pub fn sample(dataset: &Dataset, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Config("sample size must be >= 1".into()));
    }
    if n >= dataset.len() {
        return Ok(dataset.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, dataset.len(), n).into_vec();
    picked.sort_unstable();
    let instances = picked.into_iter().map(|i| dataset.instances[i].clone()).collect();
    Dataset::new(format!("{}.sample{n}", dataset.name), dataset.language.clone(), dataset.split, instances)
}

/// One entry of a dataset manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub name: String,
    pub language: Language,
    pub split: Split,
    pub data: PathBuf,
    #[serde(default)]
    pub gold: Option<PathBuf>,
    /// Mean mask values for the segmentation system.
    #[serde(default)]
    pub masks: Option<PathBuf>,
}

/// A TOML file listing datasets:
///
/// ```toml
/// [[dataset]]
/// name = "en.test"
/// language = "en"
/// split = "test"
/// data = "en.test.data.txt"
/// gold = "en.test.gold.txt"
/// ```
///
/// Relative paths resolve against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    #[serde(rename = "dataset")]
    pub datasets: Vec<DatasetEntry>,
}

impl DatasetManifest {
    pub fn parse(text: &str) -> Result<Self> {
        let manifest: DatasetManifest =
            toml::from_str(text).map_err(|e| Error::Config(format!("dataset manifest: {e}")))?;
        if manifest.datasets.is_empty() {
            return Err(Error::Config("dataset manifest lists no datasets".into()));
        }
        Ok(manifest)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest = Self::parse(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for entry in &mut manifest.datasets {
            if entry.data.is_relative() {
                entry.data = base.join(&entry.data);
            }
            for p in [entry.gold.as_mut(), entry.masks.as_mut()].into_iter().flatten() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(manifest)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    pub fn load_all(&self) -> Result<Vec<Dataset>> {
        self.datasets
            .iter()
            .map(|entry| {
                let mut ds = load_dataset(&entry.data, entry.gold.as_deref(), entry.language.clone())?;
                ds.name = entry.name.clone();
                ds.split = entry.split;
                Ok(ds)
            })
            .collect()
    }
}
