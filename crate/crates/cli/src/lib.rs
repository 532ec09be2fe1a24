//! Command-line front end. `main_with` parses arguments, runs one command
//! and returns the process exit code:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success                                   |
//! | 1    | other failure (I/O on outputs, ...)       |
//! | 2    | configuration error                       |
//! | 3    | data error (parse, integrity, validation) |
//! | 4    | provider error (embedding, text services) |

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use vwsd::augment::{Augmenter, ContextTranslator, HttpTextGenerator, HttpTranslator, TextCache, TextGenerator, Translator};
use vwsd::config::{Strategy, SystemConfig, SystemId};
use vwsd::dataset::{load_dataset, sample, split_dev, write_dataset, DatasetEntry, DatasetManifest};
use vwsd::eval::{
    binary_weight_grid, dataset_stats, gen_sweep, grid_search, predictions_tsv, round1, EvalReport, GEN_SWEEP_COUNTS,
};
use vwsd::knowledge::{build_supplementary, load_image_mappings, SenseInventory};
use vwsd::providers::{CachedProvider, EmbeddingProvider, EmbeddingStore, HttpEmbedClient, ImageSource, MockProvider};
use vwsd::rankers::{load_mask_values, resolve, DatasetRun, Engine, MaskValues};
use vwsd::testkit::{
    make_fixture_dataset, mock_mask_value, FIXTURE_DIM, MockServer, MockServerConfig, MockTextGenerator, MockTranslator, PlantedSignal,
    FIXTURE_L_MODEL, FIXTURE_VL_MODEL,
};
use vwsd::wire::HttpClient;
use vwsd::{Dataset, Error, ErrorClass, Language, Result, Split, Weights};

pub const PREDICTIONS_FILE: &str = "predictions.tsv";
pub const REPORT_FILE: &str = "report.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "vwsd", version, about = "Rank candidate images for a word in context")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank every dataset and write predictions, a report and a run manifest.
    Run {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the seven binary weight settings.
    Grid {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// Evaluate on a seeded sample of this many instances.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Accuracy of generated-image matching for 1, 5, 10 and 15 images.
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sense coverage, polysemy and noun fraction of datasets.
    Stats {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        inventory: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fill the definition cache for every context.
    Augment {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Build silver instances from a synset-to-image resource (JSON lines).
    Synth {
        #[arg(long)]
        resource: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "supplementary")]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a labelled dataset into train and dev.
    Split {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 0.1)]
        fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic dataset with a planted signal, its embeddings,
    /// inventory, config and manifest.
    Fixture {
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// ic | ig | noise
        #[arg(long, default_value = "ic")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the deterministic mock inference protocol.
    ServeMock {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        dim: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset manifest (TOML list of datasets).
    #[arg(long, conflicts_with = "data")]
    pub manifest: Option<PathBuf>,
    /// Data file (12 tab-separated fields per line).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Gold file, one image id per line.
    #[arg(long, requires = "data")]
    pub gold: Option<PathBuf>,
    /// Language of --data.
    #[arg(long, default_value = "en")]
    pub lang: String,
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    /// System configuration (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// tr | tr-def | langspec | gen | gen-def | seg | seg-def
    #[arg(long)]
    pub system: Option<String>,
    /// w_ic,w_ig,w_cg
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for scoring.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Use deterministic in-process encoders and text services.
    #[arg(long)]
    pub mock: bool,
    /// Inference service base URL (embed, generate and translate).
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub inventory: Option<PathBuf>,
    /// Definition cache (TSV).
    #[arg(long)]
    pub definitions: Option<PathBuf>,
    /// Translation cache (TSV).
    #[arg(long)]
    pub translations: Option<PathBuf>,
    /// Mean mask values (TSV) for the segmentation system.
    #[arg(long)]
    pub masks: Option<PathBuf>,
    /// Embedding store with generated-image vectors.
    #[arg(long)]
    pub generated: Option<PathBuf>,
    /// Directory of candidate image files.
    #[arg(long)]
    pub images: Option<PathBuf>,
    #[arg(long)]
    pub max_input_chars: Option<usize>,
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e.class() {
            ErrorClass::Config => 2,
            ErrorClass::Data => 3,
            ErrorClass::Provider => 4,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn other(message: String) -> CliError {
    CliError { code: 1, message }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_command(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn run_command(command: Command) -> CliResult<()> {
    match command {
        Command::Run { data, engine, out } => cmd_run(&data, &engine, &out),
        Command::Grid {
            data,
            engine,
            sample,
            out,
        } => cmd_grid(&data, &engine, sample, out.as_deref()),
        Command::Sweep { data, engine, out } => cmd_sweep(&data, &engine, out.as_deref()),
        Command::Stats {
            data,
            inventory,
            seed,
            out,
        } => cmd_stats(&data, inventory.as_deref(), seed, out.as_deref()),
        Command::Augment { data, engine } => cmd_augment(&data, &engine),
        Command::Synth {
            resource,
            seed,
            name,
            out,
        } => cmd_synth(&resource, seed, &name, &out),
        Command::Split {
            data,
            fraction,
            seed,
            out,
        } => cmd_split(&data, fraction, seed, &out),
        Command::Fixture { n, mode, seed, out } => cmd_fixture(n, &mode, seed, &out),
        Command::ServeMock { addr, seed, dim } => cmd_serve_mock(&addr, seed, dim),
    }
}

// ---- inputs ---------------------------------------------------------------

pub struct LoadedData {
    pub datasets: Vec<Dataset>,
    pub entries: Vec<DatasetEntry>,
}

pub fn load_data(args: &DataArgs) -> Result<LoadedData> {
    let entries = match (&args.manifest, &args.data) {
        (Some(m), None) => DatasetManifest::load(m)?.datasets,
        (None, Some(data)) => {
            let name = data
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "data".into());
            vec![DatasetEntry {
                name,
                language: args.lang.parse()?,
                split: Split::Test,
                data: data.clone(),
                gold: args.gold.clone(),
                masks: None,
            }]
        }
        _ => return Err(Error::Config("give either --manifest or --data".into())),
    };
    let datasets = entries
        .iter()
        .map(|e| {
            let mut ds = load_dataset(&e.data, e.gold.as_deref(), e.language.clone())?;
            ds.name = e.name.clone();
            ds.split = e.split;
            Ok(ds)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LoadedData { datasets, entries })
}

/// Config file (if any) with command-line overrides applied.
pub fn build_config(args: &EngineArgs) -> Result<SystemConfig> {
    let mut cfg = match &args.config {
        Some(path) => SystemConfig::load(path).map_err(|e| match e {
            Error::Io { path, source } => Error::Config(format!("{}: {source}", path.display())),
            other => other,
        })?,
        None => SystemConfig::default(),
    };
    if let Some(s) = &args.system {
        cfg.system = s.parse()?;
    }
    if let Some(w) = &args.weights {
        cfg.weights = Some(w.parse::<Weights>()?);
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(url) = &args.endpoint {
        cfg.endpoints.embed = Some(url.clone());
        cfg.endpoints.generate = Some(url.clone());
        cfg.endpoints.translate = Some(url.clone());
    }
    if args.max_input_chars.is_some() {
        cfg.max_input_chars = args.max_input_chars;
    }
    let p = &mut cfg.paths;
    for (slot, flag) in [
        (&mut p.cache_dir, &args.cache_dir),
        (&mut p.inventory, &args.inventory),
        (&mut p.definitions, &args.definitions),
        (&mut p.translations, &args.translations),
        (&mut p.masks, &args.masks),
        (&mut p.generated, &args.generated),
        (&mut p.images, &args.images),
    ] {
        if flag.is_some() {
            slot.clone_from(flag);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn text_cache(path: Option<&Path>) -> Result<TextCache> {
    match path {
        Some(p) => TextCache::open(p),
        None => Ok(TextCache::in_memory()),
    }
}

/// Wires caches, services and inventory for `config`. Mask values are
/// attached per dataset.
pub fn build_engine(config: &SystemConfig, mock: bool, jobs: usize, data: &LoadedData) -> Result<Engine> {
    let images = match &config.paths.images {
        Some(dir) => ImageSource::Directory(dir.clone()),
        None => ImageSource::IdBytes,
    };
    let upstream: Option<Arc<dyn EmbeddingProvider>> = if mock {
        Some(Arc::new(MockProvider {
            images,
            ..MockProvider::new(config.seed, config.mock_dim)
        }))
    } else {
        config
            .endpoints
            .embed
            .as_ref()
            .map(|url| Arc::new(HttpEmbedClient::new(HttpClient::new(url.clone()), images)) as Arc<dyn EmbeddingProvider>)
    };
    let cache = match &config.paths.cache_dir {
        Some(dir) => CachedProvider::open(dir, upstream)?,
        None => CachedProvider::in_memory(upstream),
    };
    if let Some(path) = &config.paths.generated {
        if !path.exists() {
            return Err(Error::Config(format!("generated-image store {} does not exist", path.display())));
        }
        cache.add_store(EmbeddingStore::open(path.clone())?)?;
    }

    let generator: Option<Arc<dyn TextGenerator>> = if mock {
        Some(Arc::new(MockTextGenerator))
    } else {
        config
            .endpoints
            .generate
            .as_ref()
            .map(|u| Arc::new(HttpTextGenerator(HttpClient::new(u.clone()))) as Arc<dyn TextGenerator>)
    };
    let translator: Option<Arc<dyn Translator>> = if mock {
        Some(Arc::new(MockTranslator))
    } else {
        config
            .endpoints
            .translate
            .as_ref()
            .map(|u| Arc::new(HttpTranslator(HttpClient::new(u.clone()))) as Arc<dyn Translator>)
    };
    let augmenter = Augmenter::new(text_cache(config.paths.definitions.as_deref())?, generator)
        .with_batch_size(config.augment_batch_size);
    let translator = ContextTranslator::new(text_cache(config.paths.translations.as_deref())?, translator);

    let mut engine = Engine::new(config.clone(), Arc::new(cache), jobs)?
        .with_augmenter(Arc::new(augmenter))
        .with_translator(Arc::new(translator));
    if let Some(path) = &config.paths.inventory {
        engine = engine.with_inventory(Arc::new(SenseInventory::load(path)?));
    }

    if config.system.strategy == Strategy::Seg {
        for (ds, entry) in data.datasets.iter().zip(&data.entries) {
            let path = entry
                .masks
                .clone()
                .or_else(|| (data.datasets.len() == 1).then(|| config.paths.masks.clone()).flatten());
            let values = match path {
                Some(p) => load_mask_values(&p)?,
                None if mock => mock_masks(ds, config.seed),
                None => {
                    return Err(Error::Config(format!(
                        "the seg system needs mask values for dataset {:?} (--masks or manifest `masks`)",
                        ds.name
                    )))
                }
            };
            engine = engine.with_masks(ds.name.clone(), Arc::new(values));
        }
    }
    Ok(engine)
}

fn mock_masks(ds: &Dataset, seed: u64) -> MaskValues {
    ds.instances
        .iter()
        .enumerate()
        .map(|(k, inst)| {
            let values = inst
                .candidates
                .iter()
                .map(|c| (c.clone(), mock_mask_value(&inst.context, c, seed)))
                .collect();
            (k, values)
        })
        .collect()
}

// ---- outputs --------------------------------------------------------------

/// Writes `files` under `dir`; on any failure removes whatever was written.
fn write_outputs(dir: &Path, files: &[(&str, String)]) -> CliResult<()> {
    let created_dir = !dir.exists();
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        for (name, content) in files {
            let path = dir.join(name);
            fs::write(&path, content)?;
            written.push(path);
        }
        Ok(())
    })();
    if let Err(e) = result {
        for p in &written {
            let _ = fs::remove_file(p);
        }
        if created_dir {
            let _ = fs::remove_dir(dir);
        }
        return Err(other(format!("writing outputs under {}: {e}", dir.display())));
    }
    Ok(())
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    config_path: Option<String>,
    dataset_manifest: Option<String>,
    datasets: Vec<ManifestDataset>,
    out_dir: String,
    system: String,
    seed: u64,
    jobs: usize,
    mock: bool,
    started_at: String,
    finished_at: String,
    versions: BTreeMap<&'static str, &'static str>,
}

#[derive(Serialize)]
struct ManifestDataset {
    name: String,
    language: String,
    split: String,
    data: String,
    gold: Option<String>,
    instances: usize,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn versions() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([("vwsd", vwsd::VERSION), ("vwsd-cli", env!("CARGO_PKG_VERSION"))])
}

// ---- commands -------------------------------------------------------------

pub fn cmd_run(data_args: &DataArgs, engine_args: &EngineArgs, out: &Path) -> CliResult<()> {
    let started_at = now();
    let config = build_config(engine_args)?;
    let data = load_data(data_args)?;
    let engine = build_engine(&config, engine_args.mock, engine_args.jobs, &data)?;
    let runs: Vec<DatasetRun> = data.datasets.iter().map(|d| engine.run(d)).collect::<Result<_>>()?;
    let names: Vec<String> = data.datasets.iter().map(|d| d.name.clone()).collect();
    let report = EvalReport::build(&config, &runs, &names)?;

    let manifest = RunManifest {
        command: "run",
        config_path: engine_args.config.as_ref().map(|p| p.display().to_string()),
        dataset_manifest: data_args.manifest.as_ref().map(|p| p.display().to_string()),
        datasets: data
            .entries
            .iter()
            .zip(&data.datasets)
            .map(|(e, d)| ManifestDataset {
                name: e.name.clone(),
                language: e.language.to_string(),
                split: format!("{:?}", e.split).to_lowercase(),
                data: e.data.display().to_string(),
                gold: e.gold.as_ref().map(|g| g.display().to_string()),
                instances: d.len(),
            })
            .collect(),
        out_dir: out.display().to_string(),
        system: config.system.to_string(),
        seed: config.seed,
        jobs: engine.jobs(),
        mock: engine_args.mock,
        started_at,
        finished_at: now(),
        versions: versions(),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_outputs(
        out,
        &[
            (PREDICTIONS_FILE, predictions_tsv(&runs)),
            (REPORT_FILE, report.to_json()),
            (MANIFEST_FILE, manifest_json),
        ],
    )?;
    print!("{}", report.to_table());
    Ok(())
}

pub fn cmd_grid(data_args: &DataArgs, engine_args: &EngineArgs, sample_size: Option<usize>, out: Option<&Path>) -> CliResult<()> {
    let config = build_config(engine_args)?;
    if !matches!(config.system.strategy, Strategy::Tr | Strategy::LangSpec) {
        return Err(Error::Config(format!("grid search needs a weighted system, not {}", config.system)).into());
    }
    let data = load_data(data_args)?;
    let engine = build_engine(&config, engine_args.mock, engine_args.jobs, &data)?;
    let mut tables_out = String::new();
    let mut json = BTreeMap::new();
    for ds in &data.datasets {
        let ds = match sample_size {
            Some(n) => sample(ds, n, config.seed)?,
            None => ds.clone(),
        };
        let preset = resolve(&config, &ds.language)?;
        let (instances, _) = engine.prepare(&ds, &preset)?;
        let (tables, _) = engine.tables(&instances, &preset.models, true)?;
        let rows = grid_search(&tables, &instances, &binary_weight_grid())?;
        tables_out.push_str(&format!("{} (n={})\n{:>5} {:>5} {:>5}  {:>6}  {:>6}\n", ds.name, ds.len(), "w_ic", "w_ig", "w_cg", "acc", "mrr"));
        for r in &rows {
            tables_out.push_str(&format!(
                "{:>5} {:>5} {:>5}  {:>6.1}  {:>6.1}\n",
                r.weights.ic,
                r.weights.ig,
                r.weights.cg,
                round1(r.accuracy * 100.0),
                round1(r.mrr * 100.0)
            ));
        }
        json.insert(ds.name.clone(), rows);
    }
    print!("{tables_out}");
    if let Some(dir) = out {
        let j = serde_json::to_string_pretty(&json).expect("grid serializes") + "\n";
        write_outputs(dir, &[("grid.json", j), ("grid.txt", tables_out)])?;
    }
    Ok(())
}

pub fn cmd_sweep(data_args: &DataArgs, engine_args: &EngineArgs, out: Option<&Path>) -> CliResult<()> {
    let mut config = build_config(engine_args)?;
    if config.system.strategy != Strategy::Gen {
        config.system = SystemId::new(Strategy::Gen, config.system.def);
    }
    let max = *GEN_SWEEP_COUNTS.iter().max().expect("nonempty");
    let data = load_data(data_args)?;
    let engine = build_engine(&config, engine_args.mock, engine_args.jobs, &data)?;
    let mut text = String::new();
    let mut json = BTreeMap::new();
    for ds in &data.datasets {
        let preset = resolve(&config, &ds.language)?;
        let (instances, _) = engine.prepare(ds, &preset)?;
        let inputs = engine.gen_inputs(&instances, &preset.models, max)?;
        let points = gen_sweep(&inputs, &instances, &GEN_SWEEP_COUNTS, config.gen.aggregation)?;
        text.push_str(&format!("{} (n={})\n", ds.name, ds.len()));
        for p in &points {
            text.push_str(&format!("images={:>2}  acc={:.1}\n", p.count, round1(p.accuracy * 100.0)));
        }
        json.insert(ds.name.clone(), points);
    }
    print!("{text}");
    if let Some(dir) = out {
        let j = serde_json::to_string_pretty(&json).expect("sweep serializes") + "\n";
        write_outputs(dir, &[("sweep.json", j)])?;
    }
    Ok(())
}

pub fn cmd_stats(data_args: &DataArgs, inventory: Option<&Path>, _seed: u64, out: Option<&Path>) -> CliResult<()> {
    let inventory = inventory.ok_or_else(|| Error::Config("stats needs --inventory".into()))?;
    let inventory = SenseInventory::load(inventory)?;
    let data = load_data(data_args)?;
    let mut json = BTreeMap::new();
    for ds in &data.datasets {
        let s = dataset_stats(&ds.instances, &inventory)?;
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
        println!(
            "{}: n={} coverage={:.3} mean_polysemy={} noun_fraction={}",
            ds.name,
            s.instances,
            s.coverage,
            opt(s.mean_polysemy),
            opt(s.noun_fraction)
        );
        json.insert(ds.name.clone(), s);
    }
    if let Some(dir) = out {
        let j = serde_json::to_string_pretty(&json).expect("stats serialize") + "\n";
        write_outputs(dir, &[("stats.json", j)])?;
    }
    Ok(())
}

pub fn cmd_augment(data_args: &DataArgs, engine_args: &EngineArgs) -> CliResult<()> {
    let config = build_config(engine_args)?;
    if config.paths.definitions.is_none() {
        return Err(Error::Config("augment needs a definition cache (--definitions)".into()).into());
    }
    let data = load_data(data_args)?;
    let engine = build_engine(&config, engine_args.mock, engine_args.jobs, &data)?;
    let augmenter = engine.augmenter.clone().expect("engine has an augmenter");
    for ds in &data.datasets {
        let preset = resolve(&SystemConfig { system: SystemId::new(Strategy::Tr, true), ..config.clone() }, &ds.language)?;
        let mut instances = ds.instances.clone();
        if preset.translate {
            instances = engine.translator.as_ref().expect("engine has a translator").translate_batch(&instances)?;
        }
        augmenter.augment_batch(&instances)?;
        println!("{}: {} contexts defined", ds.name, instances.len());
    }
    println!("generation requests: {}", augmenter.service_calls());
    Ok(())
}

pub fn cmd_synth(resource: &Path, seed: u64, name: &str, out: &Path) -> CliResult<()> {
    let mappings = load_image_mappings(resource)?;
    let mut ds = build_supplementary(&mappings, vwsd::CANDIDATES_PER_INSTANCE - 1, seed)?;
    ds.name = name.to_string();
    let data_name = format!("{name}.data.txt");
    let gold_name = format!("{name}.gold.txt");
    let (data, gold) = vwsd::dataset::serialize_dataset(&ds);
    let manifest = DatasetManifest {
        datasets: vec![DatasetEntry {
            name: name.to_string(),
            language: ds.language.clone(),
            split: ds.split,
            data: data_name.clone().into(),
            gold: Some(gold_name.clone().into()),
            masks: None,
        }],
    };
    write_outputs(
        out,
        &[
            (&data_name, data),
            (&gold_name, gold.expect("supplementary instances are labelled")),
            ("manifest.toml", manifest.to_toml()),
        ],
    )?;
    println!("{} instances written to {}", ds.len(), out.display());
    Ok(())
}

pub fn cmd_split(data_args: &DataArgs, fraction: f64, seed: u64, out: &Path) -> CliResult<()> {
    let data = load_data(data_args)?;
    fs::create_dir_all(out).map_err(|e| other(format!("{}: {e}", out.display())))?;
    for ds in &data.datasets {
        let (train, dev) = split_dev(ds, fraction, seed)?;
        for part in [&train, &dev] {
            let data_path = out.join(format!("{}.data.txt", part.name));
            let gold_path = out.join(format!("{}.gold.txt", part.name));
            write_dataset(part, &data_path, part.has_gold().then_some(gold_path.as_path()))?;
        }
        println!("{}: train {} / dev {}", ds.name, train.len(), dev.len());
    }
    Ok(())
}

pub fn cmd_fixture(n: usize, mode: &str, seed: u64, out: &Path) -> CliResult<()> {
    let mode: PlantedSignal = mode.parse()?;
    let f = make_fixture_dataset(n, mode, seed)?;
    let (data, gold) = vwsd::dataset::serialize_dataset(&f.dataset);
    let manifest = DatasetManifest {
        datasets: vec![DatasetEntry {
            name: f.dataset.name.clone(),
            language: Language::En,
            split: f.dataset.split,
            data: "fixture.data.txt".into(),
            gold: Some("fixture.gold.txt".into()),
            masks: None,
        }],
    };
    let mut config = SystemConfig {
        seed,
        mock_dim: FIXTURE_DIM,
        ..SystemConfig::default()
    };
    config.models.insert(Language::En, vwsd::config::ModelPair::new(FIXTURE_VL_MODEL, FIXTURE_L_MODEL));
    config.paths.inventory = Some("inventory.json".into());
    config.paths.generated = Some("fixture.vwse".into());
    let store = f.store.to_bytes()?;
    write_outputs(
        out,
        &[
            ("fixture.data.txt", data),
            ("fixture.gold.txt", gold.expect("fixtures are labelled")),
            ("inventory.json", f.inventory.to_json()),
            ("manifest.toml", manifest.to_toml()),
            ("config.toml", config.to_toml()),
        ],
    )?;
    fs::write(out.join("fixture.vwse"), store).map_err(|e| other(format!("{}: {e}", out.display())))?;
    println!("{n} {mode:?} instances written to {}", out.display());
    Ok(())
}

pub fn cmd_serve_mock(addr: &str, seed: u64, dim: usize) -> CliResult<()> {
    let server = MockServer::bind(
        addr,
        MockServerConfig {
            seed,
            dim,
            ..Default::default()
        },
    )?;
    println!("mock inference service on {}", server.url());
    server.wait();
    Ok(())
}
