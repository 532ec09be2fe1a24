//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vwsd::augment::{augmented_text, build_prompt, parse_definitions, Augmenter, TextCache, TextGenerator, PROMPT_HEADER};
use vwsd::config::{default_registry, GenAggregation, ModelPair, Strategy, SystemConfig, SystemId};
use vwsd::dataset::serialize_dataset;
use vwsd::eval::{binary_weight_grid, gen_sweep, grid_search, hit_rate, macro_average, mrr, round1, GEN_SWEEP_COUNTS};
use vwsd::knowledge::{build_supplementary, ImageMapping, RelatedSynset};
use vwsd::providers::{cosine, CachedProvider, EmbeddingVector, HttpEmbedClient, ImageSource, Modality, MockProvider};
use vwsd::rankers::{gen_score, preset, rank_order, score_instance, seg_select, Engine, Prediction};
use vwsd::testkit::{
    make_fixture_dataset, mock_embed, MockServer, MockServerConfig, PlantedSignal, FIXTURE_L_MODEL, FIXTURE_VL_MODEL,
};
use vwsd::wire::HttpClient;
use vwsd::{Instance, Language, Result as VResult, Weights};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

fn lib<T>(r: VResult<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---- 1 --------------------------------------------------------------------

fn oracle_cos(a: &[f32], b: &[f32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum();
    let na: f64 = a.iter().map(|&x| f64::from(x) * f64::from(x)).sum();
    let nb: f64 = b.iter().map(|&x| f64::from(x) * f64::from(x)).sum();
    dot / (na.sqrt() * nb.sqrt())
}

fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f32> {
    (0..dim).map(|_| rng.gen_range(-1.0f32..1.0)).collect()
}

fn random_weight(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..4) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen_range(0.0..3.0),
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let dim = rng.gen_range(1..=16);
        let n_glosses = rng.gen_range(0..=8);
        let candidates: Vec<String> = (0..10).map(|i| format!("img{i}")).collect();
        let gold = candidates[rng.gen_range(0..10)].clone();
        let inst = Instance::new("w", "some w", Language::En, candidates.clone(), Some(gold)).map_err(|e| e.to_string())?;
        let glosses: Vec<String> = (0..n_glosses).map(|g| format!("gloss {g}")).collect();

        let mut vl: HashMap<String, Vec<f32>> = HashMap::new();
        let mut l: HashMap<String, Vec<f32>> = HashMap::new();
        for key in candidates.iter().chain(&glosses).chain(std::iter::once(&inst.context)) {
            vl.insert(key.clone(), random_vec(&mut rng, dim));
            l.insert(key.clone(), random_vec(&mut rng, dim));
        }
        let w = loop {
            if let Ok(w) = Weights::new(random_weight(&mut rng), random_weight(&mut rng), random_weight(&mut rng)) {
                break w;
            }
        };

        let sim_vl = |i: &str, t: &str| Ok(oracle_cos(&vl[i], &vl[t]));
        let sim_l = |a: &str, b: &str| Ok(oracle_cos(&l[a], &l[b]));
        let got = score_instance(&inst, &glosses, &w, sim_vl, sim_l).map_err(|e| e.to_string())?;

        // brute force: best of {0} and every gloss term, plus the context term
        let expected: Vec<f64> = candidates
            .iter()
            .map(|i| {
                let mut best = 0.0f64;
                for g in &glosses {
                    let term = w.ig * oracle_cos(&vl[i], &vl[g]) + w.cg * oracle_cos(&l[&inst.context], &l[g]);
                    if term > best {
                        best = term;
                    }
                }
                best + w.ic * oracle_cos(&vl[i], &vl[&inst.context])
            })
            .collect();
        let totals = got.totals();
        for (a, b) in totals.iter().zip(&expected) {
            worst = worst.max((a - b).abs());
        }
        ensure!(worst <= 1e-9, "case {case}: totals differ by {worst}");

        let mut brute: Vec<(usize, String)> = candidates
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let ahead = (0..10)
                    .filter(|&k| expected[k] > expected[j] || (expected[k] == expected[j] && k < j))
                    .count();
                (ahead, c.clone())
            })
            .collect();
        brute.sort();
        let brute: Vec<String> = brute.into_iter().map(|(_, c)| c).collect();
        let pred = Prediction::from_totals(case, &inst, &totals).map_err(|e| e.to_string())?;
        ensure!(pred.ranking == brute, "case {case}: ranking {:?} != {:?}", pred.ranking, brute);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!("1000 instances, max |diff| {worst:.1e}, {:.2}s", elapsed.as_secs_f64()))
}

// ---- 2 --------------------------------------------------------------------

fn fixture_grid(n: usize, mode: PlantedSignal, seed: u64) -> VResult<Vec<vwsd::eval::GridRow>> {
    let f = make_fixture_dataset(n, mode, seed)?;
    let cache = CachedProvider::in_memory(None);
    cache.add_store(f.store)?;
    let mut config = SystemConfig::default();
    config.models.insert(Language::En, ModelPair::new(FIXTURE_VL_MODEL, FIXTURE_L_MODEL));
    let engine = Engine::new(config.clone(), Arc::new(cache), 4)?.with_inventory(Arc::new(f.inventory));
    let preset = vwsd::rankers::resolve(&config, &Language::En)?;
    let (instances, _) = engine.prepare(&f.dataset, &preset)?;
    let (tables, _) = engine.tables(&instances, &preset.models, true)?;
    grid_search(&tables, &instances, &binary_weight_grid())
}

fn criterion_2() -> Outcome {
    ensure!(binary_weight_grid().len() == 7, "grid has {} rows", binary_weight_grid().len());
    let rows = lib(fixture_grid(300, PlantedSignal::ImageContext, 2))?;
    ensure!(rows.len() == 7, "ic grid returned {} rows", rows.len());
    for r in &rows {
        if r.weights.ic == 1.0 {
            ensure!(r.accuracy == 1.0, "ic row {:?} accuracy {}", r.weights, r.accuracy);
        }
    }
    let row_011 = rows
        .iter()
        .find(|r| r.weights == Weights::new(0.0, 1.0, 1.0).unwrap())
        .ok_or("row (0,1,1) missing")?;
    ensure!(row_011.accuracy < 1.0, "row (0,1,1) accuracy {}", row_011.accuracy);

    let n = 2000;
    let rows = lib(fixture_grid(n, PlantedSignal::Noise, 3))?;
    ensure!(rows.len() == 7, "noise grid returned {} rows", rows.len());
    let sigma = (0.1f64 * 0.9 / n as f64).sqrt();
    for r in &rows {
        ensure!(
            (r.accuracy - 0.1).abs() <= 3.0 * sigma,
            "noise row {:?} accuracy {} outside 0.1 ± {:.4}",
            r.weights,
            r.accuracy,
            3.0 * sigma
        );
    }
    let accs: Vec<String> = rows.iter().map(|r| format!("{:.3}", r.accuracy)).collect();
    Ok(format!("ic (0,1,1)={:.3}; noise accuracies [{}], 3σ={:.4}", row_011.accuracy, accs.join(", "), 3.0 * sigma))
}

// ---- 3 --------------------------------------------------------------------

fn criterion_3() -> Outcome {
    let avg = |xs: [f64; 3]| -> Result<f64, String> {
        let m: BTreeMap<&str, f64> = ["en", "fa", "it"].into_iter().zip(xs).collect();
        Ok(round1(lib(macro_average(&m))?))
    };
    let tr = avg([61.1, 59.3, 43.0])?;
    let tr_def = avg([69.1, 63.3, 40.0])?;
    ensure!(tr == 54.5, "Tr macro average {tr}");
    ensure!(tr_def == 57.5, "Tr+Def macro average {tr_def}");
    Ok(format!("Tr {tr}, Tr+Def {tr_def}"))
}

// ---- 4 --------------------------------------------------------------------

fn prediction_with_gold_rank(k: usize, rank: usize) -> Prediction {
    let candidates: Vec<String> = (0..10).map(|i| format!("c{i}")).collect();
    let inst = Instance::new("w", "w", Language::En, candidates, Some(format!("c{}", rank - 1))).unwrap();
    let totals: Vec<f64> = (0..10).map(|i| 10.0 - i as f64).collect();
    Prediction::from_totals(k, &inst, &totals).unwrap()
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for set in 0..500 {
        let n = rng.gen_range(1..=40);
        let preds: Vec<Prediction> = (0..n)
            .map(|k| {
                let candidates: Vec<String> = (0..10).map(|i| format!("c{i}")).collect();
                let gold = candidates[rng.gen_range(0..10)].clone();
                let inst = Instance::new("w", "w", Language::En, candidates, Some(gold)).unwrap();
                let totals: Vec<f64> = (0..10).map(|_| f64::from(rng.gen_range(0u8..5))).collect();
                Prediction::from_totals(k, &inst, &totals).unwrap()
            })
            .collect();
        let (h, m) = (lib(hit_rate(&preds))?, lib(mrr(&preds))?);
        ensure!(m >= h, "set {set}: mrr {m} < hit rate {h}");
    }
    let hand: Vec<Prediction> = [1, 2, 4]
        .iter()
        .enumerate()
        .map(|(k, &r)| prediction_with_gold_rank(k, r))
        .collect();
    let m = lib(mrr(&hand))?;
    ensure!((m - 0.583333).abs() <= 1e-6, "ranks [1,2,4] give MRR {m}");
    Ok(format!("500 sets hold mrr >= hit; ranks [1,2,4] -> {m:.6}"))
}

// ---- 5 --------------------------------------------------------------------

fn criterion_5() -> Outcome {
    let reg = default_registry();
    for lang in [Language::En, Language::It, Language::Fa] {
        let tr = lib(preset(SystemId::new(Strategy::Tr, false), &lang, &reg))?;
        ensure!(tr.weights == Some(Weights::ALL_ONES), "Tr/{lang} weights {:?}", tr.weights);
        let def = lib(preset(SystemId::new(Strategy::Tr, true), &lang, &reg))?;
        ensure!(
            def.weights == Some(Weights::new(1.0, 0.0, 0.0).unwrap()),
            "Tr+Def/{lang} weights {:?}",
            def.weights
        );
        ensure!(def.augment, "Tr+Def/{lang} does not augment");
        ensure!(
            preset(SystemId::new(Strategy::LangSpec, true), &lang, &reg).is_err(),
            "LangSpec+Def/{lang} accepted"
        );
    }
    Ok("Tr=(1,1,1), Tr+Def=(1,0,0), LangSpec+Def rejected".into())
}

// ---- 6 --------------------------------------------------------------------

/// Answers prompts from a fixed table, in reverse order and with noise lines.
struct TableGenerator(BTreeMap<String, String>);

impl TextGenerator for TableGenerator {
    fn generate(&self, prompt: &str) -> VResult<String> {
        let mut lines: Vec<String> = prompt
            .lines()
            .skip(1)
            .map(|c| format!("{c}: {}", self.0[c]))
            .collect();
        lines.reverse();
        lines.insert(0, "Sure, here are the definitions.".into());
        Ok(lines.join("\n"))
    }
}

fn criterion_6() -> Outcome {
    let table: BTreeMap<String, String> = (0..50)
        .map(|k| (format!("word{k} thing{k}"), format!("a thing number {k}, sometimes: called w{k}")))
        .collect();
    let contexts: Vec<String> = table.keys().cloned().collect();

    let prompt = lib(build_prompt(&contexts))?;
    ensure!(prompt.lines().next() == Some(PROMPT_HEADER), "prompt header missing");
    let echoed: Vec<String> = prompt.lines().skip(1).map(str::to_string).collect();
    ensure!(echoed == contexts, "prompt does not list the contexts in order");
    let response = lib(TableGenerator(table.clone()).generate(&prompt))?;
    let parsed = lib(parse_definitions(&response, &contexts))?;
    ensure!(parsed == table, "parsed {} of 50 definitions correctly", parsed.iter().filter(|(k, v)| table.get(*k) == Some(v)).count());

    let aug = Augmenter::new(TextCache::in_memory(), Some(Arc::new(TableGenerator(table.clone())))).with_batch_size(20);
    let instances: Vec<Instance> = contexts
        .iter()
        .map(|c| {
            let focus = c.split(' ').nth(1).unwrap();
            Instance::new(focus, c.as_str(), Language::En, (0..10).map(|i| format!("i{i}")).collect(), None).unwrap()
        })
        .collect();
    let out = lib(aug.augment_batch(&instances))?;
    for inst in &out {
        let want = format!("{}: {}", inst.context, table[&inst.context]);
        ensure!(inst.augmented_context.as_deref() == Some(want.as_str()), "augmented {:?}", inst.augmented_context);
    }
    ensure!(aug.service_calls() == 3, "{} generation calls for 50 contexts in batches of 20", aug.service_calls());

    let bat = augmented_text("baseball bat", "a club used for hitting a ball in baseball");
    ensure!(bat == "baseball bat: a club used for hitting a ball in baseball", "got {bat:?}");
    Ok("50/50 definitions recovered; \"context: definition\" form holds".into())
}

// ---- 7 --------------------------------------------------------------------

fn toy_resource() -> Vec<ImageMapping> {
    (0..20)
        .map(|s| ImageMapping {
            synset_id: format!("bn:{s:08}n"),
            image_ids: vec![format!("syn{s}_a.jpg"), format!("syn{s}_b.jpg")],
            lemmas: vec![format!("lemma{s}"), format!("alt{s}")],
            related: vec![
                RelatedSynset {
                    synset_id: format!("bn:{:08}n", (s + 1) % 20),
                    lemma: format!("rel{s}x"),
                },
                RelatedSynset {
                    synset_id: format!("bn:{:08}n", (s + 2) % 20),
                    lemma: format!("rel{s}y"),
                },
            ],
        })
        .collect()
}

fn criterion_7() -> Outcome {
    let resource = toy_resource();
    let a = lib(build_supplementary(&resource, 9, 7))?;
    let b = lib(build_supplementary(&resource, 9, 7))?;
    ensure!(a.len() == 40, "{} instances from 40 images", a.len());
    for (k, inst) in a.instances.iter().enumerate() {
        ensure!(inst.candidates.len() == 10, "instance {k} has {} candidates", inst.candidates.len());
        let gold = inst.gold.as_deref().ok_or(format!("instance {k} has no gold"))?;
        let hits = inst.candidates.iter().filter(|c| c.as_str() == gold).count();
        ensure!(hits == 1, "instance {k}: gold appears {hits} times");
        let words: Vec<&str> = inst.context.split(' ').collect();
        ensure!(words.len() == 2, "instance {k} context {:?}", inst.context);
        ensure!(words[0].starts_with("rel") && words[1] == inst.focus_word, "instance {k} context {:?}", inst.context);
        let synset: usize = words[1].trim_start_matches("lemma").parse().map_err(|_| format!("focus {:?}", words[1]))?;
        ensure!(gold.starts_with(&format!("syn{synset}_")), "instance {k}: gold {gold} not from synset {synset}");
    }
    ensure!(serialize_dataset(&a) == serialize_dataset(&b), "two seeded runs differ");
    Ok("40 instances, 10 candidates, one gold, related-lemma contexts, stable bytes".into())
}

// ---- 8 --------------------------------------------------------------------

fn run_cli(args: &[&str]) -> Result<(), String> {
    let mut argv = vec!["vwsd"];
    argv.extend_from_slice(args);
    match vwsd_cli::main_with(argv) {
        0 => Ok(()),
        code => Err(format!("vwsd {} exited {code}", args.join(" "))),
    }
}

fn read(dir: &Path, name: &str) -> Result<Vec<u8>, String> {
    std::fs::read(dir.join(name)).map_err(|e| format!("{}: {e}", dir.join(name).display()))
}

fn criterion_8() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fx = tmp.path().join("fixture");
    let fx_s = fx.to_str().unwrap();
    run_cli(&["fixture", "--n", "100", "--mode", "ic", "--seed", "8", "--out", fx_s])?;
    let manifest = fx.join("manifest.toml");
    let config = fx.join("config.toml");

    let start = Instant::now();
    let mut outputs = Vec::new();
    for (tag, jobs) in [("a", "1"), ("b", "1"), ("c", "8")] {
        let out = tmp.path().join(format!("run-{tag}"));
        run_cli(&[
            "run",
            "--manifest",
            manifest.to_str().unwrap(),
            "--config",
            config.to_str().unwrap(),
            "--system",
            "tr",
            "--mock",
            "--jobs",
            jobs,
            "--out",
            out.to_str().unwrap(),
        ])?;
        outputs.push((read(&out, "report.json")?, read(&out, "predictions.tsv")?));
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "three runs took {elapsed:?}");
    ensure!(outputs[0] == outputs[1], "two --jobs 1 runs differ");
    ensure!(outputs[0] == outputs[2], "--jobs 1 and --jobs 8 differ");

    // translation and definitions through the in-process mocks
    let data = tmp.path().join("it.data.txt");
    let gold = tmp.path().join("it.gold.txt");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut d, mut g) = (String::new(), String::new());
    for k in 0..100 {
        let cands: Vec<String> = (0..10).map(|i| format!("it{k}_{i}.jpg")).collect();
        d.push_str(&format!("parola{k}\tla parola{k} rossa\t{}\n", cands.join("\t")));
        g.push_str(&format!("{}\n", cands[rng.gen_range(0..10)]));
    }
    std::fs::write(&data, d).map_err(|e| e.to_string())?;
    std::fs::write(&gold, g).map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    for (tag, jobs) in [("d", "1"), ("e", "8")] {
        let out = tmp.path().join(format!("run-{tag}"));
        run_cli(&[
            "run",
            "--data",
            data.to_str().unwrap(),
            "--gold",
            gold.to_str().unwrap(),
            "--lang",
            "it",
            "--system",
            "tr-def",
            "--mock",
            "--jobs",
            jobs,
            "--out",
            out.to_str().unwrap(),
        ])?;
        reports.push((read(&out, "report.json")?, read(&out, "predictions.tsv")?));
    }
    ensure!(reports[0] == reports[1], "tr-def runs differ between --jobs 1 and 8");
    Ok(format!("5 runs byte-identical per setting, fixture runs {:.2}s", elapsed.as_secs_f64()))
}

// ---- 9 --------------------------------------------------------------------

fn criterion_9() -> Outcome {
    let (seed, dim) = (9, 32);
    let server = lib(MockServer::start(MockServerConfig {
        seed,
        dim,
        ..Default::default()
    }))?;
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let texts: Vec<String> = (0..40).map(|k| format!("context number {k}")).collect();
    let images: Vec<String> = (0..40).map(|k| format!("image_{k}.jpg")).collect();
    let model = "clip-vit-large-patch14";

    let client = || HttpEmbedClient::new(HttpClient::new(server.url()), ImageSource::IdBytes);
    let first = lib(CachedProvider::open(tmp.path(), Some(Arc::new(client()))))?;
    let tv = lib(first.fetch(model, Modality::Text, &texts))?;
    let iv = lib(first.fetch(model, Modality::Image, &images))?;
    let bits = |v: &EmbeddingVector| v.values.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    for (t, v) in texts.iter().zip(&tv) {
        ensure!(bits(v) == bits(&mock_embed(model, Modality::Text, t.as_bytes(), seed, dim)), "text {t:?} differs");
    }
    for (i, v) in images.iter().zip(&iv) {
        ensure!(bits(v) == bits(&mock_embed(model, Modality::Image, i.as_bytes(), seed, dim)), "image {i:?} differs");
    }
    let requests = server.request_count();
    ensure!(requests > 0, "first pass made no requests");
    drop(first);

    let second = lib(CachedProvider::open(tmp.path(), Some(Arc::new(client()))))?;
    let tv2 = lib(second.fetch(model, Modality::Text, &texts))?;
    let iv2 = lib(second.fetch(model, Modality::Image, &images))?;
    ensure!(tv2 == tv && iv2 == iv, "cached vectors differ");
    ensure!(second.upstream_calls() == 0, "second pass called upstream {} times", second.upstream_calls());
    ensure!(server.request_count() == requests, "second pass reached the server");
    Ok(format!("80 vectors bit-exact over {requests} requests; second pass 0 requests"))
}

// ---- 10 -------------------------------------------------------------------

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let candidates: Vec<String> = (0..10).map(|i| format!("c{i}")).collect();
    for trial in 0..100 {
        let vecs: Vec<(String, EmbeddingVector)> = candidates
            .iter()
            .map(|c| (c.clone(), EmbeddingVector::new("m", Modality::Image, c.clone(), random_vec(&mut rng, 8)).unwrap()))
            .collect();
        let g = EmbeddingVector::new("m", Modality::Image, "gen", random_vec(&mut rng, 8)).unwrap();
        let pairwise: Vec<f64> = vecs.iter().map(|(_, v)| cosine(v, &g).unwrap()).collect();
        for agg in [GenAggregation::Mean, GenAggregation::Max] {
            let totals = lib(gen_score(&vecs, std::slice::from_ref(&g), agg))?.totals();
            ensure!(totals == pairwise, "trial {trial}: single-image {agg:?} scores differ from cosine");
            ensure!(rank_order(&totals) == rank_order(&pairwise), "trial {trial}: ranking differs");
        }
    }

    let inst = Instance::new("bat", "baseball bat", Language::En, candidates.clone(), Some("c7".into())).unwrap();
    let values = |v: &[f64]| -> HashMap<String, f64> { candidates.iter().cloned().zip(v.iter().copied()).collect() };
    let p = lib(seg_select(0, &inst, &values(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.9, 0.8, 0.0])))?;
    ensure!(p.chosen() == "c7", "argmax chose {}", p.chosen());
    let p = lib(seg_select(0, &inst, &values(&[0.1, 0.6, 0.2, 0.6, 0.0, 0.6, 0.1, 0.1, 0.1, 0.1])))?;
    ensure!(p.chosen() == "c1" && p.ranking[1] == "c3" && p.ranking[2] == "c5", "tie order {:?}", &p.ranking[..3]);

    // sweep over mock-encoded candidates and generated images
    let instances: Vec<Instance> = (0..30)
        .map(|k| {
            let cands: Vec<String> = (0..10).map(|i| format!("s{k}_{i}.jpg")).collect();
            let gold = cands[k % 10].clone();
            Instance::new(format!("w{k}"), format!("c{k} w{k}"), Language::En, cands, Some(gold)).unwrap()
        })
        .collect();
    let cache = CachedProvider::in_memory(Some(Arc::new(MockProvider::new(10, 16))));
    let config = SystemConfig {
        system: SystemId::new(Strategy::Gen, false),
        ..SystemConfig::default()
    };
    let engine = lib(Engine::new(config, Arc::new(cache), 2))?;
    let models = default_registry()[&Language::En].clone();
    let max = *GEN_SWEEP_COUNTS.iter().max().unwrap();
    let inputs = lib(engine.gen_inputs(&instances, &models, max))?;
    let points = lib(gen_sweep(&inputs, &instances, &GEN_SWEEP_COUNTS, GenAggregation::Mean))?;
    let counts: Vec<usize> = points.iter().map(|p| p.count).collect();
    ensure!(counts == GEN_SWEEP_COUNTS, "sweep counts {counts:?}");
    ensure!(points.iter().all(|p| (0.0..=1.0).contains(&p.accuracy)), "accuracy out of range");
    let accs: Vec<String> = points.iter().map(|p| format!("N={}:{:.3}", p.count, p.accuracy)).collect();
    Ok(format!("gen_count=1 matches cosine; seg argmax/ties ok; sweep {}", accs.join(" ")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", criterion_1),
        ("binary grid search", criterion_2),
        ("macro-average arithmetic", criterion_3),
        ("mrr / hit-rate laws", criterion_4),
        ("preset contracts", criterion_5),
        ("definition round-trip", criterion_6),
        ("supplementary builder", criterion_7),
        ("end-to-end determinism", criterion_8),
        ("wire conformance and cache", criterion_9),
        ("gen / seg strategies", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
