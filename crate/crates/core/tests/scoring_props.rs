use std::collections::{BTreeMap, HashMap};

use proptest::prelude::*;

use vwsd::augment::TextCache;
use vwsd::dataset::{parse_dataset, serialize_dataset};
use vwsd::eval::{hit_rate, macro_average, mrr, pearson};
use vwsd::rankers::{rank_order, score_instance, Prediction, SimilarityTable};
use vwsd::{Dataset, Instance, Language, Split, Weights};

const N: usize = 10;

#[derive(Debug, Clone)]
struct Case {
    s_ic: Vec<f64>,
    s_ig: Vec<Vec<f64>>,
    s_cg: Vec<f64>,
}

fn sim() -> impl Strategy<Value = f64> {
    -1.0f64..1.0
}

fn case(max_glosses: usize) -> impl Strategy<Value = Case> {
    (0..=max_glosses).prop_flat_map(|g| {
        (
            prop::collection::vec(sim(), N),
            prop::collection::vec(prop::collection::vec(sim(), g), N),
            prop::collection::vec(sim(), g),
        )
            .prop_map(|(s_ic, s_ig, s_cg)| Case { s_ic, s_ig, s_cg })
    })
}

fn weights() -> impl Strategy<Value = Weights> {
    (0.0f64..4.0, 0.0f64..4.0, 0.0f64..4.0)
        .prop_filter("not all zero", |(a, b, c)| a + b + c > 0.0)
        .prop_map(|(a, b, c)| Weights::new(a, b, c).unwrap())
}

fn instance() -> Instance {
    let cands = (0..N).map(|i| format!("i{i}")).collect();
    Instance::new("w", "a w", Language::En, cands, Some("i0".into())).unwrap()
}

fn table(c: &Case) -> SimilarityTable {
    SimilarityTable {
        candidates: (0..N).map(|i| format!("i{i}")).collect(),
        glosses: (0..c.s_cg.len()).map(|g| format!("g{g}")).collect(),
        s_ic: c.s_ic.clone(),
        s_ig: c.s_ig.clone(),
        s_cg: c.s_cg.clone(),
    }
}

fn oracle(c: &Case, w: &Weights) -> Vec<f64> {
    (0..N)
        .map(|i| {
            let best = c
                .s_cg
                .iter()
                .enumerate()
                .map(|(g, &cg)| w.ig * c.s_ig[i][g] + w.cg * cg)
                .fold(0.0f64, f64::max);
            best + w.ic * c.s_ic[i]
        })
        .collect()
}

proptest! {
    #[test]
    fn table_matches_oracle(c in case(8), w in weights()) {
        let got = table(&c).score(&w).totals();
        for (a, b) in got.iter().zip(oracle(&c, &w)) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn closures_and_table_agree(c in case(6), w in weights()) {
        let inst = instance();
        let glosses: Vec<String> = (0..c.s_cg.len()).map(|g| format!("g{g}")).collect();
        let idx = |s: &str| s[1..].parse::<usize>().unwrap();
        let sim_vl = |img: &str, text: &str| {
            Ok(if text == inst.context { c.s_ic[idx(img)] } else { c.s_ig[idx(img)][idx(text)] })
        };
        let sim_l = |_: &str, g: &str| Ok(c.s_cg[idx(g)]);
        let via_closures = score_instance(&inst, &glosses, &w, sim_vl, sim_l).unwrap();
        prop_assert_eq!(via_closures.totals(), table(&c).score(&w).totals());
    }

    #[test]
    fn positive_scaling_preserves_ranking(c in case(8), w in weights(), k in 0.01f64..100.0) {
        let t = table(&c);
        let a = t.score(&w).totals();
        let b = t.score(&w.scaled(k)).totals();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x * k - y).abs() <= 1e-9 * (1.0 + y.abs()));
        }
        let (ra, rb) = (rank_order(&a), rank_order(&b));
        // scaling can only merge or split exact ties by rounding
        let mut sorted = a.clone();
        sorted.sort_by(f64::total_cmp);
        let near_tie = sorted.windows(2).any(|p| (p[1] - p[0]).abs() < 1e-9);
        if !near_tie {
            prop_assert_eq!(ra, rb);
        }
    }

    #[test]
    fn gloss_order_does_not_change_totals(c in case(8), w in weights(), rot in 0usize..8) {
        let g = c.s_cg.len();
        prop_assume!(g > 1);
        let r = rot % g;
        let mut p = c.clone();
        p.s_cg.rotate_left(r);
        for row in &mut p.s_ig {
            row.rotate_left(r);
        }
        prop_assert_eq!(table(&c).score(&w).totals(), table(&p).score(&w).totals());
    }

    #[test]
    fn single_gloss_closed_form(c in case(1), w in weights()) {
        prop_assume!(c.s_cg.len() == 1);
        let got = table(&c).score(&w);
        for (i, cs) in got.candidates.iter().enumerate() {
            let term = w.ig * c.s_ig[i][0] + w.cg * c.s_cg[0];
            let want = term.max(0.0) + w.ic * c.s_ic[i];
            prop_assert!((cs.total - want).abs() <= 1e-12);
            prop_assert_eq!(cs.best_gloss.is_some(), term > 0.0);
        }
    }

    #[test]
    fn context_only_ignores_glosses(c in case(8), ic in 0.01f64..4.0) {
        let w = Weights::new(ic, 0.0, 0.0).unwrap();
        let got = table(&c).score(&w).totals();
        let want: Vec<f64> = c.s_ic.iter().map(|s| ic * s).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn rank_order_is_a_sorted_permutation(totals in prop::collection::vec(-3.0f64..3.0, 1..20)) {
        let order = rank_order(&totals);
        let mut seen = order.clone();
        seen.sort();
        prop_assert_eq!(seen, (0..totals.len()).collect::<Vec<_>>());
        for p in order.windows(2) {
            let (a, b) = (p[0], p[1]);
            prop_assert!(totals[a] > totals[b] || (totals[a] == totals[b] && a < b));
        }
    }

    #[test]
    fn metric_laws(sets in prop::collection::vec((0usize..N, prop::collection::vec(0u8..4, N)), 1..30)) {
        let preds: Vec<Prediction> = sets
            .iter()
            .enumerate()
            .map(|(k, (gold, totals))| {
                let cands: Vec<String> = (0..N).map(|i| format!("c{i}")).collect();
                let inst = Instance::new("w", "w", Language::En, cands, Some(format!("c{gold}"))).unwrap();
                let totals: Vec<f64> = totals.iter().map(|&t| f64::from(t)).collect();
                Prediction::from_totals(k, &inst, &totals).unwrap()
            })
            .collect();
        let (h, m) = (hit_rate(&preds).unwrap(), mrr(&preds).unwrap());
        prop_assert!((0.0..=1.0).contains(&h));
        prop_assert!(m >= h && m <= 1.0 && m >= 1.0 / N as f64);
    }

    #[test]
    fn macro_average_is_bounded(xs in prop::collection::vec(0.0f64..100.0, 1..6)) {
        let m: BTreeMap<usize, f64> = xs.iter().copied().enumerate().collect();
        let avg = macro_average(&m).unwrap();
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(avg >= lo - 1e-12 && avg <= hi + 1e-12);
    }

    #[test]
    fn pearson_is_bounded(pairs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..20)) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        if let Ok(r) = pearson(&a, &b) {
            prop_assert!((-1.0..=1.0).contains(&r));
        }
    }

    #[test]
    fn dataset_text_round_trips(words in prop::collection::vec("[a-z]{1,8}", 1..15), seed in 0usize..10) {
        let instances: Vec<Instance> = words
            .iter()
            .enumerate()
            .map(|(k, w)| {
                let cands: Vec<String> = (0..N).map(|i| format!("{w}{k}_{i}.jpg")).collect();
                let gold = cands[(k + seed) % N].clone();
                Instance::new(w.clone(), format!("big {w}"), Language::It, cands, Some(gold)).unwrap()
            })
            .collect();
        let ds = Dataset::new("p", Language::It, Split::Test, instances).unwrap();
        let (data, gold) = serialize_dataset(&ds);
        let back = parse_dataset("p", &data, gold.as_deref(), Language::It).unwrap();
        prop_assert_eq!(back.instances, ds.instances);
    }

    #[test]
    fn text_cache_round_trips(entries in prop::collection::btree_map("[a-z ]{1,12}[a-z]", "[a-z,.:]{1,20}", 0..20)) {
        let mut cache = TextCache::in_memory();
        for (k, v) in &entries {
            cache.insert(k, v).unwrap();
        }
        let back = TextCache::parse(&cache.to_tsv()).unwrap();
        let got: HashMap<&String, &String> = back.iter().collect();
        prop_assert_eq!(got.len(), entries.len());
        for (k, v) in &entries {
            prop_assert_eq!(got[k], v);
        }
    }
}
