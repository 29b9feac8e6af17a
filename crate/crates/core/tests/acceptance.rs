//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.

mod common;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use common::{all_partitions, brute_modularity, nmi, planted_bipartite};
use polis::config::RunConfig;
use polis::coocnet::{
    average_degree_of, density_of, detect_communities, disparity_backbone, edge_significances, modularity,
    BackboneParams, CooccurrenceGraph,
};
use polis::ingest::{load_corpus, CorpusFormat, CorpusStore};
use polis::lexicon::{Lexicon, NegationLexicon};
use polis::pipeline::{run_all, Pipeline};
use polis::textpipe::{match_lexicon, MatchMode};
use polis::topicmdl::{
    build_bipartite, compression_factor, extract_topics, fit_sbm, nats_to_bits, text_description_length,
    topic_report_json, FitOptions, SbmState, Vocabulary,
};
use polis::turbulence::{
    classify_all, classify_emergent, classify_falling, classify_rising, classify_stable, evidence_holds,
    Denominator, StabilityRule, TermFrequencySeries, TurbulenceParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: u32, what: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("criterion {n}: PASS ({what})");
    } else {
        println!("criterion {n}: FAIL ({what})");
        for f in failures {
            println!("  - {f}");
        }
    }
    assert!(failures.is_empty(), "criterion {n} failed: {failures:?}");
}

fn check(failures: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        failures.push(msg());
    }
}

/// Round to `digits` significant digits, as a string.
fn sig(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits - 1, x)
}

#[test]
fn criterion_1_network_formula_oracle() {
    let start = Instant::now();
    let mut f = Vec::new();
    for (n, e, want) in [(26, 192, 0.591), (240, 20847, 0.727)] {
        let got = density_of(n, e).unwrap();
        check(&mut f, (got - want).abs() <= 0.001, || format!("density({n},{e}) = {got}"));
    }
    for (n, e, want) in [(26, 192, 14.769), (65, 743, 22.862)] {
        let got = average_degree_of(n, e).unwrap();
        check(&mut f, (got - want).abs() <= 0.001, || format!("avg_degree({n},{e}) = {got}"));
    }
    let secs = start.elapsed().as_secs_f64();
    check(&mut f, secs < 1.0, || format!("took {secs}s"));
    verdict(1, "density and average degree", &f);
}

#[test]
fn criterion_2_complexity_formula_oracle() {
    let mut f = Vec::new();
    let tdl = text_description_length(4743, 1148).unwrap();
    check(&mut f, (tdl - 48212.15).abs() <= 0.5, || format!("TDL(4743,1148) = {tdl}"));
    let tdl19 = text_description_length(114104999, 163745).unwrap();
    check(&mut f, ((tdl19 - 1.976423109e9) / 1.976423109e9).abs() <= 1e-3, || {
        format!("TDL(114104999,163745) = {tdl19}")
    });
    for (mdl, tdl, want) in [(8516.52666, 48212.15355, 0.1766468832), (208407776.4, 1976423109.0, 0.1054469438)] {
        let got = compression_factor(mdl, tdl).unwrap();
        check(&mut f, sig(got, 9) == sig(want, 9), || format!("CF({mdl},{tdl}) = {got}"));
    }
    let bits = nats_to_bits(1.0).unwrap();
    check(&mut f, (bits - 1.0 / 2f64.ln()).abs() <= 1e-12, || format!("nats_to_bits(1) = {bits}"));
    verdict(2, "TDL, compression factor, nats to bits", &f);
}

fn freq(points: &[(i32, f64)]) -> TermFrequencySeries {
    let d = 1_000_000u64;
    TermFrequencySeries::from_counts(
        "t",
        Denominator::Full,
        points.iter().map(|&(y, f)| (y, (f * d as f64).round() as u64, d)),
    )
}

fn counts(points: &[(i32, u64)]) -> TermFrequencySeries {
    TermFrequencySeries::from_counts("t", Denominator::Full, points.iter().map(|&(y, c)| (y, c, 1000)))
}

#[test]
fn criterion_3_turbulence_rules() {
    let mut f = Vec::new();
    let p = TurbulenceParams::default();
    let cases: Vec<(&str, bool, bool)> = vec![
        ("rising 0.001 -> 0.012 over 6y", classify_rising(&freq(&[(2010, 0.001), (2016, 0.012)]), 7, 10.0, 100).is_some(), true),
        ("rising from zero", classify_rising(&freq(&[(2010, 0.0), (2016, 0.012)]), 7, 10.0, 100).is_some(), false),
        ("rising over 8y", classify_rising(&freq(&[(2008, 0.001), (2016, 0.011)]), 7, 10.0, 100).is_some(), false),
        ("falling 20%", classify_falling(&freq(&[(2000, 0.010), (2001, 0.008)]), 0.15, 100).is_some(), true),
        ("falling 14%", classify_falling(&freq(&[(2000, 0.010), (2001, 0.0086)]), 0.15, 100).is_some(), false),
        (
            "falling below support",
            classify_falling(
                &TermFrequencySeries::from_counts("t", Denominator::Full, [(2000, 3, 300), (2001, 1, 300)]),
                0.15,
                100,
            )
            .is_some(),
            false,
        ),
        ("stable 1%", classify_stable(&freq(&[(1999, 0.0100), (2019, 0.0101)]), 20, 0.02, StabilityRule::Endpoint).is_some(), true),
        ("stable 3%", classify_stable(&freq(&[(1999, 0.0100), (2019, 0.0103)]), 20, 0.02, StabilityRule::Endpoint).is_some(), false),
        (
            "stable short span",
            classify_stable(&freq(&(2005..=2019).map(|y| (y, 0.01)).collect::<Vec<_>>()), 20, 0.02, StabilityRule::Endpoint)
                .is_some(),
            false,
        ),
        ("emergent 0 -> 20", classify_emergent(&counts(&[(2015, 0), (2016, 20)]), 20).is_some_and(|l| l.end.year == 2016), true),
        ("emergent 0 -> 19", classify_emergent(&counts(&[(2015, 0), (2016, 19)]), 20).is_some(), false),
        ("emergent 1 -> 500", classify_emergent(&counts(&[(2015, 1), (2016, 500)]), 20).is_some(), false),
    ];
    for (name, got, want) in cases {
        check(&mut f, got == want, || format!("{name}: got {got}, want {want}"));
    }

    // Random series: every emitted label must satisfy its own inequality
    // when re-checked from the stored evidence.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut labels = 0;
    for i in 0..1000 {
        let first = rng.random_range(1990..2000);
        let len = rng.random_range(2..30);
        let pts: Vec<(i32, u64, u64)> = (0..len)
            .map(|k| {
                let denom = rng.random_range(1..5000u64);
                let count = if rng.random_bool(0.2) { 0 } else { rng.random_range(0..=denom.min(400)) };
                (first + k, count, denom)
            })
            .collect();
        let s = TermFrequencySeries::from_counts("t", Denominator::Full, pts);
        let params = TurbulenceParams {
            min_support: rng.random_range(0..50),
            stability: if i % 2 == 0 { StabilityRule::Endpoint } else { StabilityRule::Spread },
            tolerance: 0.5,
            span_years: 10,
            ..p
        };
        for l in classify_all(&s, &params) {
            labels += 1;
            check(&mut f, evidence_holds(&l, &params), || format!("series {i}: bad evidence {l:?}"));
        }
    }
    check(&mut f, labels > 100, || format!("only {labels} labels produced"));
    verdict(3, "turbulence examples and evidence property", &f);
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, max_w: u64) -> CooccurrenceGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v, rng.random_range(1..=max_w)));
            }
        }
    }
    CooccurrenceGraph::from_edges(n, &edges)
}

#[test]
fn criterion_4_modularity_oracle() {
    let mut f = Vec::new();
    let g = CooccurrenceGraph::from_edges(6, &[(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)]);
    let best = all_partitions(6, 6)
        .into_iter()
        .map(|p| brute_modularity(&g, &p, true))
        .fold(f64::NEG_INFINITY, f64::max);
    let found = detect_communities(&g, 10, 42, true).unwrap();
    check(&mut f, (best - 0.5).abs() < 1e-12, || format!("exhaustive best Q = {best}"));
    check(&mut f, (found.modularity - 0.5).abs() < 1e-12, || format!("detected Q = {}", found.modularity));
    check(&mut f, found.n_communities == 2, || format!("{} communities", found.n_communities));

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..20 {
        let n = rng.random_range(2..=8);
        let g = random_graph(&mut rng, n, 0.5, 5);
        let one = vec![0; n];
        let q = modularity(&g, &one, true);
        check(&mut f, q == 0.0 || g.n_edges() == 0, || format!("graph {i}: one-block Q = {q}"));
        for weighted in [true, false] {
            let part: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
            let a = modularity(&g, &part, weighted);
            let b = brute_modularity(&g, &part, weighted);
            check(&mut f, (a - b).abs() <= 1e-12, || format!("graph {i}: Q {a} vs brute {b}"));
        }
    }
    verdict(4, "modularity vs exhaustive and brute force", &f);
}

#[test]
fn criterion_5_backbone_properties() {
    let mut f = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let alphas = [0.01, 0.05, 0.1, 0.2, 0.5];
    for i in 0..100 {
        let n = rng.random_range(2..=30);
        let p = rng.random_range(0.1..0.9);
        let g = random_graph(&mut rng, n, p, 50);
        let sets: Vec<HashSet<(usize, usize, u64)>> = alphas
            .iter()
            .map(|&a| {
                let b = disparity_backbone(&g, BackboneParams::new(a).unwrap());
                b.edges()
                    .map(|(u, v, w)| {
                        let (lu, lv) = (b.label(u), b.label(v));
                        (g.index_of(lu).unwrap(), g.index_of(lv).unwrap(), w)
                    })
                    .map(|(u, v, w)| (u.min(v), u.max(v), w))
                    .collect()
            })
            .collect();
        for k in 1..sets.len() {
            check(&mut f, sets[k - 1].is_subset(&sets[k]), || {
                format!("graph {i}: backbone({}) not within backbone({})", alphas[k - 1], alphas[k])
            });
        }
        for e in edge_significances(&g) {
            for (node, got) in [(e.u, e.at_u), (e.v, e.at_v)] {
                let k = g.neighbors(node).count();
                let s: u64 = g.neighbors(node).map(|(_, w)| w).sum();
                let want = (k >= 2).then(|| (1.0 - e.weight as f64 / s as f64).powf((k - 1) as f64));
                let ok = match (got, want) {
                    (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
                    (None, None) => true,
                    _ => false,
                };
                check(&mut f, ok, || format!("graph {i}: significance {got:?} vs {want:?}"));
            }
        }
    }
    let mut k10 = Vec::new();
    for u in 0..10 {
        for v in u + 1..10 {
            k10.push((u, v, 1));
        }
    }
    let b = disparity_backbone(&CooccurrenceGraph::from_edges(10, &k10), BackboneParams::new(0.05).unwrap());
    check(&mut f, b.n_edges() == 0, || format!("K10 backbone kept {} edges", b.n_edges()));
    verdict(5, "disparity backbone monotonicity, K10, formula", &f);
}

#[test]
fn criterion_6_sbm_recovery() {
    let mut f = Vec::new();
    let (g, wb, _) = planted_bipartite(3, 4, 3, 6);
    let opts = FitOptions {
        verify_each_step: true,
        ..Default::default()
    };
    for seed in 0..20 {
        let t = Instant::now();
        let fit = fit_sbm(&g, seed, &opts).unwrap();
        let secs = t.elapsed().as_secs_f64();
        let score = nmi(&fit.state.word_blocks, &wb);
        check(&mut f, score >= 0.9, || format!("seed {seed}: NMI {score}"));
        check(&mut f, fit.report.trace.windows(2).all(|w| w[1] <= w[0]), || {
            format!("seed {seed}: DL increased along {:?}", fit.report.trace)
        });
        check(&mut f, fit.report.max_rel_drift <= 1e-6, || {
            format!("seed {seed}: drift {}", fit.report.max_rel_drift)
        });
        let scratch = fit.state.recompute_dl(&g).unwrap();
        check(&mut f, ((scratch - fit.state.dl_nats) / scratch).abs() <= 1e-6, || {
            format!("seed {seed}: stored DL {} vs scratch {scratch}", fit.state.dl_nats)
        });
        check(&mut f, secs < 5.0, || format!("seed {seed}: fit took {secs}s"));
    }
    verdict(6, "planted 3x3 bipartite recovery", &f);
}

fn mini_corpus_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini_corpus.jsonl")
}

fn files_under(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

#[test]
fn criterion_7_mini_corpus_end_to_end() {
    let mut f = Vec::new();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let cfg = |out: &Path| RunConfig {
        inputs: vec![mini_corpus_path()],
        out: out.to_path_buf(),
        ..Default::default()
    };
    let t = Instant::now();
    run_all(cfg(dirs[0].path())).unwrap();
    let secs = t.elapsed().as_secs_f64();
    check(&mut f, secs < 60.0, || format!("pipeline took {secs}s"));
    run_all(cfg(dirs[1].path())).unwrap();

    let a = files_under(dirs[0].path());
    let b = files_under(dirs[1].path());
    check(&mut f, a.len() > 20, || format!("only {} output files", a.len()));
    check(&mut f, a.keys().eq(b.keys()), || "output file sets differ".into());
    for (k, v) in &a {
        check(&mut f, b.get(k) == Some(v), || format!("{} differs between runs", k.display()));
    }

    let mut rdr = csv::Reader::from_path(dirs[0].path().join("complexity.csv")).unwrap();
    let mut years = 0;
    for rec in rdr.deserialize::<HashMap<String, String>>() {
        let rec = rec.unwrap();
        let cf: f64 = rec["compression_factor"].parse().unwrap();
        years += 1;
        check(&mut f, cf > 0.0 && cf < 1.0, || format!("{}: compression factor {cf}", rec["year"]));
    }
    check(&mut f, years == 5, || format!("{years} complexity rows"));

    // Edge weights against document counts computed straight from the
    // cleaned tokens.
    let corpus = load_corpus(&mini_corpus_path(), CorpusFormat::Jsonl, false).unwrap();
    let store = CorpusStore::build(&corpus.snapshots, &NegationLexicon::builtin(), false);
    let lex = Lexicon::builtin_pii();
    for yc in store.iter() {
        let mut docs_with: HashMap<String, u64> = HashMap::new();
        for d in &yc.docs {
            for t in match_lexicon(&d.id, &d.tokens, &lex, MatchMode::Single).counts.into_keys() {
                *docs_with.entry(t).or_insert(0) += 1;
            }
        }
        let tsv = std::fs::read_to_string(dirs[0].path().join(format!("cooc/{}.tsv", yc.year))).unwrap();
        for line in tsv.lines() {
            let cols: Vec<&str> = line.split('\t').collect();
            let w: u64 = cols[2].parse().unwrap();
            let bound = docs_with[cols[0]].min(docs_with[cols[1]]);
            check(&mut f, w <= bound, || format!("{}: {line} exceeds {bound}", yc.year));
        }
    }

    let mut p = Pipeline::load(cfg(tempfile::tempdir().unwrap().path())).unwrap();
    let (topics, _) = p.topics().unwrap();
    for t in &topics {
        let s = t.weight_sum();
        check(&mut f, (s - 1.0).abs() <= 1e-9, || format!("topic {} weights sum to {s}", t.id));
    }
    let report = p.finish("topics").unwrap();
    for y in &report.years {
        check(&mut f, y.sentences_in == y.sentences_kept + y.sentences_dropped_by_negation, || {
            format!("{}: sentence accounting", y.year)
        });
    }
    verdict(7, "mini-corpus pipeline", &f);
}

#[test]
fn criterion_8_topic_report_format() {
    let mut f = Vec::new();
    // "cookies" lives in its own documents; the other words share theirs.
    let mut docs = Vec::new();
    for i in 0..6 {
        docs.push(polis::textpipe::TokenStream {
            snapshot_id: format!("c{i}"),
            tokens: vec!["cookies".to_string(); 8],
        });
    }
    for i in 0..6 {
        let mut tokens = Vec::new();
        for w in ["address", "email", "name"] {
            tokens.extend(std::iter::repeat_n(w.to_string(), 8));
        }
        docs.push(polis::textpipe::TokenStream {
            snapshot_id: format!("o{i}"),
            tokens,
        });
    }
    let g = build_bipartite(&docs, Vocabulary::Full { min_count: 1 }).unwrap();
    let fit = fit_sbm(&g, 42, &FitOptions::default()).unwrap();
    let topics = extract_topics(&fit.state, &g);
    let json: serde_json::Value = serde_json::from_str(&topic_report_json(&topics).unwrap()).unwrap();
    let single = json
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["words"].as_array().is_some_and(|w| w.len() == 1));
    let shape_ok = single.is_some_and(|t| {
        t["words"][0]["word"] == "cookies" && t["words"][0]["weight"].as_f64() == Some(1.0)
    });
    check(&mut f, shape_ok, || format!("no {{cookies: 1.0}} topic in {json}"));

    // Omission: one block where a rare word falls under 0.001.
    let mut docs = vec![polis::textpipe::TokenStream {
        snapshot_id: "d".into(),
        tokens: std::iter::repeat_n("common".to_string(), 2000)
            .chain(std::iter::once("rare".to_string()))
            .collect(),
    }];
    docs.push(docs[0].clone());
    docs[1].snapshot_id = "e".into();
    let g = build_bipartite(&docs, Vocabulary::Full { min_count: 1 }).unwrap();
    let state = SbmState::from_partition(&g, &[0, 0], &[0, 0]).unwrap();
    let topics = extract_topics(&state, &g);
    let sum = topics[0].weight_sum();
    check(&mut f, (sum - 1.0).abs() <= 1e-9, || format!("internal weights sum to {sum}"));
    let report = topic_report_json(&topics).unwrap();
    check(&mut f, report.contains("\"common\"") && !report.contains("\"rare\""), || {
        format!("rare word not omitted: {report}")
    });
    verdict(8, "topic report omission and single-word topic", &f);
}
