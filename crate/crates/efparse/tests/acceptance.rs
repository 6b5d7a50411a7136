//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured numbers (run with `--nocapture` to see them).

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use efparse::cache::DualCache;
use efparse::distance::{similarity, token_levenshtein};
use efparse::eval::{self, GroundTruth, Prediction};
use efparse::gateway::{Gateway, MockScript};
use efparse::lexicon::Lexicon;
use efparse::matcher::match_template;
use efparse::merge::{CacheUpdater, MergeOutcome};
use efparse::pipeline::{Parser, PipelineConfig, StreamOutput};
use efparse::template::{LogRecord, Template, Token};

fn fixtures() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures"))
}

fn fixture_corpus() -> Vec<(u64, String)> {
    let text = std::fs::read_to_string(fixtures().join("corpus.log")).unwrap();
    text.lines()
        .enumerate()
        .map(|(i, l)| (i as u64 + 1, l.to_string()))
        .collect()
}

fn fixture_truth() -> GroundTruth {
    GroundTruth::from_csv_path(&fixtures().join("truth.csv")).unwrap()
}

fn fixture_gateway() -> Gateway {
    Gateway::with_mock(MockScript::from_file(&fixtures().join("mock.txt")).unwrap())
}

fn run_fixture(config: PipelineConfig) -> StreamOutput {
    let mut parser = Parser::new(
        config,
        Arc::new(Lexicon::bundled().clone()),
        fixture_gateway(),
    );
    parser.parse_stream_with_ids(fixture_corpus())
}

fn report_for(output: &StreamOutput) -> eval::EvalReport {
    let pred: BTreeMap<u64, String> = output
        .results
        .iter()
        .map(|r| (r.line_id, r.rendered.clone()))
        .collect();
    eval::evaluate_templates(&pred, &fixture_truth()).unwrap()
}

#[test]
fn fixture_pipeline_is_perfect_and_deterministic() {
    let started = Instant::now();
    let first = run_fixture(PipelineConfig::default());
    let second = run_fixture(PipelineConfig::default());
    let elapsed = started.elapsed();

    let render = |o: &StreamOutput| {
        let mut s = String::new();
        for r in &o.results {
            s.push_str(&format!("{}|{}|{}\n", r.line_id, r.raw, r.rendered));
        }
        s.push_str(&o.snapshot);
        s
    };
    assert_eq!(
        render(&first),
        render(&second),
        "two runs must be byte-identical"
    );

    let report = report_for(&first);
    assert_eq!(
        report.ga, 1.0,
        "GA must be 1.0, snapshot:\n{}",
        first.snapshot
    );
    assert_eq!(report.pa, 1.0, "PA must be 1.0");
    assert_eq!(report.fga, 1.0, "FGA must be 1.0");
    assert_eq!(report.fta, 1.0, "FTA must be 1.0");
    assert_eq!(report.truth_templates, 20);
    assert!(
        elapsed < Duration::from_secs(5),
        "two fixture runs took {elapsed:?}"
    );
    println!(
        "acceptance fixture-pipeline: PASS (GA=1 PA=1 FGA=1 FTA=1, {} lines, {} templates, 2 runs in {:?})",
        first.results.len(),
        report.predicted_templates,
        elapsed
    );
}

#[test]
fn corrector_ablation_lowers_pa() {
    let enabled = report_for(&run_fixture(PipelineConfig::default()));
    let ablated_config = PipelineConfig {
        correction_enabled: false,
        ..Default::default()
    };
    let ablated = report_for(&run_fixture(ablated_config));
    assert!(
        ablated.pa < 1.0,
        "ablated PA {} must be below 1.0",
        ablated.pa
    );
    assert!(
        ablated.pa < enabled.pa,
        "ablated PA {} must be below enabled PA {}",
        ablated.pa,
        enabled.pa
    );
    println!(
        "acceptance corrector-ablation: PASS (PA {:.4} -> {:.4})",
        enabled.pa, ablated.pa
    );
}

#[test]
fn dual_cache_ablation_lowers_ga() {
    let enabled = report_for(&run_fixture(PipelineConfig::default()));
    let ablated_config = PipelineConfig {
        adaptive_updates: false,
        ..Default::default()
    };
    let ablated = report_for(&run_fixture(ablated_config));
    assert!(
        ablated.ga < enabled.ga,
        "ablated GA {} must be below enabled GA {}",
        ablated.ga,
        enabled.ga
    );
    println!(
        "acceptance dual-cache-ablation: PASS (GA {:.4} -> {:.4})",
        enabled.ga, ablated.ga
    );
}

#[test]
fn merge_reproduction_matches_reference_cases() {
    let updater = CacheUpdater::new(Arc::new(Lexicon::bundled().clone()));
    let gateway = Gateway::with_mock(
        MockScript::parse("extract | * | {target}\nmerge | * | <*>\nconfirm | * |\n").unwrap(),
    );

    // length-mismatched full merge
    let mut cache = DualCache::new(0.75);
    let mut cached = Template::parse("connection from <*> at Mon <*>").unwrap();
    assert!(cached.add_sample("connection from 210.202.115.220 at Mon Aug 9 09:12:50 2005"));
    cache.insert(cached);
    let mut incoming = Template::parse("connection from <*> at <*>").unwrap();
    assert!(incoming.add_sample("connection from 261.218.671.604 at Tue Oct 13 02:01:27 2005"));
    let outcome = updater.update(&mut cache, incoming, &gateway);
    let MergeOutcome::FullMerge {
        id,
        retired: Some(_),
    } = outcome
    else {
        panic!("expected a full merge, got {outcome:?}");
    };
    assert_eq!(
        cache.get(id).unwrap().render(),
        "connection from <*> at <*>"
    );
    assert_eq!(cache.len(), 1);

    // partial merge: hosts abstract, verbs survive
    let mut cache = DualCache::new(0.7);
    let mut failed =
        Template::parse("ERROR: Database connection failed - Host: db-primary").unwrap();
    assert!(failed.add_sample("ERROR: Database connection failed - Host: db-primary"));
    cache.insert(failed);
    let mut refused =
        Template::parse("ERROR: Database connection refused - Host: db-cache").unwrap();
    assert!(refused.add_sample("ERROR: Database connection refused - Host: db-cache"));
    let outcome = updater.update(&mut cache, refused, &gateway);
    let MergeOutcome::PartialMerge {
        refined_relevant,
        refined_new,
        ..
    } = outcome
    else {
        panic!("expected a partial merge, got {outcome:?}");
    };
    assert_eq!(
        cache.get(refined_relevant).unwrap().render(),
        "ERROR: Database connection failed - Host: <*>"
    );
    assert_eq!(
        cache.get(refined_new).unwrap().render(),
        "ERROR: Database connection refused - Host: <*>"
    );
    println!("acceptance merge-reproduction: PASS (full merge and partial merge exact)");
}

// --- metric oracle -------------------------------------------------------

/// Straight-from-definition metric implementations, quadratic and naive.
mod metric_oracle {
    use std::collections::BTreeMap;

    fn set_of(lines: &BTreeMap<u64, String>, key: &str) -> Vec<u64> {
        lines
            .iter()
            .filter(|(_, k)| k.as_str() == key)
            .map(|(l, _)| *l)
            .collect()
    }

    fn canon(s: &str) -> String {
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    pub fn ga(pred: &BTreeMap<u64, (String, String)>, truth: &BTreeMap<u64, String>) -> f64 {
        let pred_groups: BTreeMap<u64, String> =
            pred.iter().map(|(l, (g, _))| (*l, g.clone())).collect();
        let truth_groups: BTreeMap<u64, String> =
            truth.iter().map(|(l, t)| (*l, canon(t))).collect();
        let mut correct = 0;
        for line in pred.keys() {
            let p = set_of(&pred_groups, &pred_groups[line]);
            let t = set_of(&truth_groups, &truth_groups[line]);
            if p == t {
                correct += 1;
            }
        }
        correct as f64 / pred.len().max(1) as f64
    }

    pub fn fga(
        pred: &BTreeMap<u64, (String, String)>,
        truth: &BTreeMap<u64, String>,
    ) -> (f64, f64, f64) {
        let pred_groups: BTreeMap<u64, String> =
            pred.iter().map(|(l, (g, _))| (*l, g.clone())).collect();
        let truth_groups: BTreeMap<u64, String> =
            truth.iter().map(|(l, t)| (*l, canon(t))).collect();
        let pred_keys: Vec<String> = {
            let mut v: Vec<String> = pred_groups.values().cloned().collect();
            v.sort();
            v.dedup();
            v
        };
        let truth_keys: Vec<String> = {
            let mut v: Vec<String> = truth_groups.values().cloned().collect();
            v.sort();
            v.dedup();
            v
        };
        let mut correct = 0;
        for pk in &pred_keys {
            let pset = set_of(&pred_groups, pk);
            if truth_keys
                .iter()
                .any(|tk| set_of(&truth_groups, tk) == pset)
            {
                correct += 1;
            }
        }
        let pga = if pred_keys.is_empty() {
            1.0
        } else {
            correct as f64 / pred_keys.len() as f64
        };
        let rga = if truth_keys.is_empty() {
            1.0
        } else {
            correct as f64 / truth_keys.len() as f64
        };
        let fga = if pga + rga == 0.0 {
            0.0
        } else {
            2.0 * pga * rga / (pga + rga)
        };
        (pga, rga, fga)
    }

    pub fn pa(pred: &BTreeMap<u64, (String, String)>, truth: &BTreeMap<u64, String>) -> f64 {
        let correct = pred
            .iter()
            .filter(|(l, (_, template))| canon(template) == canon(&truth[l]))
            .count();
        correct as f64 / pred.len().max(1) as f64
    }

    pub fn fta(pred: &BTreeMap<u64, (String, String)>, truth: &BTreeMap<u64, String>) -> f64 {
        let pred_groups: BTreeMap<u64, String> =
            pred.iter().map(|(l, (g, _))| (*l, g.clone())).collect();
        let truth_groups: BTreeMap<u64, String> =
            truth.iter().map(|(l, t)| (*l, canon(t))).collect();
        let pred_keys: Vec<String> = {
            let mut v: Vec<String> = pred_groups.values().cloned().collect();
            v.sort();
            v.dedup();
            v
        };
        let truth_keys: Vec<String> = {
            let mut v: Vec<String> = truth_groups.values().cloned().collect();
            v.sort();
            v.dedup();
            v
        };
        let mut correct = 0;
        for pk in &pred_keys {
            let pset = set_of(&pred_groups, pk);
            for tk in &truth_keys {
                if set_of(&truth_groups, tk) == pset {
                    let line = pset[0];
                    if canon(&pred[&line].1) == *tk {
                        correct += 1;
                    }
                }
            }
        }
        let precision = if pred_keys.is_empty() {
            1.0
        } else {
            correct as f64 / pred_keys.len() as f64
        };
        let recall = if truth_keys.is_empty() {
            1.0
        } else {
            correct as f64 / truth_keys.len() as f64
        };
        if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        }
    }
}

#[test]
fn metrics_equal_brute_force_oracle_on_random_instances() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xE7A1);
    for case in 0..500 {
        let n_templates = rng.gen_range(1..=10usize);
        let n_messages = rng.gen_range(1..=100usize);
        let truth: BTreeMap<u64, String> = (1..=n_messages as u64)
            .map(|l| {
                let t = rng.gen_range(0..n_templates);
                (l, format!("event {t} value <*>"))
            })
            .collect();
        // perturb: sometimes perfect, sometimes regrouped, sometimes
        // string-corrupted
        let pred: BTreeMap<u64, (String, String)> = truth
            .iter()
            .map(|(l, t)| {
                let mut group = t.clone();
                let mut template = t.clone();
                match rng.gen_range(0..4) {
                    0 => {}
                    1 => group = format!("g{}", rng.gen_range(0..n_templates + 2)),
                    2 => template = format!("event {} value mangled", rng.gen_range(0..12)),
                    _ => {
                        group = format!("g{}", rng.gen_range(0..n_templates + 2));
                        template = format!("event {} value <*>", rng.gen_range(0..12));
                    }
                }
                (*l, (group, template))
            })
            .collect();

        let truth_gt = GroundTruth::from_pairs(truth.clone());
        let pred_typed: BTreeMap<u64, Prediction> = pred
            .iter()
            .map(|(l, (g, t))| {
                (
                    *l,
                    Prediction {
                        group: g.clone(),
                        template: t.clone(),
                    },
                )
            })
            .collect();

        let ga = eval::grouping_accuracy(&pred_typed, &truth_gt).unwrap();
        let (pga, rga, fga) = eval::f1_grouping(&pred_typed, &truth_gt).unwrap();
        let pa = eval::parsing_accuracy(&pred_typed, &truth_gt).unwrap();
        let fta = eval::f1_template(&pred_typed, &truth_gt).unwrap();

        assert_eq!(
            ga,
            metric_oracle::ga(&pred, &truth),
            "GA mismatch in case {case}"
        );
        let (opga, orga, ofga) = metric_oracle::fga(&pred, &truth);
        assert_eq!(
            (pga, rga, fga),
            (opga, orga, ofga),
            "FGA mismatch in case {case}"
        );
        assert_eq!(
            pa,
            metric_oracle::pa(&pred, &truth),
            "PA mismatch in case {case}"
        );
        assert_eq!(
            fta,
            metric_oracle::fta(&pred, &truth),
            "FTA mismatch in case {case}"
        );
        assert!(fta <= fga + 1e-12, "FTA must not exceed FGA (case {case})");
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(30),
        "metric oracle took {elapsed:?}"
    );
    println!("acceptance metric-oracle: PASS (500 instances exact in {elapsed:?})");
}

#[test]
fn length_preselection_equals_filter_and_is_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
    let thresholds = [0.5, 0.6, 0.75, 0.8];
    let alphabet = ["alpha", "beta", "gamma", "delta", "<*>"];
    let mut checked_candidates = 0usize;
    for case in 0..500 {
        let threshold = thresholds[case % thresholds.len()];
        let mut cache = DualCache::new(threshold);
        for _ in 0..rng.gen_range(0..30usize) {
            let len = rng.gen_range(1..=12usize);
            let tokens: Vec<&str> = (0..len)
                .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                .collect();
            cache.insert(Template::parse(&tokens.join(" ")).unwrap());
        }
        let l_target = rng.gen_range(1..=12usize);
        let (lo, hi) = cache.length_bounds(l_target);

        let expected: Vec<_> = cache
            .templates()
            .filter(|t| (lo..=hi).contains(&t.len()))
            .map(|t| t.id())
            .collect();
        let got: Vec<_> = cache
            .candidates_by_length(l_target)
            .iter()
            .map(|t| t.id())
            .collect();
        assert_eq!(got, expected, "candidate mismatch in case {case}");

        // soundness: nothing outside the bounds can reach the threshold
        let target_tokens: Vec<&str> = (0..l_target)
            .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
            .collect();
        let target = Template::parse(&target_tokens.join(" ")).unwrap();
        for t in cache.templates().filter(|t| !(lo..=hi).contains(&t.len())) {
            let sim = similarity(target.tokens(), t.tokens());
            assert!(
                sim < threshold,
                "length {} outside [{lo},{hi}] but similarity {sim} >= {threshold} (case {case})",
                t.len()
            );
            checked_candidates += 1;
        }
    }
    println!(
        "acceptance length-preselection: PASS (500 caches, {checked_candidates} out-of-range candidates all below threshold)"
    );
}

// --- distance / LCS oracles ----------------------------------------------

fn levenshtein_oracle(a: &[u8], b: &[u8]) -> usize {
    // plain full-matrix DP
    let mut dp = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in dp.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        dp[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            dp[i][j] = (dp[i - 1][j - 1] + cost)
                .min(dp[i - 1][j] + 1)
                .min(dp[i][j - 1] + 1);
        }
    }
    dp[a.len()][b.len()]
}

/// Exhaustive LCS oracle: enumerate every subsequence of `a`, keep those
/// that are subsequences of `b`, pick maximum length with the
/// lexicographically smallest index tuple in `a`.
fn lcs_oracle(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut best: Option<(usize, Vec<usize>)> = None;
    for mask in 0u32..(1 << a.len()) {
        let indices: Vec<usize> = (0..a.len()).filter(|i| mask & (1 << i) != 0).collect();
        let seq: Vec<u8> = indices.iter().map(|&i| a[i]).collect();
        // subsequence test against b
        let mut it = b.iter();
        if !seq.iter().all(|c| it.any(|x| x == c)) {
            continue;
        }
        let better = match &best {
            None => true,
            Some((len, tuple)) => seq.len() > *len || (seq.len() == *len && indices < *tuple),
        };
        if better {
            best = Some((seq.len(), indices));
        }
    }
    best.map(|(_, idx)| idx.iter().map(|&i| a[i]).collect())
        .unwrap_or_default()
}

fn to_tokens(seq: &[u8]) -> Vec<Token> {
    const NAMES: [&str; 4] = ["a", "b", "c", "d"];
    seq.iter()
        .map(|&c| Token::parse(NAMES[c as usize]))
        .collect()
}

#[test]
fn distance_and_lcs_match_exhaustive_oracles() {
    let started = Instant::now();
    // every sequence pair over a 4-token alphabet with combined length <= 8
    let mut sequences_by_len: Vec<Vec<Vec<u8>>> = vec![vec![vec![]]; 1];
    for len in 1..=8usize {
        let mut level = Vec::new();
        for shorter in &sequences_by_len[len - 1] {
            for c in 0..4u8 {
                let mut s = shorter.clone();
                s.push(c);
                level.push(s);
            }
        }
        sequences_by_len.push(level);
    }
    let mut pairs = 0u64;
    for la in 0..=8usize {
        for lb in 0..=(8 - la) {
            for a in &sequences_by_len[la] {
                for b in &sequences_by_len[lb] {
                    check_pair(a, b);
                    pairs += 1;
                }
            }
        }
    }
    // plus sampled pairs covering every length combination up to 8x8
    let mut rng = ChaCha8Rng::seed_from_u64(0x10C5);
    for _ in 0..2_000 {
        let la = rng.gen_range(0..=8usize);
        let lb = rng.gen_range(0..=8usize);
        let a: Vec<u8> = (0..la).map(|_| rng.gen_range(0..4u8)).collect();
        let b: Vec<u8> = (0..lb).map(|_| rng.gen_range(0..4u8)).collect();
        check_pair(&a, &b);
        pairs += 1;
    }
    let elapsed = started.elapsed();
    println!("acceptance distance-lcs-oracles: PASS ({pairs} pairs exact in {elapsed:?})");

    fn check_pair(a: &[u8], b: &[u8]) {
        let (ta, tb) = (to_tokens(a), to_tokens(b));
        assert_eq!(
            token_levenshtein(&ta, &tb),
            levenshtein_oracle(a, b),
            "distance mismatch for {a:?} vs {b:?}"
        );
        assert_eq!(
            efparse::align::lcs_tokens(&ta, &tb),
            to_tokens(&lcs_oracle(a, b)),
            "lcs mismatch for {a:?} vs {b:?}"
        );
    }
}

#[test]
fn end_to_end_rendered_templates_always_match() {
    // all fixture configurations with correction enabled
    let outputs = [
        run_fixture(PipelineConfig::default()),
        run_fixture(PipelineConfig {
            adaptive_updates: false,
            ..Default::default()
        }),
    ];
    let mut checked = 0usize;
    for output in &outputs {
        for r in &output.results {
            let record = LogRecord::new(r.line_id, r.raw.clone());
            let template = Template::parse(&r.rendered).unwrap();
            assert!(
                match_template(&template, &record).is_some(),
                "fixture: {} does not match {}",
                r.rendered,
                r.raw
            );
            checked += 1;
        }
    }

    // fuzzed logs through an adversarial mock
    let script = "\
extract | q0 | <*> <*> mangled , <*>\n\
extract | q1 | totally unrelated constant text\n\
extract | q2 | <*>\n\
extract | * | {target}\n\
merge | * | {left}\n\
confirm | * |\n";
    let mut parser = Parser::new(
        PipelineConfig::default(),
        Arc::new(Lexicon::bundled().clone()),
        Gateway::with_mock(MockScript::parse(script).unwrap()),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(0xF422);
    let vocab = [
        "q0", "q1", "q2", "run", "stop", "77", "x-1", "<*>", "a.b.c", "::", "payload",
    ];
    let lines: Vec<String> = (0..1_000)
        .map(|_| {
            let len = rng.gen_range(1..=12usize);
            (0..len)
                .map(|_| vocab[rng.gen_range(0..vocab.len())])
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let output = parser.parse_stream(lines);
    for r in &output.results {
        let record = LogRecord::new(r.line_id, r.raw.clone());
        let template = Template::parse(&r.rendered).unwrap();
        assert!(
            match_template(&template, &record).is_some(),
            "fuzz: {} does not match {}",
            r.rendered,
            r.raw
        );
        checked += 1;
    }
    assert!(checked >= 1_000 + 400);
    println!("acceptance end-to-end-soundness: PASS ({checked} results all match their logs)");
}

#[test]
fn throughput_sustains_100k_lines() {
    let bases: Vec<String> = (0..20)
        .map(|i| format!("service-{i} request <*> handled in <*> with result <*>"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7007);
    let mut lines = Vec::with_capacity(100_000);
    for i in 0..100_000usize {
        if i % 10 == 9 {
            // unique pattern: always misses the tree
            let len = 3 + (i / 10) % 30;
            let line: Vec<String> = (0..len)
                .map(|k| format!("u{:x}{k}", rng.gen::<u32>()))
                .collect();
            lines.push(line.join(" "));
        } else {
            let base = &bases[i % bases.len()];
            let line = base
                .replacen("<*>", &format!("req{}", rng.gen::<u16>()), 1)
                .replacen("<*>", &format!("{}ms", rng.gen::<u16>()), 1)
                .replacen("<*>", if i % 2 == 0 { "ok" } else { "retry" }, 1);
            lines.push(line);
        }
    }
    let mut script = String::new();
    for i in 0..20 {
        script += &format!(
            "extract | Log: service-{i} request | service-{i} request <*> handled in <*> with result <*>\n"
        );
    }
    script += "extract | * | {target}\nmerge | * | {left}\nconfirm | * |\n";
    let mut parser = Parser::new(
        PipelineConfig::default(),
        Arc::new(Lexicon::bundled().clone()),
        Gateway::with_mock(MockScript::parse(&script).unwrap()),
    );
    let started = Instant::now();
    let output = parser.parse_stream(lines);
    let elapsed = started.elapsed();
    assert_eq!(output.stats.lines, 100_000);
    assert!(
        output.stats.hit_rate() >= 0.85,
        "corpus should be hit-dominated, got {:.3}",
        output.stats.hit_rate()
    );
    assert!(
        elapsed < Duration::from_secs(60),
        "100k lines took {elapsed:?}"
    );
    println!(
        "acceptance throughput: PASS (100000 lines in {:?}, hit rate {:.3})",
        elapsed,
        output.stats.hit_rate()
    );
}
