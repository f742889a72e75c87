//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flowsum::document::{summarize_document, to_dot, DocumentOptions, LabelMode, SummaryDocument, SUMMARY_SCHEMA};
use flowsum::dot::validate_dot;
use flowsum::metrics::adjusted_rand_index;
use flowsum::pruning::rank_filter;
use flowsum::similarity::{MatrixKind, SimilarityKind, SimilarityMatrix};
use flowsum::summarize::{
    eigen_init, summarize_pipeline, symnmf, ClusterAssignment, FactorMatrix, FlowMatrix, ObjectiveKind,
    SummarizeConfig,
};
use flowsum::synth::{citation_dag, layered_planted, sparse_reachable, CitationParams, LayeredParams};
use flowsum::verify::{run_verification, VerifyOptions};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn within(elapsed: Duration, limit_s: f64) -> (bool, String) {
    let s = elapsed.as_secs_f64();
    (s < limit_s, format!("{s:.2} s (limit {limit_s} s)"))
}

fn identities() -> Outcome {
    let t = Instant::now();
    let r = run_verification(VerifyOptions {
        cases: 200,
        floor_cases: 0,
        ..Default::default()
    });
    let (fast, time) = within(t.elapsed(), 10.0);
    let identity: Vec<_> = r.checks.iter().filter(|c| c.name.starts_with("identity.")).collect();
    let failed = identity.iter().filter(|c| !c.passed).count();
    outcome(
        failed == 0 && identity.len() == 600 && fast,
        format!("{} identity checks, {failed} failed, {time}", identity.len()),
    )
}

fn oracle_floor() -> Outcome {
    let t = Instant::now();
    let r = run_verification(VerifyOptions {
        cases: 0,
        floor_cases: 50,
        ..Default::default()
    });
    let (fast, time) = within(t.elapsed(), 60.0);
    let hand_ok = r
        .checks
        .iter()
        .filter(|c| c.name.starts_with("brute_force."))
        .all(|c| c.passed);
    let floors: Vec<_> = r.checks.iter().filter(|c| c.name.starts_with("floor[")).collect();
    let failed: Vec<String> = floors
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} {}", c.name, c.detail))
        .collect();
    outcome(
        hand_ok && floors.len() == 50 && failed.is_empty() && fast,
        format!(
            "hand cases {}, {}/50 DAGs at >= 0.5 x optimum, {time}{}",
            if hand_ok { "ok" } else { "WRONG" },
            floors.len() - failed.len(),
            if failed.is_empty() { String::new() } else { format!("; {}", failed.join("; ")) }
        ),
    )
}

fn planted_recovery() -> Outcome {
    let t = Instant::now();
    let mut aris = Vec::new();
    for seed in 0..10u64 {
        let (g, truth) = layered_planted(LayeredParams::default(), seed);
        let cfg = SummarizeConfig {
            seed,
            ..SummarizeConfig::with_k(4)
        };
        let ari = summarize_pipeline(&g, &cfg)
            .and_then(|out| adjusted_rand_index(out.assignment.labels(), &truth))
            .unwrap_or(f64::NAN);
        aris.push(ari);
    }
    let (fast, time) = within(t.elapsed(), 30.0);
    let good = aris.iter().filter(|&&a| a >= 0.9).count();
    let min = aris.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        good >= 8 && fast,
        format!("ARI >= 0.9 on {good}/10 seeds (min {min:.4}), {time}"),
    )
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> SimilarityMatrix {
    let density = rng.random_range(0.1..0.9);
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            if rng.random::<f64>() < density {
                let v = rng.random::<f64>();
                d[i][j] = v;
                d[j][i] = v;
            }
        }
    }
    SimilarityMatrix::from_dense(&d, MatrixKind::Topology).expect("symmetric by construction")
}

fn symnmf_monotone() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut violations = 0;
    let mut worst = 0.0f64;
    for case in 0..100u64 {
        let n = rng.random_range(2..=60);
        let k = rng.random_range(1..=n.min(8));
        let m = random_symmetric(&mut rng, n);
        let init = eigen_init(&m, k, case).expect("k <= n");
        let out = symnmf(&m, &init.h, 200, 0.0).expect("finite objective");
        for w in out.trace.windows(2) {
            let slack = 1e-8 * w[0].abs().max(f64::MIN_POSITIVE);
            if w[1] > w[0] + slack {
                violations += 1;
                worst = worst.max((w[1] - w[0]) / w[0].abs().max(f64::MIN_POSITIVE));
            }
        }
    }

    // three disjoint all-ones blocks: M = H Hᵀ with H the block indicator
    let blocks = [5usize, 6, 7];
    let n: usize = blocks.iter().sum();
    let block_of: Vec<usize> = blocks.iter().enumerate().flat_map(|(b, &s)| vec![b; s]).collect();
    let dense: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(block_of[i] == block_of[j]))).collect())
        .collect();
    let m = SimilarityMatrix::from_dense(&dense, MatrixKind::Topology).expect("symmetric");
    let h0 = FactorMatrix::from_vec(n, 3, (0..n * 3).map(|_| rng.random_range(0.05..1.0)).collect());
    let residual = symnmf(&m, &h0, 5000, 0.0)
        .map(|o| *o.trace.last().expect("trace is never empty"))
        .unwrap_or(f64::NAN);
    outcome(
        violations == 0 && residual < 1e-6,
        format!("{violations} increases over 100 matrices (worst rel {worst:.2e}), exact fixture residual {residual:.2e}"),
    )
}

struct Comparison {
    cn_wins: usize,
    graphs: usize,
    gains: Vec<(SimilarityKind, f64)>,
    elapsed: Duration,
}

fn comparison_corpus() -> flowsum::Result<Comparison> {
    let t = Instant::now();
    let kinds = [SimilarityKind::Bidirectional, SimilarityKind::RatioAssociation];
    let mut cn_wins = 0;
    let mut gain_sum = [0.0; 2];
    let graphs = 50;
    for seed in 0..graphs as u64 {
        let g = citation_dag(CitationParams::default(), seed);
        let mut at_l = [0.0; 2];
        for (slot, &similarity) in kinds.iter().enumerate() {
            let cfg = SummarizeConfig {
                similarity,
                seed,
                ..SummarizeConfig::with_k(10)
            };
            let out = summarize_pipeline(&g, &cfg)?;
            let at_k = out.flows.captured(10, ObjectiveKind::Squared);
            let at_2k = out.flows.captured(20, ObjectiveKind::Squared);
            at_l[slot] = at_2k;
            gain_sum[slot] += if at_k > 0.0 { at_2k / at_k - 1.0 } else { 0.0 };
        }
        if at_l[0] >= at_l[1] {
            cn_wins += 1;
        }
    }
    Ok(Comparison {
        cn_wins,
        graphs,
        gains: kinds
            .iter()
            .zip(gain_sum)
            .map(|(&k, s)| (k, s / graphs as f64))
            .collect(),
        elapsed: t.elapsed(),
    })
}

fn comparative(c: &flowsum::Result<Comparison>) -> Outcome {
    match c {
        Ok(c) => outcome(
            c.cn_wins * 5 >= c.graphs * 4,
            format!(
                "bidirectional >= ratio association on {}/{} graphs, {:.2} s",
                c.cn_wins,
                c.graphs,
                c.elapsed.as_secs_f64()
            ),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn diminishing(c: &flowsum::Result<Comparison>) -> Outcome {
    match c {
        Ok(c) => {
            let parts: Vec<String> = c
                .gains
                .iter()
                .map(|(k, g)| format!("{k} {:.1}%", g * 100.0))
                .collect();
            outcome(
                c.gains.iter().all(|&(_, g)| g < 0.25),
                format!("mean gain from l = k to l = 2k: {}", parts.join(", ")),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn scaling() -> Outcome {
    let g = sparse_reachable(10_000, 3.0, 1);
    let t = Instant::now();
    let doc = summarize_document(&g, &SummarizeConfig::with_k(20), &DocumentOptions::default());
    let (fast, time) = within(t.elapsed(), 100.0);
    match doc {
        Ok(doc) => outcome(
            fast && !doc.clusters.is_empty(),
            format!("n {}, m {}, {} clusters, {time}", g.node_count(), g.edge_count(), doc.clusters.len()),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn random_flows(rng: &mut ChaCha8Rng) -> (FlowMatrix, ClusterAssignment, usize) {
    let k = rng.random_range(2..=8);
    let sizes: Vec<usize> = (0..k).map(|_| rng.random_range(1..=6)).collect();
    let zero_p = rng.random_range(0.0..0.8);
    let raw: Vec<f64> = (0..k * k)
        .map(|s| {
            let cap = (sizes[s / k] * sizes[s % k]) as f64;
            if rng.random::<f64>() < zero_p {
                0.0
            } else {
                rng.random_range(0.0..cap)
            }
        })
        .collect();
    let labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &s)| vec![c; s]).collect();
    let l = rng.random_range(1..=k * k);
    (FlowMatrix::from_raw(&sizes, &raw), ClusterAssignment::from_labels(&labels, k), l)
}

fn pruning_contracts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut problems = Vec::new();
    for case in 0..100 {
        let (flows, asg, l) = random_flows(&mut rng);
        let k = flows.k();
        let s = rank_filter(&flows, &asg, l);
        if s.flows.len() > l + k {
            problems.push(format!("case {case}: {} flows > l + k = {}", s.flows.len(), l + k));
        }
        let top: Vec<_> = flows
            .ranked()
            .into_iter()
            .filter(|f| f.normalized_rate > 0.0)
            .take(l)
            .collect();
        if let Some(f) = top.iter().find(|f| !s.contains(f.src, f.dst)) {
            problems.push(format!("case {case}: top-l flow {}->{} dropped", f.src, f.dst));
        }
        for dst in (0..k).filter(|&c| c != s.source_cluster) {
            let has_incoming = (0..k).any(|src| src != dst && flows.get(src, dst).normalized_rate > 0.0);
            let kept_incoming = s.flows.iter().any(|f| f.dst == dst && f.src != dst);
            if has_incoming && !kept_incoming {
                problems.push(format!("case {case}: cluster {dst} lost all incoming flows"));
            }
        }
    }

    let mut raw = vec![0.0; 9];
    raw[1] = 2.0;
    raw[5] = 0.5;
    raw[2] = 1.0;
    let hand = rank_filter(&FlowMatrix::from_raw(&[1, 1, 1], &raw), &ClusterAssignment::singletons(3), 1);
    let pairs: Vec<(usize, usize)> = hand.flows.iter().map(|f| (f.src, f.dst)).collect();
    if pairs != [(0, 1), (0, 2)] {
        problems.push(format!("hand example kept {pairs:?}"));
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            "100 random flow matrices and the hand example satisfy all contracts".into()
        } else {
            problems.join("; ")
        },
    )
}

fn serialization() -> Outcome {
    let run = || -> Result<String, String> {
        let g = citation_dag(
            CitationParams {
                nodes: 150,
                ..Default::default()
            },
            3,
        );
        let doc = summarize_document(&g, &SummarizeConfig::with_k(5), &DocumentOptions::default())
            .map_err(|e| e.to_string())?;
        let text = doc.to_json_pretty().map_err(|e| e.to_string())?;
        let back = SummaryDocument::from_json(&text).map_err(|e| e.to_string())?;
        if back != doc {
            return Err("parsed document differs from the original".into());
        }
        if back.to_json_pretty().map_err(|e| e.to_string())? != text {
            return Err("re-serialized JSON differs".into());
        }
        let schema: serde_json::Value = serde_json::from_str(SUMMARY_SCHEMA).map_err(|e| e.to_string())?;
        let instance: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let validator = jsonschema::validator_for(&schema).map_err(|e| e.to_string())?;
        if let Some(err) = validator.iter_errors(&instance).next() {
            return Err(format!("schema violation at {}: {err}", err.instance_path));
        }
        for mode in [LabelMode::Keywords, LabelMode::Fields] {
            validate_dot(&to_dot(&doc, mode)).map_err(|e| format!("{mode:?} DOT: {e}"))?;
        }
        Ok(format!(
            "{} clusters, {} flows round-trip; schema valid; DOT accepted in both label modes",
            doc.clusters.len(),
            doc.flows.len()
        ))
    };
    match run() {
        Ok(detail) => outcome(true, detail),
        Err(detail) => outcome(false, detail),
    }
}

fn main() -> ExitCode {
    let corpus = comparison_corpus();
    let results = [
        ("identity suite", identities()),
        ("oracle floor", oracle_floor()),
        ("planted recovery", planted_recovery()),
        ("symnmf monotonicity", symnmf_monotone()),
        ("bidirectional vs ratio association", comparative(&corpus)),
        ("diminishing flows", diminishing(&corpus)),
        ("10k-node scaling", scaling()),
        ("pruning contracts", pruning_contracts()),
        ("serialization round-trip", serialization()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {}: {tag} {name}: {}", i + 1, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {}/{} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
