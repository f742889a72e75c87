use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flowsum::document::{summarize_document, DocumentOptions, SummaryDocument};
use flowsum::dot::validate_dot;
use flowsum::graph::{load_graph_files, LoadOptions};
use flowsum::settings::KEYS;
use flowsum::summarize::SummarizeConfig;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn flowsum(args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_flowsum"));
    for key in KEYS {
        cmd.env_remove(format!("FLOWSUM_{}", key.to_uppercase()));
    }
    cmd.env("RUST_LOG", "error").args(args).output().expect("binary runs")
}

fn tiny() -> String {
    fixtures().join("tiny").display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn golden_summary_matches_cli_and_library() {
    let golden_path = fixtures().join("tiny_k3_l9.json");
    let out = flowsum(&["summarize", "--input", &tiny(), "--k", "3", "--l", "9"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cli = stdout(&out);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden_path, &cli).unwrap();
    }
    let golden = std::fs::read_to_string(&golden_path).unwrap();
    assert_eq!(cli, golden);

    let dir = fixtures().join("tiny");
    let g = load_graph_files(&dir.join("edges.tsv"), Some(&dir.join("meta.jsonl")), LoadOptions::default()).unwrap();
    let cfg = SummarizeConfig {
        k: 3,
        l: 9,
        ..Default::default()
    };
    let doc = summarize_document(&g, &cfg, &DocumentOptions::default()).unwrap();
    assert_eq!(doc.to_json_pretty().unwrap() + "\n", golden);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["summarize", "--input", &tiny(), "--k", "3", "--seed", "9"];
    assert_eq!(stdout(&flowsum(&args)), stdout(&flowsum(&args)));
}

#[test]
fn summarize_writes_files() {
    let tmp = tempfile::tempdir().unwrap();
    let json = tmp.path().join("s.json");
    let dot = tmp.path().join("s.dot");
    let report = tmp.path().join("r.json");
    let out = flowsum(&[
        "summarize",
        "--input",
        &tiny(),
        "--k",
        "3",
        "--no-members",
        "--out",
        json.to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
        "--dot-labels",
        "fields",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc = SummaryDocument::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc.config.l, 6);
    assert!(doc.clusters.iter().all(|c| c.members.is_none()));
    assert!(doc.diagnostics.timings.is_none());
    let dot_text = std::fs::read_to_string(&dot).unwrap();
    validate_dot(&dot_text).unwrap();
    assert!(dot_text.contains("networking"));
    let diag: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(diag["timings"]["total_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn augmentation_defaults_are_echoed() {
    let out = flowsum(&["summarize", "--input", &tiny(), "--k", "3", "--augment", "venue", "--augment-time"]);
    assert!(out.status.success());
    let doc = SummaryDocument::from_json(&stdout(&out)).unwrap();
    assert_eq!(doc.config.params.lambda_aug, 2.0);
    assert_eq!(doc.config.params.lambda_decay, 1.11);
    assert!(doc.config.augment.time);
}

#[test]
fn environment_overrides_config_file_and_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("flowsum.conf");
    std::fs::write(&conf, "k = 4\nseed = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_flowsum"))
        .args(["summarize", "--input", &tiny(), "--config", conf.to_str().unwrap(), "--seed", "2"])
        .env("FLOWSUM_SEED", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc = SummaryDocument::from_json(&stdout(&out)).unwrap();
    assert_eq!((doc.config.k, doc.config.l, doc.config.seed), (4, 8, 3));
}

#[test]
fn invalid_config_exits_2() {
    for args in [
        vec!["summarize", "--input", &tiny(), "--k", "1"],
        vec!["summarize", "--input", &tiny(), "--k", "3", "--l", "0"],
        vec!["summarize", "--input", &tiny(), "--similarity", "cosine"],
        vec!["summarize", "--input", "/nonexistent/dir"],
    ] {
        let out = flowsum(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn extract_writes_subgraph() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("sub");
    let out = flowsum(&["extract", "--input", &tiny(), "--source", "b1", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "nodes: 7\nlinks: 8\n");
    let sub = load_graph_files(&out_dir.join("edges.tsv"), Some(&out_dir.join("meta.jsonl")), LoadOptions::default())
        .unwrap();
    assert_eq!(sub.node_id(0), "b1");
    assert_eq!(sub.meta(0).venue.as_deref(), Some("SENSYS"));
}

#[test]
fn extract_reverse_follows_citations_backwards() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("rev");
    let out = flowsum(&[
        "extract",
        "--input",
        &tiny(),
        "--source",
        "c1",
        "--reverse",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    // everything upstream of c1: root, a1..a4, b1..b4
    assert_eq!(stdout(&out).lines().next(), Some("nodes: 10"));
}

#[test]
fn extract_unknown_source_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = flowsum(&["extract", "--input", &tiny(), "--source", "nope", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let args = ["verify", "--seed", "7", "--cases", "200", "--floor-cases", "10"];
    let a = flowsum(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), "all 612 checks passed\n");
    assert_eq!(stdout(&a), stdout(&flowsum(&args)));
}

#[test]
fn verify_reports_injected_fault() {
    let out = flowsum(&["verify", "--cases", "5", "--floor-cases", "0", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAILED identity.km[0]:"), "{text}");
    assert!(text.ends_with("1 of 17 checks failed\n"));
}
