//! The serialized summary: JSON document and Graphviz DOT rendering.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{maximal_influence_graph, InfluenceGraph};
use crate::labeling::{cluster_labels, ClusterLabel, Stopwords};
use crate::pruning::{prune, SummaryGraph};
use crate::summarize::{summarize_pipeline, Diagnostics, SummarizeConfig};

pub const SCHEMA_VERSION: &str = "1.0";

/// JSON schema every [`SummaryDocument`] validates against.
pub const SUMMARY_SCHEMA: &str = include_str!("../schema/summary_document.schema.json");

/// Members listed per cluster in `sample_members`.
pub const SAMPLE_MEMBERS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Keyword {
    pub term: String,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldCount {
    pub field: String,
    pub count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub keywords: Vec<Keyword>,
    pub top_fields: Vec<FieldCount>,
}

impl From<&ClusterLabel> for LabelEntry {
    fn from(l: &ClusterLabel) -> Self {
        LabelEntry {
            keywords: l
                .keywords
                .iter()
                .map(|(term, score)| Keyword {
                    term: term.clone(),
                    score: *score,
                })
                .collect(),
            top_fields: l
                .top_fields
                .iter()
                .map(|(field, count)| FieldCount {
                    field: field.clone(),
                    count: *count,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub id: usize,
    pub size: usize,
    pub label: LabelEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
    /// Highest in-degree members first.
    pub sample_members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowEntry {
    pub src: usize,
    pub dst: usize,
    pub raw_sum: f64,
    pub rate: f64,
    pub normalized_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryDocument {
    pub schema_version: String,
    pub config: SummarizeConfig,
    /// Id of the source node.
    pub source: String,
    pub source_cluster: usize,
    pub clusters: Vec<ClusterEntry>,
    pub flows: Vec<FlowEntry>,
    pub diagnostics: Diagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub job: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cached: Option<bool>,
}

/// Output shaping for [`summarize_document`].
#[derive(Clone, Debug)]
pub struct DocumentOptions {
    pub keywords: usize,
    pub fields: usize,
    pub include_members: bool,
    /// Wall-clock timings make output non-reproducible; off by default.
    pub include_timings: bool,
    pub stopwords: Stopwords,
}

impl Default for DocumentOptions {
    fn default() -> Self {
        DocumentOptions {
            keywords: 5,
            fields: 3,
            include_members: true,
            include_timings: false,
            stopwords: Stopwords::default(),
        }
    }
}

/// Nodes of `members` sorted by in-degree (descending), then index.
pub fn by_in_degree(g: &InfluenceGraph, members: &[usize]) -> Vec<usize> {
    let mut v = members.to_vec();
    v.sort_by(|&a, &b| g.in_degree(b).cmp(&g.in_degree(a)).then(a.cmp(&b)));
    v
}

impl SummaryDocument {
    /// Assembles the document for an already pruned summary of `g`.
    pub fn new(
        g: &InfluenceGraph,
        source_node: usize,
        config: &SummarizeConfig,
        summary: &SummaryGraph,
        labels: &[ClusterLabel],
        diagnostics: Diagnostics,
        include_members: bool,
    ) -> Self {
        let clusters = summary
            .clusters
            .iter()
            .map(|c| {
                let ids = |nodes: &[usize]| -> Vec<String> {
                    nodes.iter().map(|&i| g.node_id(i).to_string()).collect()
                };
                let mut sample = by_in_degree(g, &c.members);
                sample.truncate(SAMPLE_MEMBERS);
                ClusterEntry {
                    id: c.id,
                    size: c.size,
                    label: labels.get(c.id).map(LabelEntry::from).unwrap_or_default(),
                    members: include_members.then(|| ids(&c.members)),
                    sample_members: ids(&sample),
                }
            })
            .collect();
        let flows = summary
            .flows
            .iter()
            .map(|f| FlowEntry {
                src: f.src,
                dst: f.dst,
                raw_sum: f.raw_sum,
                rate: f.rate,
                normalized_rate: f.normalized_rate,
            })
            .collect();
        SummaryDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            config: config.clone(),
            source: g.node_id(source_node).to_string(),
            source_cluster: summary.source_cluster,
            clusters,
            flows,
            diagnostics,
            job: None,
            cached: None,
        }
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Pipeline, pruning and labeling for the graph whose node 0 is the source
/// (as produced by [`maximal_influence_graph`]).
pub fn summarize_document(
    g: &InfluenceGraph,
    cfg: &SummarizeConfig,
    opts: &DocumentOptions,
) -> Result<SummaryDocument> {
    if g.is_empty() {
        return Err(Error::Validation("cannot summarize an empty graph".into()));
    }
    let mut out = summarize_pipeline(g, cfg)?;
    let t = Instant::now();
    let summary = prune(&out.flows, &out.assignment, cfg.prune, cfg.l, 0);
    let pruning_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let mut labels = cluster_labels(g.metas(), &out.assignment, opts.keywords, &opts.stopwords);
    if opts.fields != opts.keywords {
        for l in &mut labels {
            l.top_fields.truncate(opts.fields);
        }
    }
    let labeling_ms = t.elapsed().as_secs_f64() * 1e3;

    if opts.include_timings {
        if let Some(tm) = out.diagnostics.timings.as_mut() {
            tm.pruning_ms = Some(pruning_ms);
            tm.labeling_ms = Some(labeling_ms);
            tm.total_ms += pruning_ms + labeling_ms;
        }
    } else {
        out.diagnostics.timings = None;
    }
    Ok(SummaryDocument::new(
        g,
        0,
        cfg,
        &summary,
        &labels,
        out.diagnostics,
        opts.include_members,
    ))
}

/// Extracts the maximal influence graph of `source` and summarizes it.
pub fn summarize_source(
    g: &InfluenceGraph,
    source: &str,
    cfg: &SummarizeConfig,
    opts: &DocumentOptions,
) -> Result<SummaryDocument> {
    let sub = maximal_influence_graph(g, source)?;
    summarize_document(&sub, cfg, opts)
}

/// Which part of a cluster label is shown.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    #[default]
    Keywords,
    Fields,
}

fn escape_dot(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

/// Pen width for `rate`, linear from 1 (weakest flow) to 8 (strongest).
pub fn pen_width(rate: f64, min: f64, max: f64) -> f64 {
    if max > min {
        1.0 + 7.0 * (rate - min) / (max - min)
    } else {
        8.0
    }
}

/// Graphviz digraph of the summary. Node labels read `size` and up to three
/// label terms on the next line; edge pen widths scale with the normalized
/// flow rate.
pub fn to_dot(doc: &SummaryDocument, mode: LabelMode) -> String {
    let mut s = String::new();
    s.push_str("digraph summary {\n");
    s.push_str("  rankdir=TB;\n");
    s.push_str("  node [shape=ellipse, fontname=\"Helvetica\"];\n");
    for c in &doc.clusters {
        let terms: Vec<&str> = match mode {
            LabelMode::Keywords => c.label.keywords.iter().take(3).map(|k| k.term.as_str()).collect(),
            LabelMode::Fields => c.label.top_fields.iter().take(3).map(|f| f.field.as_str()).collect(),
        };
        let label = format!("{}\n{}", c.size, terms.join(", "));
        let _ = write!(s, "  c{} [label=\"{}\"", c.id, escape_dot(&label));
        if c.id == doc.source_cluster {
            s.push_str(", peripheries=2");
        }
        s.push_str("];\n");
    }
    let (min, max) = doc.flows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| {
        (lo.min(f.normalized_rate), hi.max(f.normalized_rate))
    });
    for f in &doc.flows {
        let _ = writeln!(
            s,
            "  c{} -> c{} [penwidth={:.3}, label=\"{:.4}\"];",
            f.src,
            f.dst,
            pen_width(f.normalized_rate, min, max),
            f.normalized_rate
        );
    }
    s.push_str("}\n");
    s
}
