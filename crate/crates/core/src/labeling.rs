//! Human-readable cluster labels from titles, abstracts and field tags.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeMeta;
use crate::summarize::ClusterAssignment;

const BUILTIN_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// Terms seen fewer times than this in the whole corpus are never labels.
pub const MIN_CORPUS_FREQUENCY: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Default for Stopwords {
    fn default() -> Self {
        Self::parse(BUILTIN_STOPWORDS)
    }
}

impl Stopwords {
    /// One lowercase token per line; blank lines ignored.
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty())
                .collect(),
        )
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterLabel {
    pub cluster: usize,
    /// `(term, score)`, best first.
    pub keywords: Vec<(String, f64)>,
    /// `(tag, count)`, most frequent first.
    pub top_fields: Vec<(String, usize)>,
}

/// Lowercased alphanumeric tokens of `text` minus stopwords.
pub fn tokenize<'a>(text: &'a str, stopwords: &'a Stopwords) -> impl Iterator<Item = String> + 'a {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .filter(move |t| !stopwords.contains(t))
}

fn node_tokens(meta: &NodeMeta, stopwords: &Stopwords) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for text in [meta.title.as_deref(), meta.abstract_text.as_deref()]
        .into_iter()
        .flatten()
    {
        out.extend(tokenize(text, stopwords));
    }
    out
}

/// Per-cluster keywords scored by `freq_in_cluster / freq_in_corpus`.
///
/// Frequencies count token occurrences in titles and abstracts. Ties are
/// broken by cluster frequency (descending), then alphabetically.
pub fn keyword_labels(
    meta: &[NodeMeta],
    asg: &ClusterAssignment,
    top_n: usize,
    stopwords: &Stopwords,
) -> Vec<ClusterLabel> {
    if meta.is_empty() {
        return Vec::new();
    }
    let k = asg.effective_k();
    let mut corpus: HashMap<String, usize> = HashMap::new();
    let mut per_cluster: Vec<HashMap<String, usize>> = vec![HashMap::new(); k];
    for (i, m) in meta.iter().enumerate() {
        let c = asg.label(i);
        for tok in node_tokens(m, stopwords) {
            *per_cluster[c].entry(tok.clone()).or_insert(0) += 1;
            *corpus.entry(tok).or_insert(0) += 1;
        }
    }
    per_cluster
        .into_iter()
        .enumerate()
        .map(|(cluster, counts)| {
            let mut scored: Vec<(String, f64, usize)> = counts
                .into_iter()
                .filter_map(|(term, count)| {
                    let total = corpus[&term];
                    (total >= MIN_CORPUS_FREQUENCY)
                        .then(|| (term, count as f64 / total as f64, count))
                })
                .collect();
            scored.sort_by(|a, b| {
                b.1.partial_cmp(&a.1)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(b.2.cmp(&a.2))
                    .then(a.0.cmp(&b.0))
            });
            scored.truncate(top_n);
            ClusterLabel {
                cluster,
                keywords: scored.into_iter().map(|(t, s, _)| (t, s)).collect(),
                top_fields: Vec::new(),
            }
        })
        .collect()
}

/// Most frequent `fields` tags per cluster; ties alphabetical.
pub fn field_labels(meta: &[NodeMeta], asg: &ClusterAssignment, top_n: usize) -> Vec<ClusterLabel> {
    if meta.is_empty() {
        return Vec::new();
    }
    let mut per_cluster: Vec<BTreeMap<&str, usize>> = vec![BTreeMap::new(); asg.effective_k()];
    for (i, m) in meta.iter().enumerate() {
        let mut seen: Vec<&str> = m.fields.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for tag in seen {
            *per_cluster[asg.label(i)].entry(tag).or_insert(0) += 1;
        }
    }
    per_cluster
        .into_iter()
        .enumerate()
        .map(|(cluster, counts)| {
            let mut v: Vec<(String, usize)> =
                counts.into_iter().map(|(t, c)| (t.to_string(), c)).collect();
            // BTreeMap order is alphabetical; stable sort keeps it on ties
            v.sort_by_key(|e| std::cmp::Reverse(e.1));
            v.truncate(top_n);
            ClusterLabel {
                cluster,
                keywords: Vec::new(),
                top_fields: v,
            }
        })
        .collect()
}

/// Keywords and fields combined, one entry per cluster.
pub fn cluster_labels(
    meta: &[NodeMeta],
    asg: &ClusterAssignment,
    top_n: usize,
    stopwords: &Stopwords,
) -> Vec<ClusterLabel> {
    let mut labels: Vec<ClusterLabel> = (0..asg.effective_k())
        .map(|cluster| ClusterLabel {
            cluster,
            ..Default::default()
        })
        .collect();
    for l in keyword_labels(meta, asg, top_n, stopwords) {
        labels[l.cluster].keywords = l.keywords;
    }
    for l in field_labels(meta, asg, top_n) {
        labels[l.cluster].top_fields = l.top_fields;
    }
    labels
}
