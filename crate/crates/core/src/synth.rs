//! Seeded synthetic graph generators for tests, benchmarks and fixtures.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{GraphBuilder, InfluenceGraph, NodeMeta};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_graph(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> InfluenceGraph {
    let edges: Vec<(usize, usize, f64)> = edges.into_iter().map(|(i, j)| (i, j, 1.0)).collect();
    InfluenceGraph::from_edge_list(n, &edges).expect("generated edges are in range")
}

/// Directed graph with each ordered pair `i != j` present with probability `p`.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> InfluenceGraph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && r.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    unit_graph(n, edges)
}

/// DAG over the order `0..n` with each forward pair present with probability `p`.
pub fn random_dag(n: usize, p: f64, seed: u64) -> InfluenceGraph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if r.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    unit_graph(n, edges)
}

/// Parameters of the layered planted-flow generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayeredParams {
    pub layers: usize,
    pub layer_size: usize,
    /// Edge probability from each layer to the next one.
    pub chain_p: f64,
    /// Edge probability for every other ordered pair.
    pub noise_p: f64,
}

impl Default for LayeredParams {
    fn default() -> Self {
        LayeredParams {
            layers: 4,
            layer_size: 50,
            chain_p: 0.15,
            noise_p: 0.01,
        }
    }
}

/// Layers `0..layers` of equal size, dense edges from layer `t` to `t + 1`
/// and sparse noise elsewhere. Returns the graph and the planted layer of
/// every node.
pub fn layered_planted(params: LayeredParams, seed: u64) -> (InfluenceGraph, Vec<usize>) {
    let mut r = rng(seed);
    let n = params.layers * params.layer_size;
    let layer = |i: usize| i / params.layer_size;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let p = if layer(j) == layer(i) + 1 {
                params.chain_p
            } else {
                params.noise_p
            };
            if r.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add_node(NodeMeta {
            title: Some(format!("layer{} study {i}", layer(i))),
            fields: vec![format!("L{}", layer(i))],
            year: Some(1990 + layer(i) as i32 * 5),
            ..NodeMeta::new(format!("n{i}"))
        })
        .expect("valid metadata");
    }
    for (i, j) in edges {
        b.add_edge(i, j, 1.0).expect("valid edge");
    }
    (b.build(), (0..n).map(layer).collect())
}

const TOPIC_WORDS: [[&str; 4]; 10] = [
    ["routing", "wireless", "mesh", "protocol"],
    ["mining", "pattern", "frequent", "itemset"],
    ["query", "index", "join", "optimizer"],
    ["learning", "kernel", "classifier", "margin"],
    ["graph", "partition", "spectral", "cut"],
    ["retrieval", "ranking", "relevance", "search"],
    ["vision", "image", "segmentation", "texture"],
    ["privacy", "anonymity", "disclosure", "release"],
    ["stream", "sketch", "window", "approximate"],
    ["social", "influence", "community", "diffusion"],
];

const VENUES: [&str; 10] = [
    "MOBICOM", "KDD", "SIGMOD", "ICML", "SODA", "SIGIR", "CVPR", "PODS", "VLDB", "WWW",
];

/// Parameters of the citation-style influence DAG generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CitationParams {
    pub nodes: usize,
    pub topics: usize,
    /// Each paper cites `1..=max_refs` earlier papers.
    pub max_refs: usize,
    /// Probability that a reference stays within the citing paper's topic.
    pub topic_affinity: f64,
}

impl Default for CitationParams {
    fn default() -> Self {
        CitationParams {
            nodes: 500,
            topics: 10,
            max_refs: 5,
            topic_affinity: 0.8,
        }
    }
}

/// Influence DAG grown in time order: paper `i` cites earlier papers chosen
/// preferentially by citation count, mostly from its own topic, and every
/// citation becomes an influence edge `cited -> citing`. Paper 0 is the root
/// and reaches every other node. Titles, venues, years and field tags are
/// filled in from the topic.
pub fn citation_dag(params: CitationParams, seed: u64) -> InfluenceGraph {
    let mut r = rng(seed);
    let topics = params.topics.clamp(1, TOPIC_WORDS.len());
    let n = params.nodes;
    let topic: Vec<usize> = (0..n).map(|_| r.random_range(0..topics)).collect();
    // urns hold each paper once plus once per citation received
    let mut urn_all: Vec<usize> = Vec::new();
    let mut urn_topic: Vec<Vec<usize>> = vec![Vec::new(); topics];
    let mut edges = Vec::new();
    for i in 0..n {
        if i > 0 {
            let refs = r.random_range(1..=params.max_refs.max(1)).min(i);
            let mut cited = BTreeSet::new();
            let mut attempts = 0;
            while cited.len() < refs && attempts < 20 * refs {
                attempts += 1;
                let own = &urn_topic[topic[i]];
                let pick = if !own.is_empty() && r.random::<f64>() < params.topic_affinity {
                    own[r.random_range(0..own.len())]
                } else {
                    urn_all[r.random_range(0..urn_all.len())]
                };
                cited.insert(pick);
            }
            for &j in &cited {
                edges.push((j, i));
                urn_all.push(j);
                urn_topic[topic[j]].push(j);
            }
        }
        urn_all.push(i);
        urn_topic[topic[i]].push(i);
    }
    let mut b = GraphBuilder::new();
    for i in 0..n {
        let words = &TOPIC_WORDS[topic[i]];
        let a = words[r.random_range(0..4)];
        let c = words[r.random_range(0..4)];
        b.add_node(NodeMeta {
            title: Some(format!("{a} {c} methods")),
            venue: Some(VENUES[topic[i]].to_string()),
            year: Some(1980 + (i * 30 / n.max(1)) as i32),
            fields: vec![VENUES[topic[i]].to_lowercase()],
            ..NodeMeta::new(format!("p{i}"))
        })
        .expect("valid metadata");
    }
    for (i, j) in edges {
        b.add_edge(i, j, 1.0).expect("valid edge");
    }
    b.build()
}

/// Sparse graph with `n * avg_out_degree` edges (rounded) in which every node
/// is reachable from node 0: a random arborescence rooted at 0 plus uniformly
/// random extra edges.
pub fn sparse_reachable(n: usize, avg_out_degree: f64, seed: u64) -> InfluenceGraph {
    let mut r = rng(seed);
    let target = ((n as f64) * avg_out_degree).round() as usize;
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 1..n {
        edges.insert((r.random_range(0..i), i));
    }
    let max_edges = n.saturating_mul(n.saturating_sub(1));
    while edges.len() < target.min(max_edges) {
        let (i, j) = (r.random_range(0..n), r.random_range(0..n));
        if i != j {
            edges.insert((i, j));
        }
    }
    unit_graph(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::reachable_from;

    #[test]
    fn dag_edges_point_forward() {
        let g = random_dag(30, 0.2, 7);
        assert!(g.edges().all(|(i, j, _)| i < j));
        assert_eq!(g, random_dag(30, 0.2, 7));
        assert_ne!(g, random_dag(30, 0.2, 8));
    }

    #[test]
    fn digraph_has_no_self_loops() {
        let g = random_digraph(20, 0.3, 1);
        assert!(g.edges().all(|(i, j, _)| i != j));
        assert!(g.edge_count() > 0);
    }

    #[test]
    fn layered_shape() {
        let (g, labels) = layered_planted(LayeredParams::default(), 3);
        assert_eq!(g.node_count(), 200);
        assert_eq!(labels[0], 0);
        assert_eq!(labels[199], 3);
        let chain = g.edges().filter(|&(i, j, _)| labels[j] == labels[i] + 1).count();
        // expected 3 * 50 * 50 * 0.15 = 1125 chain edges vs ~400 noise edges
        assert!((900..1350).contains(&chain), "{chain}");
        assert!(g.edge_count() - chain < 600);
    }

    #[test]
    fn citation_dag_is_rooted() {
        let g = citation_dag(CitationParams::default(), 11);
        assert_eq!(g.node_count(), 500);
        assert!(g.edges().all(|(i, j, _)| i < j));
        assert_eq!(reachable_from(&g, 0).len(), 500);
        assert!(g.meta(10).title.is_some());
    }

    #[test]
    fn sparse_reachable_counts() {
        let g = sparse_reachable(1000, 3.0, 5);
        assert_eq!(g.edge_count(), 3000);
        assert_eq!(reachable_from(&g, 0).len(), 1000);
    }
}
