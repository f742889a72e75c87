//! Directed influence graphs: storage, loading, reversal, source extraction
//! and author-level projection.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-node attributes. Only `id` is required.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeMeta {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(
        default,
        rename = "abstract",
        skip_serializing_if = "Option::is_none"
    )]
    pub abstract_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub venue: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<String>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl NodeMeta {
    pub fn new(id: impl Into<String>) -> Self {
        NodeMeta {
            id: id.into(),
            ..Default::default()
        }
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.id.is_empty() {
            return Err("empty node id".into());
        }
        if let Some(year) = self.year {
            if !(1000..=3000).contains(&year) {
                return Err(format!("year {year} of node `{}` outside [1000, 3000]", self.id));
            }
        }
        Ok(())
    }
}

/// One orientation of the adjacency structure in compressed sparse row form.
#[derive(Clone, Debug, PartialEq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl Csr {
    /// `edges` must be sorted by (row, col) and free of duplicates.
    fn from_sorted(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(i, _, _) in edges {
            offsets[i + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Csr {
            offsets,
            targets: edges.iter().map(|e| e.1).collect(),
            weights: edges.iter().map(|e| e.2).collect(),
        }
    }

    fn transpose(&self, n: usize) -> Self {
        let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(self.targets.len());
        for i in 0..n {
            for p in self.offsets[i]..self.offsets[i + 1] {
                edges.push((self.targets[p], i, self.weights[p]));
            }
        }
        edges.sort_by_key(|e| (e.0, e.1));
        Csr::from_sorted(n, &edges)
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.offsets[i]..self.offsets[i + 1];
        self.targets[span.clone()]
            .iter()
            .copied()
            .zip(self.weights[span].iter().copied())
    }

    fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }
}

/// Immutable directed weighted graph with dense node indices `0..n`.
///
/// Edges are stored twice (out- and in-orientation) so that both neighbor
/// lists are available in O(degree). Every stored weight is strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct InfluenceGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    meta: Vec<NodeMeta>,
    out: Csr,
    inc: Csr,
    origin: Vec<usize>,
}

impl InfluenceGraph {
    /// Builds a graph whose node ids are the decimal indices `"0".."n-1"`.
    /// Duplicate edges are merged by summing weights.
    pub fn from_edge_list(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut builder = GraphBuilder::new();
        for i in 0..n {
            builder.add_node(NodeMeta::new(i.to_string()))?;
        }
        for &(i, j, w) in edges {
            builder.add_edge(i, j, w)?;
        }
        Ok(builder.build())
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn node_id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn node_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn meta(&self, i: usize) -> &NodeMeta {
        &self.meta[i]
    }

    pub fn metas(&self) -> &[NodeMeta] {
        &self.meta
    }

    /// Index of node `i` in the graph this one was derived from (identity
    /// for graphs built directly from records).
    pub fn origin(&self, i: usize) -> usize {
        self.origin[i]
    }

    pub fn out_neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.out.row(i)
    }

    pub fn in_neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.inc.row(i)
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out.degree(i)
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.inc.degree(i)
    }

    /// All edges as `(source, target, weight)`, ordered by source then target.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |i| self.out.row(i).map(move |(j, w)| (i, j, w)))
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let span = self.out.offsets[i]..self.out.offsets[i + 1];
        match self.out.targets[span.clone()].binary_search(&j) {
            Ok(p) => self.out.weights[span.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.out.weights.iter().sum()
    }

    /// Dense row-major adjacency matrix. Intended for small graphs and tests.
    pub fn dense_adjacency(&self) -> Vec<Vec<f64>> {
        let n = self.node_count();
        let mut a = vec![vec![0.0; n]; n];
        for (i, j, w) in self.edges() {
            a[i][j] = w;
        }
        a
    }

    /// Same graph with every edge direction flipped; metadata untouched.
    pub fn reversed(&self) -> Self {
        InfluenceGraph {
            ids: self.ids.clone(),
            index: self.index.clone(),
            meta: self.meta.clone(),
            out: self.inc.clone(),
            inc: self.out.clone(),
            origin: self.origin.clone(),
        }
    }

    /// Subgraph induced by `nodes`, re-indexed in the given order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Self {
        let mut local = vec![usize::MAX; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            local[old] = new;
        }
        let mut edges = Vec::new();
        for (new, &old) in nodes.iter().enumerate() {
            for (j, w) in self.out.row(old) {
                if local[j] != usize::MAX {
                    edges.push((new, local[j], w));
                }
            }
        }
        edges.sort_by_key(|e| (e.0, e.1));
        let n = nodes.len();
        let out = Csr::from_sorted(n, &edges);
        let inc = out.transpose(n);
        let ids: Vec<String> = nodes.iter().map(|&i| self.ids[i].clone()).collect();
        let index = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        InfluenceGraph {
            ids,
            index,
            meta: nodes.iter().map(|&i| self.meta[i].clone()).collect(),
            out,
            inc,
            origin: nodes.to_vec(),
        }
    }
}

/// Flips every edge of `g`.
pub fn reverse_edges(g: &InfluenceGraph) -> InfluenceGraph {
    g.reversed()
}

/// Nodes reachable from `source` (inclusive) in breadth-first discovery
/// order. Neighbors of a node are visited in ascending external id order.
pub fn reachable_from(g: &InfluenceGraph, source: usize) -> Vec<usize> {
    let mut seen = vec![false; g.node_count()];
    let mut order = vec![source];
    let mut queue = VecDeque::from([source]);
    seen[source] = true;
    let mut frontier: Vec<usize> = Vec::new();
    while let Some(u) = queue.pop_front() {
        frontier.clear();
        frontier.extend(g.out_neighbors(u).map(|(v, _)| v).filter(|&v| !seen[v]));
        frontier.sort_by(|&a, &b| g.node_id(a).cmp(g.node_id(b)));
        for &v in &frontier {
            if !seen[v] {
                seen[v] = true;
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    order
}

/// Induced subgraph on everything reachable from `source`, with `source` at
/// index 0 and the rest in BFS discovery order.
pub fn maximal_influence_graph(g: &InfluenceGraph, source: &str) -> Result<InfluenceGraph> {
    let f = g
        .index_of(source)
        .ok_or_else(|| Error::UnknownNode(source.to_string()))?;
    Ok(g.induced_subgraph(&reachable_from(g, f)))
}

/// Collapses a paper-level graph into an author-level one.
///
/// Each paper edge `p -> q` of weight `w` adds `w` to every author pair
/// `(a, b)` with `a` an author of `p` and `b` an author of `q`. Authors with
/// fewer than `min_papers` papers are dropped before any edge is built.
pub fn project_author_graph(
    g: &InfluenceGraph,
    paper_to_author: &HashMap<String, Vec<String>>,
    min_papers: usize,
) -> Result<InfluenceGraph> {
    let mut paper_authors: Vec<Vec<String>> = Vec::with_capacity(g.node_count());
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut first_seen: Vec<String> = Vec::new();
    for i in 0..g.node_count() {
        let id = g.node_id(i);
        let authors = paper_to_author
            .get(id)
            .ok_or_else(|| Error::Validation(format!("paper `{id}` has no author mapping")))?;
        let mut uniq: Vec<String> = Vec::with_capacity(authors.len());
        for a in authors {
            if !uniq.contains(a) {
                uniq.push(a.clone());
            }
        }
        paper_authors.push(uniq);
    }
    for authors in &paper_authors {
        for a in authors {
            let c = counts.entry(a.as_str()).or_insert(0);
            if *c == 0 {
                first_seen.push(a.clone());
            }
            *c += 1;
        }
    }

    let mut builder = GraphBuilder::new();
    let mut author_index: HashMap<&str, usize> = HashMap::new();
    for a in &first_seen {
        let papers = counts[a.as_str()];
        if papers >= min_papers {
            let mut meta = NodeMeta::new(a.clone());
            meta.extra
                .insert("papers".into(), serde_json::Value::from(papers as u64));
            author_index.insert(a.as_str(), builder.add_node(meta)?);
        }
    }
    for (p, q, w) in g.edges() {
        for a in &paper_authors[p] {
            let Some(&ai) = author_index.get(a.as_str()) else {
                continue;
            };
            for b in &paper_authors[q] {
                if let Some(&bi) = author_index.get(b.as_str()) {
                    builder.add_edge(ai, bi, w)?;
                }
            }
        }
    }
    Ok(builder.build())
}

/// Incremental graph construction. Nodes are indexed in insertion order.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    meta: Vec<NodeMeta>,
    edges: BTreeMap<(usize, usize), f64>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node with metadata. A node id already declared (e.g. by an
    /// edge) has its metadata replaced.
    pub fn add_node(&mut self, meta: NodeMeta) -> Result<usize> {
        meta.validate().map_err(Error::Validation)?;
        if let Some(&i) = self.index.get(&meta.id) {
            self.meta[i] = meta;
            return Ok(i);
        }
        let i = self.ids.len();
        self.ids.push(meta.id.clone());
        self.index.insert(meta.id.clone(), i);
        self.meta.push(meta);
        Ok(i)
    }

    /// Index of `id`, declaring a bare node if it does not exist yet.
    pub fn node(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len();
        self.ids.push(id.to_string());
        self.index.insert(id.to_string(), i);
        self.meta.push(NodeMeta::new(id));
        i
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Adds `weight` to edge `src -> dst`. Zero weights declare nothing.
    pub fn add_edge(&mut self, src: usize, dst: usize, weight: f64) -> Result<()> {
        let n = self.ids.len();
        if src >= n || dst >= n {
            return Err(Error::Validation(format!(
                "edge ({src}, {dst}) references a node outside 0..{n}"
            )));
        }
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::Validation(format!("invalid edge weight {weight}")));
        }
        if weight > 0.0 {
            *self.edges.entry((src, dst)).or_insert(0.0) += weight;
        }
        Ok(())
    }

    pub fn build(self) -> InfluenceGraph {
        let n = self.ids.len();
        let edges: Vec<(usize, usize, f64)> =
            self.edges.into_iter().map(|((i, j), w)| (i, j, w)).collect();
        let out = Csr::from_sorted(n, &edges);
        let inc = out.transpose(n);
        InfluenceGraph {
            ids: self.ids,
            index: self.index,
            meta: self.meta,
            out,
            inc,
            origin: (0..n).collect(),
        }
    }
}

/// Options for [`load_graph`].
#[derive(Clone, Copy, Debug, Default)]
pub struct LoadOptions {
    /// Reject edges whose endpoints are missing from the metadata source.
    /// When false, edge records declare their own nodes.
    pub require_meta: bool,
}

/// Reads a graph from an edge TSV stream and an optional metadata JSONL
/// stream. Metadata nodes are indexed first, in file order, followed by
/// nodes first seen in edge records.
pub fn load_graph<E: BufRead, M: BufRead>(
    edges: E,
    edges_name: &Path,
    meta: Option<(M, &Path)>,
    opts: LoadOptions,
) -> Result<InfluenceGraph> {
    let mut builder = GraphBuilder::new();
    if let Some((reader, name)) = meta {
        for (line_no, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(name, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let record: NodeMeta = serde_json::from_str(trimmed).map_err(|e| Error::Parse {
                path: name.to_path_buf(),
                line: line_no + 1,
                message: e.to_string(),
            })?;
            record.validate().map_err(|message| Error::Parse {
                path: name.to_path_buf(),
                line: line_no + 1,
                message,
            })?;
            builder.add_node(record)?;
        }
    }

    for (line_no, line) in edges.lines().enumerate() {
        let line = line.map_err(|e| Error::io(edges_name, e))?;
        let parse_err = |message: String| Error::Parse {
            path: edges_name.to_path_buf(),
            line: line_no + 1,
            message,
        };
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
        if cols.len() < 2 || cols.len() > 3 || cols[0].is_empty() || cols[1].is_empty() {
            return Err(parse_err(format!(
                "expected `src<TAB>dst[<TAB>weight]`, got {} column(s)",
                cols.len()
            )));
        }
        let weight = match cols.get(2) {
            None => 1.0,
            Some(&"") => 1.0,
            Some(raw) => raw
                .parse::<f64>()
                .map_err(|_| parse_err(format!("weight `{raw}` is not a number")))?,
        };
        if !weight.is_finite() {
            return Err(parse_err(format!("non-finite weight `{weight}`")));
        }
        if weight < 0.0 {
            return Err(parse_err(format!("negative weight {weight}")));
        }
        if opts.require_meta {
            for id in &cols[..2] {
                if !builder.contains(id) {
                    return Err(Error::Validation(format!(
                        "{}:{}: node `{id}` is not declared in the metadata",
                        edges_name.display(),
                        line_no + 1
                    )));
                }
            }
        }
        let src = builder.node(cols[0]);
        let dst = builder.node(cols[1]);
        builder.add_edge(src, dst, weight)?;
    }
    Ok(builder.build())
}

/// File-based wrapper around [`load_graph`].
pub fn load_graph_files(
    edges: &Path,
    meta: Option<&Path>,
    opts: LoadOptions,
) -> Result<InfluenceGraph> {
    let edge_reader = BufReader::new(File::open(edges).map_err(|e| Error::io(edges, e))?);
    let meta_reader = match meta {
        Some(p) => Some((BufReader::new(File::open(p).map_err(|e| Error::io(p, e))?), p)),
        None => None,
    };
    load_graph(edge_reader, edges, meta_reader, opts)
}

/// Writes `src<TAB>dst<TAB>weight` lines.
pub fn write_edges<W: Write>(g: &InfluenceGraph, mut w: W) -> std::io::Result<()> {
    for (i, j, weight) in g.edges() {
        writeln!(w, "{}\t{}\t{}", g.node_id(i), g.node_id(j), weight)?;
    }
    Ok(())
}

/// Writes one JSON metadata object per node, in index order.
pub fn write_meta<W: Write>(g: &InfluenceGraph, mut w: W) -> std::io::Result<()> {
    for meta in g.metas() {
        serde_json::to_writer(&mut w, meta)?;
        writeln!(w)?;
    }
    Ok(())
}

/// Writes `edges.tsv` and `meta.jsonl` into `dir`, creating it if needed.
pub fn write_graph_dir(g: &InfluenceGraph, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let edges = dir.join("edges.tsv");
    let meta = dir.join("meta.jsonl");
    let mut ew = BufWriter::new(File::create(&edges).map_err(|e| Error::io(&edges, e))?);
    write_edges(g, &mut ew)
        .and_then(|_| ew.flush())
        .map_err(|e| Error::io(&edges, e))?;
    let mut mw = BufWriter::new(File::create(&meta).map_err(|e| Error::io(&meta, e))?);
    write_meta(g, &mut mw)
        .and_then(|_| mw.flush())
        .map_err(|e| Error::io(&meta, e))?;
    Ok(())
}

/// Reads a `paper<TAB>author[<TAB>author...]` mapping. A paper may appear on
/// several lines; authors accumulate.
pub fn load_author_map(path: &Path) -> Result<HashMap<String, Vec<String>>> {
    let reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
    let mut map: HashMap<String, Vec<String>> = HashMap::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t').map(str::trim).filter(|c| !c.is_empty());
        let paper = cols.next().unwrap_or_default();
        let authors: Vec<String> = cols.map(str::to_string).collect();
        if authors.is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: line_no + 1,
                message: format!("paper `{paper}` lists no author"),
            });
        }
        map.entry(paper.to_string()).or_default().extend(authors);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn load_str(edges: &str, meta: Option<&str>) -> Result<InfluenceGraph> {
        load_graph(
            Cursor::new(edges),
            Path::new("edges.tsv"),
            meta.map(|m| (Cursor::new(m), Path::new("meta.jsonl"))),
            LoadOptions::default(),
        )
    }

    #[test]
    fn duplicate_records_merge() {
        let g = load_str("a\tb\t1\nb\tc\t1\na\tb\t1\n", None).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        let (a, b) = (g.index_of("a").unwrap(), g.index_of("b").unwrap());
        assert_eq!(g.weight(a, b), 2.0);
    }

    #[test]
    fn metadata_only_node() {
        let g = load_str("", Some("{\"id\": \"solo\", \"year\": 1999}\n")).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.meta(0).year, Some(1999));
    }

    #[test]
    fn negative_weight_rejected_with_line() {
        let err = load_str("# header\na\tb\t-1\n", None).unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("negative"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_record_reports_line() {
        let err = load_str("a\tb\n\nonlyone\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = load_str("a\tb\tx\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn default_weight_and_comments() {
        let g = load_str("# c\na\tb\n", None).unwrap();
        assert_eq!(g.weight(0, 1), 1.0);
    }

    #[test]
    fn dangling_reference_in_strict_mode() {
        let err = load_graph(
            Cursor::new("a\tz\n"),
            Path::new("e"),
            Some((Cursor::new("{\"id\":\"a\"}\n"), Path::new("m"))),
            LoadOptions { require_meta: true },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn metadata_keys_and_extra() {
        let g = load_str(
            "",
            Some(r#"{"id":"p","title":"T","abstract":"A","venue":"V","year":2001,"fields":["DM"],"cites":3}"#),
        )
        .unwrap();
        let m = g.meta(0);
        assert_eq!(m.abstract_text.as_deref(), Some("A"));
        assert_eq!(m.fields, vec!["DM".to_string()]);
        assert_eq!(m.extra["cites"], serde_json::json!(3));
        let line = serde_json::to_string(m).unwrap();
        assert!(line.contains("\"abstract\":\"A\""));
    }

    #[test]
    fn year_out_of_range() {
        assert!(load_str("", Some(r#"{"id":"p","year":99}"#)).is_err());
    }

    #[test]
    fn reverse_cases() {
        let g = InfluenceGraph::from_edge_list(3, &[(0, 1, 1.0), (2, 2, 3.0)]).unwrap();
        let r = reverse_edges(&g);
        assert_eq!(r.weight(1, 0), 1.0);
        assert_eq!(r.weight(0, 1), 0.0);
        assert_eq!(r.weight(2, 2), 3.0);
        assert_eq!(r.edge_count(), g.edge_count());
        assert_eq!(reverse_edges(&r), g);
    }

    #[test]
    fn extraction_chain_with_unreachable() {
        let mut b = GraphBuilder::new();
        let f = b.node("f");
        let a = b.node("a");
        let bb = b.node("b");
        let c = b.node("c");
        b.add_edge(f, a, 1.0).unwrap();
        b.add_edge(a, bb, 1.0).unwrap();
        b.add_edge(c, a, 1.0).unwrap();
        let g = b.build();
        let sub = maximal_influence_graph(&g, "f").unwrap();
        assert_eq!(sub.node_ids(), &["f", "a", "b"]);
        assert_eq!(sub.edge_count(), 2);
        assert_eq!(sub.origin(2), bb);
    }

    #[test]
    fn extraction_isolated_source() {
        let g = InfluenceGraph::from_edge_list(2, &[(1, 0, 1.0)]).unwrap();
        let sub = maximal_influence_graph(&g, "0").unwrap();
        assert_eq!(sub.node_count(), 1);
        assert_eq!(sub.edge_count(), 0);
    }

    #[test]
    fn extraction_diamond_keeps_induced_edges() {
        let mut b = GraphBuilder::new();
        for id in ["f", "b", "a", "c"] {
            b.node(id);
        }
        let idx = |b: &GraphBuilder, s: &str| b.index[s];
        for (s, t) in [("f", "a"), ("f", "b"), ("a", "c"), ("b", "c")] {
            let (i, j) = (idx(&b, s), idx(&b, t));
            b.add_edge(i, j, 1.0).unwrap();
        }
        let g = b.build();
        let sub = maximal_influence_graph(&g, "f").unwrap();
        assert_eq!(sub.node_count(), 4);
        assert_eq!(sub.edge_count(), 4);
        // id tie-break: "a" is discovered before "b"
        assert_eq!(sub.node_ids(), &["f", "a", "b", "c"]);
    }

    #[test]
    fn extraction_unknown_source() {
        let g = InfluenceGraph::from_edge_list(1, &[]).unwrap();
        assert!(matches!(
            maximal_influence_graph(&g, "nope"),
            Err(Error::UnknownNode(_))
        ));
    }

    fn authors(pairs: &[(&str, &[&str])]) -> HashMap<String, Vec<String>> {
        pairs
            .iter()
            .map(|(p, a)| (p.to_string(), a.iter().map(|s| s.to_string()).collect()))
            .collect()
    }

    #[test]
    fn author_projection_counts_links() {
        let g = InfluenceGraph::from_edge_list(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let map = authors(&[("0", &["A"]), ("1", &["B"]), ("2", &["A"]), ("3", &["B"])]);
        let ag = project_author_graph(&g, &map, 0).unwrap();
        assert_eq!(ag.node_count(), 2);
        let (a, b) = (ag.index_of("A").unwrap(), ag.index_of("B").unwrap());
        assert_eq!(ag.weight(a, b), 2.0);
        assert_eq!(ag.edge_count(), 1);
    }

    #[test]
    fn author_projection_single_author() {
        let g = InfluenceGraph::from_edge_list(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let map = authors(&[("0", &["A"]), ("1", &["A"]), ("2", &["A"])]);
        let ag = project_author_graph(&g, &map, 0).unwrap();
        assert_eq!(ag.node_count(), 1);
        assert_eq!(ag.weight(0, 0), 2.0);
    }

    #[test]
    fn author_projection_min_papers() {
        // A: 2 papers, B: 2 papers, C: 1 paper
        let g = InfluenceGraph::from_edge_list(
            5,
            &[(0, 2, 1.0), (1, 3, 1.0), (4, 0, 1.0), (2, 4, 1.0)],
        )
        .unwrap();
        let map = authors(&[
            ("0", &["A"]),
            ("1", &["A"]),
            ("2", &["B"]),
            ("3", &["B"]),
            ("4", &["C"]),
        ]);
        let ag = project_author_graph(&g, &map, 2).unwrap();
        assert_eq!(ag.node_ids(), &["A", "B"]);
        assert_eq!(ag.edge_count(), 1);
        assert_eq!(ag.weight(0, 1), 2.0);
    }

    #[test]
    fn author_projection_missing_mapping() {
        let g = InfluenceGraph::from_edge_list(2, &[(0, 1, 1.0)]).unwrap();
        let map = authors(&[("0", &["A"])]);
        assert!(matches!(
            project_author_graph(&g, &map, 0),
            Err(Error::Validation(_))
        ));
    }
}
