//! Node similarity matrices: CommonNeighbor kernels, SimRank, the
//! ratio-association / normalized-cut baselines, and the attribute and time
//! factors that are fused into the topology matrix by Hadamard product.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{InfluenceGraph, NodeMeta};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Topology,
    Attribute,
    Time,
    Fused,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::Topology => "topology",
            MatrixKind::Attribute => "attribute",
            MatrixKind::Time => "time",
            MatrixKind::Fused => "fused",
        })
    }
}

impl FromStr for MatrixKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "topology" => Ok(MatrixKind::Topology),
            "attribute" => Ok(MatrixKind::Attribute),
            "time" => Ok(MatrixKind::Time),
            "fused" => Ok(MatrixKind::Fused),
            other => Err(Error::Argument(format!("unknown matrix kind `{other}`"))),
        }
    }
}

/// Sparse symmetric nonnegative matrix. Both triangles are stored (CSR with
/// sorted columns) so row access and products need no transposition.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix {
    order: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    kind: MatrixKind,
}

impl SimilarityMatrix {
    pub fn empty(order: usize, kind: MatrixKind) -> Self {
        SimilarityMatrix {
            order,
            offsets: vec![0; order + 1],
            cols: Vec::new(),
            vals: Vec::new(),
            kind,
        }
    }

    /// Builds from per-row entry lists. Rows are sorted, zeros dropped, and
    /// the result is checked for symmetry and nonnegativity.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>, kind: MatrixKind) -> Result<Self> {
        let order = rows.len();
        let mut offsets = Vec::with_capacity(order + 1);
        offsets.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            for (j, v) in row {
                if j >= order {
                    return Err(Error::Dimension(format!("column {j} outside order {order}")));
                }
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::Validation(format!("invalid similarity value {v}")));
                }
                if v > 0.0 {
                    if cols.len() > *offsets.last().unwrap() && *cols.last().unwrap() == j {
                        *vals.last_mut().unwrap() += v;
                    } else {
                        cols.push(j);
                        vals.push(v);
                    }
                }
            }
            offsets.push(cols.len());
        }
        let m = SimilarityMatrix {
            order,
            offsets,
            cols,
            vals,
            kind,
        };
        if !m.is_symmetric() {
            return Err(Error::Validation("similarity matrix is not symmetric".into()));
        }
        Ok(m)
    }

    /// Builds from a dense square matrix, symmetry required.
    pub fn from_dense(dense: &[Vec<f64>], kind: MatrixKind) -> Result<Self> {
        let rows = dense
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(j, v)| (j, *v))
                    .collect()
            })
            .collect();
        Self::from_rows(rows, kind)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of stored entries (both triangles).
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: MatrixKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.offsets[i]..self.offsets[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.offsets[i]..self.offsets[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(p) => self.vals[span.start + p],
            Err(_) => 0.0,
        }
    }

    /// Stored entries `(i, j, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.order).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries().all(|(i, j, v)| self.get(j, i) == v)
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.vals.iter().map(|v| v * v).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.order]; self.order];
        for (i, j, v) in self.entries() {
            d[i][j] = v;
        }
        d
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let mut acc = 0.0;
            for (j, v) in self.row(i) {
                acc += v * x[j];
            }
            *yi = acc;
        });
    }

    /// `M H` for a row-major `order x k` dense matrix `h`.
    pub fn mul_dense(&self, h: &[f64], k: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.order * k];
        out.par_chunks_mut(k.max(1))
            .enumerate()
            .for_each(|(i, row_out)| {
                for (j, v) in self.row(i) {
                    let hj = &h[j * k..(j + 1) * k];
                    for (o, x) in row_out.iter_mut().zip(hj) {
                        *o += v * x;
                    }
                }
            });
        out
    }

    /// Writes the upper triangle (diagonal included) in coordinate format
    /// under a `%n=<order> kind=<kind>` header.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%n={} kind={}", self.order, self.kind)?;
        for (i, j, v) in self.entries() {
            if i <= j {
                writeln!(w, "{i}\t{j}\t{v}")?;
            }
        }
        Ok(())
    }

    /// Parses the format produced by [`write_coordinate`](Self::write_coordinate).
    pub fn read_coordinate<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let bad = |line: usize, message: String| Error::Parse {
            path: "<matrix>".into(),
            line,
            message,
        };
        let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header".into()))?;
        let header = header.map_err(|e| Error::io("<matrix>", e))?;
        let mut order = None;
        let mut kind = None;
        for tok in header.trim_start_matches('%').split_whitespace() {
            if let Some(v) = tok.strip_prefix("n=") {
                order = v.parse::<usize>().ok();
            } else if let Some(v) = tok.strip_prefix("kind=") {
                kind = Some(v.parse::<MatrixKind>()?);
            }
        }
        let (order, kind) = match (order, kind) {
            (Some(o), Some(k)) => (o, k),
            _ => return Err(bad(1, format!("malformed header `{header}`"))),
        };
        let mut rows = vec![Vec::new(); order];
        for (no, line) in lines {
            let line = line.map_err(|e| Error::io("<matrix>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').collect();
            let parsed = (parts.len() == 3)
                .then(|| {
                    Some((
                        parts[0].parse::<usize>().ok()?,
                        parts[1].parse::<usize>().ok()?,
                        parts[2].parse::<f64>().ok()?,
                    ))
                })
                .flatten();
            let (i, j, v) = parsed.ok_or_else(|| bad(no + 1, format!("bad entry `{line}`")))?;
            if i >= order || j >= order || i > j {
                return Err(bad(no + 1, format!("entry ({i}, {j}) outside upper triangle")));
            }
            rows[i].push((j, v));
            if i != j {
                rows[j].push((i, v));
            }
        }
        Self::from_rows(rows, kind)
    }
}

/// Which neighborhoods the CommonNeighbor kernel compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Shared out-neighbors and shared in-neighbors, averaged.
    Bidirectional,
    /// Shared out-neighbors: `A Aᵀ`.
    Forward,
    /// Shared in-neighbors: `Aᵀ A`.
    Backward,
}

/// CommonNeighbor kernel. Runs in O(m d²) using a sparse accumulator per
/// row; rows are independent and accumulated in a fixed order, so parallel
/// evaluation is bit-identical to sequential.
pub fn common_neighbor(g: &InfluenceGraph, direction: Direction) -> SimilarityMatrix {
    let n = g.node_count();
    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0.0f64; n], vec![0.0f64; n], vec![false; n], Vec::new()),
            |(fwd, bwd, mark, touched), i| {
                touched.clear();
                if direction != Direction::Backward {
                    for (t, a_it) in g.out_neighbors(i) {
                        for (j, a_jt) in g.in_neighbors(t) {
                            if !mark[j] {
                                mark[j] = true;
                                touched.push(j);
                            }
                            fwd[j] += a_it * a_jt;
                        }
                    }
                }
                if direction != Direction::Forward {
                    for (t, a_ti) in g.in_neighbors(i) {
                        for (j, a_tj) in g.out_neighbors(t) {
                            if !mark[j] {
                                mark[j] = true;
                                touched.push(j);
                            }
                            bwd[j] += a_ti * a_tj;
                        }
                    }
                }
                let mut row = Vec::with_capacity(touched.len());
                for &j in touched.iter() {
                    let v = match direction {
                        Direction::Forward => fwd[j],
                        Direction::Backward => bwd[j],
                        Direction::Bidirectional => (fwd[j] + bwd[j]) / 2.0,
                    };
                    if v > 0.0 {
                        row.push((j, v));
                    }
                    fwd[j] = 0.0;
                    bwd[j] = 0.0;
                    mark[j] = false;
                }
                row.sort_by_key(|e| e.0);
                row
            },
        )
        .collect();
    SimilarityMatrix::from_rows(rows, MatrixKind::Topology)
        .expect("common-neighbor products are symmetric and nonnegative")
}

/// Neighborhood SimRank walks over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimRankLinks {
    #[default]
    In,
    Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimRankParams {
    pub decay: f64,
    /// Pairs further apart than this (undirected hops) are never scored.
    pub max_hops: usize,
    /// Rounds of the recurrence, starting from the identity.
    pub iterations: usize,
    pub links: SimRankLinks,
}

impl Default for SimRankParams {
    fn default() -> Self {
        SimRankParams {
            decay: 0.8,
            max_hops: 4,
            iterations: 4,
            links: SimRankLinks::In,
        }
    }
}

/// Iterative SimRank, `iterations` rounds from the identity, restricted to
/// pairs within `max_hops` undirected hops of each other. Edge weights are
/// ignored.
pub fn simrank(g: &InfluenceGraph, params: SimRankParams) -> Result<SimilarityMatrix> {
    if !(params.decay > 0.0 && params.decay < 1.0) {
        return Err(Error::Argument(format!(
            "simrank decay must lie in (0, 1), got {}",
            params.decay
        )));
    }
    if params.max_hops == 0 || params.iterations == 0 {
        return Err(Error::Argument("simrank max_hops and iterations must be >= 1".into()));
    }
    let n = g.node_count();
    let mut undirected: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in g.edges() {
        if i != j {
            undirected[i].push(j);
            undirected[j].push(i);
        }
    }
    for nb in &mut undirected {
        nb.sort_unstable();
        nb.dedup();
    }
    let links: Vec<Vec<usize>> = (0..n)
        .map(|i| match params.links {
            SimRankLinks::In => g.in_neighbors(i).map(|(j, _)| j).collect(),
            SimRankLinks::Out => g.out_neighbors(i).map(|(j, _)| j).collect(),
        })
        .collect();

    // candidate pairs (a < b) within max_hops undirected hops
    let pairs: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .map_init(
            || vec![usize::MAX; n],
            |depth, a| {
                let mut found = Vec::new();
                let mut frontier = vec![a];
                let mut visited = vec![a];
                depth[a] = 0;
                for d in 1..=params.max_hops {
                    let mut next = Vec::new();
                    for &u in &frontier {
                        for &v in &undirected[u] {
                            if depth[v] == usize::MAX {
                                depth[v] = d;
                                visited.push(v);
                                next.push(v);
                                if v > a {
                                    found.push((a, v));
                                }
                            }
                        }
                    }
                    frontier = next;
                }
                for v in visited {
                    depth[v] = usize::MAX;
                }
                found.sort_unstable();
                found
            },
        )
        .flatten()
        .collect();

    let mut scores: HashMap<(usize, usize), f64> = HashMap::new();
    for _ in 0..params.iterations {
        let lookup = |i: usize, j: usize| -> f64 {
            if i == j {
                1.0
            } else {
                let key = if i < j { (i, j) } else { (j, i) };
                scores.get(&key).copied().unwrap_or(0.0)
            }
        };
        let next: Vec<f64> = pairs
            .par_iter()
            .map(|&(a, b)| {
                let (ia, ib) = (&links[a], &links[b]);
                if ia.is_empty() || ib.is_empty() {
                    return 0.0;
                }
                let mut acc = 0.0;
                for &i in ia {
                    for &j in ib {
                        acc += lookup(i, j);
                    }
                }
                params.decay * acc / (ia.len() * ib.len()) as f64
            })
            .collect();
        scores = pairs
            .iter()
            .zip(next)
            .filter(|(_, v)| *v > 0.0)
            .map(|(p, v)| (*p, v))
            .collect();
    }

    let mut rows: Vec<Vec<(usize, f64)>> = (0..n).map(|i| vec![(i, 1.0)]).collect();
    for (&(a, b), &v) in &scores {
        rows[a].push((b, v));
        rows[b].push((a, v));
    }
    SimilarityMatrix::from_rows(rows, MatrixKind::Topology)
}

/// Classical clustering objectives expressed as SymNMF similarity matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    RatioAssociation,
    NormalizedCut,
}

/// `(A + Aᵀ)/2`, optionally degree-normalized. Returns the matrix and the
/// nodes with zero total degree (which get empty rows).
pub fn baseline_kernel(g: &InfluenceGraph, kind: BaselineKind) -> (SimilarityMatrix, Vec<usize>) {
    let n = g.node_count();
    let sym_rows: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            let mut row: Vec<(usize, f64)> = g.out_neighbors(i).map(|(j, w)| (j, w / 2.0)).collect();
            row.extend(g.in_neighbors(i).map(|(j, w)| (j, w / 2.0)));
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for (j, v) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += v,
                    _ => merged.push((j, v)),
                }
            }
            merged
        })
        .collect();
    let degree: Vec<f64> = sym_rows.iter().map(|r| r.iter().map(|e| e.1).sum()).collect();
    let isolated: Vec<usize> = (0..n).filter(|&i| degree[i] == 0.0).collect();
    let rows = match kind {
        BaselineKind::RatioAssociation => sym_rows,
        BaselineKind::NormalizedCut => sym_rows
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.into_iter()
                    .map(|(j, v)| (j, v / (degree[i] * degree[j]).sqrt()))
                    .collect()
            })
            .collect(),
    };
    let m = SimilarityMatrix::from_rows(rows, MatrixKind::Topology)
        .expect("symmetrized adjacency is symmetric");
    (m, isolated)
}

/// Which topology similarity feeds the factorization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityKind {
    #[default]
    Bidirectional,
    Forward,
    Backward,
    Simrank,
    RatioAssociation,
    NormalizedCut,
}

impl FromStr for SimilarityKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "bidirectional" | "common_neighbor" => SimilarityKind::Bidirectional,
            "forward" => SimilarityKind::Forward,
            "backward" => SimilarityKind::Backward,
            "simrank" => SimilarityKind::Simrank,
            "ratio_association" => SimilarityKind::RatioAssociation,
            "normalized_cut" => SimilarityKind::NormalizedCut,
            other => return Err(Error::Argument(format!("unknown similarity `{other}`"))),
        })
    }
}

impl fmt::Display for SimilarityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimilarityKind::Bidirectional => "bidirectional",
            SimilarityKind::Forward => "forward",
            SimilarityKind::Backward => "backward",
            SimilarityKind::Simrank => "simrank",
            SimilarityKind::RatioAssociation => "ratio_association",
            SimilarityKind::NormalizedCut => "normalized_cut",
        })
    }
}

/// Dispatches to the kernel named by `kind`. Returns warnings alongside.
pub fn topology_matrix(
    g: &InfluenceGraph,
    kind: SimilarityKind,
    simrank_params: SimRankParams,
) -> Result<(SimilarityMatrix, Vec<String>)> {
    Ok(match kind {
        SimilarityKind::Bidirectional => (common_neighbor(g, Direction::Bidirectional), vec![]),
        SimilarityKind::Forward => (common_neighbor(g, Direction::Forward), vec![]),
        SimilarityKind::Backward => (common_neighbor(g, Direction::Backward), vec![]),
        SimilarityKind::Simrank => (simrank(g, simrank_params)?, vec![]),
        SimilarityKind::RatioAssociation | SimilarityKind::NormalizedCut => {
            let base = if kind == SimilarityKind::RatioAssociation {
                BaselineKind::RatioAssociation
            } else {
                BaselineKind::NormalizedCut
            };
            let (m, isolated) = baseline_kernel(g, base);
            let warnings = isolated
                .iter()
                .map(|&i| format!("node `{}` is isolated in the {kind} kernel", g.node_id(i)))
                .collect();
            (m, warnings)
        }
    })
}

/// Augmentation strengths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentParams {
    /// Boost for same-attribute pairs and the diagonal; must exceed 1.
    pub lambda_aug: f64,
    /// Per-year decay base; must be at least 1.
    pub lambda_decay: f64,
}

impl Default for AugmentParams {
    fn default() -> Self {
        AugmentParams {
            lambda_aug: 2.0,
            lambda_decay: 1.11,
        }
    }
}

impl AugmentParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_aug > 1.0) || !self.lambda_aug.is_finite() {
            return Err(Error::Argument(format!(
                "lambda_aug must be > 1, got {}",
                self.lambda_aug
            )));
        }
        if !(self.lambda_decay >= 1.0) || !self.lambda_decay.is_finite() {
            return Err(Error::Argument(format!(
                "lambda_decay must be >= 1, got {}",
                self.lambda_decay
            )));
        }
        Ok(())
    }
}

/// A symmetric matrix that can be evaluated entry by entry. Dense factors
/// implement this lazily so fusion only touches the topology support.
pub trait PairFactor: Sync {
    fn order(&self) -> usize;
    fn entry(&self, i: usize, j: usize) -> f64;
}

impl PairFactor for SimilarityMatrix {
    fn order(&self) -> usize {
        self.order
    }
    fn entry(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
}

/// All-ones matrix, the Hadamard identity.
#[derive(Clone, Copy, Debug)]
pub struct Ones(pub usize);

impl PairFactor for Ones {
    fn order(&self) -> usize {
        self.0
    }
    fn entry(&self, _: usize, _: usize) -> f64 {
        1.0
    }
}

/// Categorical attribute used for augmentation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum AttributeSelector {
    Venue,
    Fields,
    /// A key of the free-form `extra` map (string or array of strings).
    Extra(String),
}

impl FromStr for AttributeSelector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "venue" => AttributeSelector::Venue,
            "fields" => AttributeSelector::Fields,
            "" => return Err(Error::Argument("empty attribute name".into())),
            other => AttributeSelector::Extra(other.strip_prefix("extra:").unwrap_or(other).to_string()),
        })
    }
}

impl fmt::Display for AttributeSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeSelector::Venue => f.write_str("venue"),
            AttributeSelector::Fields => f.write_str("fields"),
            AttributeSelector::Extra(k) => write!(f, "extra:{k}"),
        }
    }
}

impl From<AttributeSelector> for String {
    fn from(sel: AttributeSelector) -> String {
        sel.to_string()
    }
}

impl TryFrom<String> for AttributeSelector {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl AttributeSelector {
    fn values(&self, meta: &NodeMeta) -> Vec<String> {
        let mut v = match self {
            AttributeSelector::Venue => meta.venue.iter().cloned().collect(),
            AttributeSelector::Fields => meta.fields.clone(),
            AttributeSelector::Extra(key) => match meta.extra.get(key) {
                Some(serde_json::Value::String(s)) => vec![s.clone()],
                Some(serde_json::Value::Array(items)) => items
                    .iter()
                    .filter_map(|x| x.as_str().map(str::to_string))
                    .collect(),
                Some(other) if !other.is_null() => vec![other.to_string()],
                _ => Vec::new(),
            },
        };
        v.sort();
        v.dedup();
        v
    }
}

/// Attribute augmentation factor: `lambda_aug` on the diagonal and for pairs
/// sharing an attribute value, 1 elsewhere.
#[derive(Clone, Debug)]
pub struct AttributeMatrix {
    values: Vec<Vec<String>>,
    lambda_aug: f64,
    missing: Vec<usize>,
}

impl AttributeMatrix {
    /// Nodes lacking the attribute; they match nothing off the diagonal.
    pub fn missing(&self) -> &[usize] {
        &self.missing
    }
}

impl PairFactor for AttributeMatrix {
    fn order(&self) -> usize {
        self.values.len()
    }
    fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.lambda_aug;
        }
        let (a, b) = (&self.values[i], &self.values[j]);
        // both sorted: merge-intersect
        let (mut p, mut q) = (0, 0);
        while p < a.len() && q < b.len() {
            match a[p].cmp(&b[q]) {
                std::cmp::Ordering::Equal => return self.lambda_aug,
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
            }
        }
        1.0
    }
}

pub fn attribute_matrix(
    meta: &[NodeMeta],
    attribute: &AttributeSelector,
    params: AugmentParams,
) -> Result<AttributeMatrix> {
    params.validate()?;
    let values: Vec<Vec<String>> = meta.iter().map(|m| attribute.values(m)).collect();
    let missing = (0..values.len()).filter(|&i| values[i].is_empty()).collect();
    Ok(AttributeMatrix {
        values,
        lambda_aug: params.lambda_aug,
        missing,
    })
}

/// Time decay factor `lambda_decay^(-|t_i - t_j|)`. Pairs involving a node
/// without a year are left at 1.
#[derive(Clone, Debug)]
pub struct TimeMatrix {
    years: Vec<Option<i32>>,
    lambda_decay: f64,
    missing: Vec<usize>,
}

impl TimeMatrix {
    pub fn missing(&self) -> &[usize] {
        &self.missing
    }
}

impl PairFactor for TimeMatrix {
    fn order(&self) -> usize {
        self.years.len()
    }
    fn entry(&self, i: usize, j: usize) -> f64 {
        match (self.years[i], self.years[j]) {
            (Some(a), Some(b)) if i != j => self.lambda_decay.powi(-(a - b).abs()),
            _ => 1.0,
        }
    }
}

pub fn time_matrix(meta: &[NodeMeta], params: AugmentParams) -> Result<TimeMatrix> {
    params.validate()?;
    let years: Vec<Option<i32>> = meta.iter().map(|m| m.year).collect();
    let missing = (0..years.len()).filter(|&i| years[i].is_none()).collect();
    Ok(TimeMatrix {
        years,
        lambda_decay: params.lambda_decay,
        missing,
    })
}

/// Hadamard product of `topology` with every factor in `others`, evaluated
/// on the topology support only (the product is zero elsewhere).
pub fn fuse(topology: &SimilarityMatrix, others: &[&dyn PairFactor]) -> Result<SimilarityMatrix> {
    for f in others {
        if f.order() != topology.order() {
            return Err(Error::Dimension(format!(
                "factor of order {} does not match topology order {}",
                f.order(),
                topology.order()
            )));
        }
    }
    if others.is_empty() {
        return Ok(topology.clone());
    }
    let rows: Vec<Vec<(usize, f64)>> = (0..topology.order())
        .into_par_iter()
        .map(|i| {
            topology
                .row(i)
                .map(|(j, v)| (j, others.iter().fold(v, |acc, f| acc * f.entry(i, j))))
                .filter(|e| e.1 > 0.0)
                .collect()
        })
        .collect();
    SimilarityMatrix::from_rows(rows, MatrixKind::Fused)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> InfluenceGraph {
        let e: Vec<_> = edges.iter().map(|&(i, j)| (i, j, 1.0)).collect();
        InfluenceGraph::from_edge_list(n, &e).unwrap()
    }

    /// Dense (A Aᵀ + Aᵀ A) / 2 evaluated by triple loops.
    fn dense_cn(a: &[Vec<f64>], direction: Direction) -> Vec<Vec<f64>> {
        let n = a.len();
        let mut k = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let (mut f, mut b) = (0.0, 0.0);
                for t in 0..n {
                    f += a[i][t] * a[j][t];
                    b += a[t][i] * a[t][j];
                }
                k[i][j] = match direction {
                    Direction::Forward => f,
                    Direction::Backward => b,
                    Direction::Bidirectional => (f + b) / 2.0,
                };
            }
        }
        k
    }

    #[test]
    fn cn_shared_out_neighbor() {
        let k = common_neighbor(&graph(3, &[(0, 2), (1, 2)]), Direction::Bidirectional);
        assert_eq!(k.get(0, 1), 0.5);
        assert_eq!(k.get(1, 0), 0.5);
    }

    #[test]
    fn cn_path_diagonal_only() {
        let k = common_neighbor(&graph(3, &[(0, 1), (1, 2)]), Direction::Bidirectional);
        assert_eq!(k.get(0, 0), 0.5);
        assert_eq!(k.get(1, 1), 1.0);
        assert_eq!(k.get(2, 2), 0.5);
        assert_eq!(k.nnz(), 3);
    }

    #[test]
    fn cn_edgeless() {
        assert_eq!(common_neighbor(&graph(4, &[]), Direction::Bidirectional).nnz(), 0);
    }

    #[test]
    fn simrank_diagonal_and_sources() {
        let g = graph(3, &[(0, 2), (1, 2)]);
        let s = simrank(&g, SimRankParams { iterations: 1, ..Default::default() }).unwrap();
        for i in 0..3 {
            assert_eq!(s.get(i, i), 1.0);
        }
        assert_eq!(s.get(0, 1), 0.0);
        assert_eq!(s.get(0, 2), 0.0);
        assert_eq!(s.get(1, 2), 0.0);
    }

    #[test]
    fn simrank_hub_pair() {
        let g = graph(3, &[(0, 1), (0, 2)]);
        let p = SimRankParams { decay: 0.8, iterations: 1, ..Default::default() };
        let s = simrank(&g, p).unwrap();
        assert_relative_eq!(s.get(1, 2), 0.8);
        // more rounds: the hub has no in-links, value stays at the decay
        let s4 = simrank(&g, SimRankParams { iterations: 4, ..p }).unwrap();
        assert_relative_eq!(s4.get(1, 2), 0.8);
        // outside the hop radius nothing is scored
        let s1 = simrank(&g, SimRankParams { max_hops: 1, ..p }).unwrap();
        assert_eq!(s1.get(1, 2), 0.0);
    }

    #[test]
    fn simrank_out_links() {
        let g = graph(3, &[(0, 2), (1, 2)]);
        let p = SimRankParams { decay: 0.6, max_hops: 2, iterations: 2, links: SimRankLinks::Out };
        assert_relative_eq!(simrank(&g, p).unwrap().get(0, 1), 0.6);
    }

    #[test]
    fn simrank_rejects_bad_params() {
        let g = graph(2, &[]);
        assert!(simrank(&g, SimRankParams { decay: 1.0, ..Default::default() }).is_err());
        assert!(simrank(&g, SimRankParams { max_hops: 0, ..Default::default() }).is_err());
    }

    #[test]
    fn baselines_single_edge() {
        let g = graph(2, &[(0, 1)]);
        let (ra, iso) = baseline_kernel(&g, BaselineKind::RatioAssociation);
        assert_eq!(ra.get(0, 1), 0.5);
        assert!(iso.is_empty());
        let (nc, _) = baseline_kernel(&g, BaselineKind::NormalizedCut);
        assert_relative_eq!(nc.get(0, 1), 1.0);
    }

    #[test]
    fn baselines_edgeless() {
        let (m, iso) = baseline_kernel(&graph(3, &[]), BaselineKind::NormalizedCut);
        assert_eq!(m.nnz(), 0);
        assert_eq!(iso, vec![0, 1, 2]);
    }

    fn metas(specs: &[(Option<&str>, Option<i32>)]) -> Vec<NodeMeta> {
        specs
            .iter()
            .enumerate()
            .map(|(i, (venue, year))| NodeMeta {
                venue: venue.map(str::to_string),
                year: *year,
                ..NodeMeta::new(i.to_string())
            })
            .collect()
    }

    #[test]
    fn attribute_entries() {
        let m = metas(&[(Some("SIGCOMM"), None), (Some("SIGCOMM"), None), (Some("KDD"), None), (None, None)]);
        let a = attribute_matrix(&m, &AttributeSelector::Venue, AugmentParams::default()).unwrap();
        assert_eq!(a.entry(2, 2), 2.0);
        assert_eq!(a.entry(0, 1), 2.0);
        assert_eq!(a.entry(0, 2), 1.0);
        assert_eq!(a.entry(3, 0), 1.0);
        assert_eq!(a.entry(3, 3), 2.0);
        assert_eq!(a.missing(), &[3]);
    }

    #[test]
    fn fields_intersection() {
        let mut m = metas(&[(None, None), (None, None), (None, None)]);
        m[0].fields = vec!["DB".into(), "DM".into()];
        m[1].fields = vec!["DM".into()];
        m[2].fields = vec!["AI".into()];
        let a = attribute_matrix(&m, &AttributeSelector::Fields, AugmentParams::default()).unwrap();
        assert_eq!(a.entry(0, 1), 2.0);
        assert_eq!(a.entry(1, 2), 1.0);
    }

    #[test]
    fn time_entries() {
        let m = metas(&[(None, Some(2000)), (None, Some(2000)), (None, Some(2001)), (None, Some(2010)), (None, None)]);
        let t = time_matrix(&m, AugmentParams::default()).unwrap();
        assert_eq!(t.entry(0, 1), 1.0);
        assert_relative_eq!(t.entry(0, 2), 0.900_900_900_9, epsilon = 1e-9);
        assert_relative_eq!(t.entry(3, 0), 0.352_184_0, epsilon = 1e-6);
        assert_eq!(t.entry(4, 0), 1.0);
        assert_eq!(t.entry(4, 4), 1.0);
        assert_eq!(t.missing(), &[4]);
    }

    #[test]
    fn augment_params_validation() {
        let bad = AugmentParams { lambda_aug: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = AugmentParams { lambda_decay: 0.9, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn fuse_identities_and_product() {
        let g = graph(3, &[(0, 2), (1, 2)]);
        let k = common_neighbor(&g, Direction::Bidirectional);
        assert_eq!(fuse(&k, &[]).unwrap(), k);
        let ones = Ones(3);
        let f = fuse(&k, &[&ones]).unwrap();
        assert_eq!(f.to_dense(), k.to_dense());

        let m = metas(&[(Some("V"), Some(2000)), (Some("V"), Some(2001)), (None, Some(2000))]);
        let a = attribute_matrix(&m, &AttributeSelector::Venue, AugmentParams::default()).unwrap();
        let t = time_matrix(&m, AugmentParams::default()).unwrap();
        let f = fuse(&k, &[&a, &t]).unwrap();
        assert_relative_eq!(f.get(0, 1), 0.5 * 2.0 / 1.11, epsilon = 1e-12);
        assert_relative_eq!(f.get(0, 1), 0.900_90, epsilon = 1e-5);
        assert_eq!(f.kind(), MatrixKind::Fused);
    }

    #[test]
    fn fuse_dimension_mismatch() {
        let k = common_neighbor(&graph(3, &[(0, 1)]), Direction::Bidirectional);
        assert!(matches!(fuse(&k, &[&Ones(4)]), Err(Error::Dimension(_))));
    }

    #[test]
    fn coordinate_dump_round_trip() {
        let g = graph(4, &[(0, 2), (1, 2), (2, 3), (1, 3)]);
        let k = common_neighbor(&g, Direction::Bidirectional);
        let mut buf = Vec::new();
        k.write_coordinate(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("%n=4 kind=topology\n"));
        let back = SimilarityMatrix::read_coordinate(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back, k);
    }

    fn arb_graph() -> impl Strategy<Value = InfluenceGraph> {
        (1usize..=20).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n, 0.5f64..3.0), 0..60)
                .prop_map(move |e| InfluenceGraph::from_edge_list(n, &e).unwrap())
        })
    }

    proptest! {
        #[test]
        fn cn_matches_dense_oracle(g in arb_graph()) {
            let a = g.dense_adjacency();
            for dir in [Direction::Bidirectional, Direction::Forward, Direction::Backward] {
                let k = common_neighbor(&g, dir);
                let oracle = dense_cn(&a, dir);
                prop_assert!(k.is_symmetric());
                for i in 0..g.node_count() {
                    for j in 0..g.node_count() {
                        prop_assert!((k.get(i, j) - oracle[i][j]).abs() <= 1e-12);
                    }
                }
            }
        }

        #[test]
        fn bidirectional_is_mean_of_directions(g in arb_graph()) {
            let b = common_neighbor(&g, Direction::Bidirectional);
            let f = common_neighbor(&g, Direction::Forward);
            let w = common_neighbor(&g, Direction::Backward);
            for i in 0..g.node_count() {
                for j in 0..g.node_count() {
                    prop_assert_eq!(b.get(i, j), (f.get(i, j) + w.get(i, j)) / 2.0);
                }
            }
        }

        #[test]
        fn fused_support_within_topology(g in arb_graph(), years in proptest::collection::vec(1990i32..2020, 20)) {
            let k = common_neighbor(&g, Direction::Bidirectional);
            let m: Vec<NodeMeta> = (0..g.node_count())
                .map(|i| NodeMeta { year: Some(years[i]), venue: Some(format!("v{}", years[i] % 3)), ..NodeMeta::new(i.to_string()) })
                .collect();
            let a = attribute_matrix(&m, &AttributeSelector::Venue, AugmentParams::default()).unwrap();
            let t = time_matrix(&m, AugmentParams::default()).unwrap();
            let f = fuse(&k, &[&a, &t]).unwrap();
            prop_assert!(f.is_symmetric());
            for (i, j, v) in f.entries() {
                prop_assert!(v > 0.0);
                prop_assert!(k.get(i, j) > 0.0);
            }
        }

        #[test]
        fn kernels_symmetric_nonnegative(g in arb_graph()) {
            let (ra, _) = baseline_kernel(&g, BaselineKind::RatioAssociation);
            let (nc, _) = baseline_kernel(&g, BaselineKind::NormalizedCut);
            let sr = simrank(&g, SimRankParams::default()).unwrap();
            for m in [&ra, &nc, &sr] {
                prop_assert!(m.is_symmetric());
                prop_assert!(m.entries().all(|(_, _, v)| v > 0.0));
            }
        }
    }
}
