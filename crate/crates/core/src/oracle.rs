//! Exhaustive and algebraic reference computations for small graphs.
//!
//! These are slow by design and exist to check the fast paths: a brute-force
//! search for the best partition under the squared flow objective, and the
//! weighted-sum identities that connect that objective to kernel k-means.

use crate::error::{Error, Result};
use crate::graph::InfluenceGraph;
use crate::similarity::{common_neighbor, Direction, SimilarityMatrix};
use crate::summarize::{flow_matrix, ClusterAssignment, ObjectiveKind};

pub const MAX_BRUTE_FORCE_NODES: usize = 10;
pub const MAX_BRUTE_FORCE_CLUSTERS: usize = 4;

/// All set partitions of `n` items into at most `k` blocks, as restricted
/// growth strings (block ids numbered by first appearance).
#[derive(Clone, Debug)]
pub struct PartitionEnumeration {
    k: usize,
    current: Vec<usize>,
    done: bool,
}

impl PartitionEnumeration {
    pub fn new(n: usize, k: usize) -> Self {
        PartitionEnumeration {
            k,
            current: vec![0; n],
            done: n > 0 && k == 0,
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.current.len();
        // prefix maxima: the largest label allowed at i is max(prefix) + 1
        let mut prefix_max = vec![0usize; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(self.current[i - 1]);
        }
        for i in (1..n).rev() {
            let limit = (prefix_max[i] + 1).min(self.k - 1);
            if self.current[i] < limit {
                self.current[i] += 1;
                for slot in &mut self.current[i + 1..] {
                    *slot = 0;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for PartitionEnumeration {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        if !self.advance() {
            self.done = true;
        }
        Some(out)
    }
}

/// Best assignment into at most `k` clusters under the squared objective
/// over the top `l` flows. Ties keep the partition enumerated first.
pub fn brute_force_best_partition(
    g: &InfluenceGraph,
    k: usize,
    l: usize,
) -> Result<(ClusterAssignment, f64)> {
    let n = g.node_count();
    if n > MAX_BRUTE_FORCE_NODES || k > MAX_BRUTE_FORCE_CLUSTERS {
        return Err(Error::TooLarge(format!(
            "brute force is limited to n <= {MAX_BRUTE_FORCE_NODES} and k <= {MAX_BRUTE_FORCE_CLUSTERS} \
             (got n = {n}, k = {k})"
        )));
    }
    if k == 0 || l == 0 {
        return Err(Error::Argument("k and l must be >= 1".into()));
    }
    let mut best: Option<(ClusterAssignment, f64)> = None;
    for labels in PartitionEnumeration::new(n, k) {
        let asg = ClusterAssignment::from_labels(&labels, k);
        let value = flow_matrix(g, &asg)?.captured(l, ObjectiveKind::Squared);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((asg, value));
        }
    }
    Ok(best.expect("at least one partition is enumerated"))
}

/// Per-cluster-pair raw sums `Σ a_pq` for `p ∈ π_c, q ∈ π_d`.
fn block_sums(g: &InfluenceGraph, asg: &ClusterAssignment) -> Vec<f64> {
    let k = asg.effective_k();
    let mut s = vec![0.0; k * k];
    for (i, j, w) in g.edges() {
        s[asg.label(i) * k + asg.label(j)] += w;
    }
    s
}

/// Dense `n × n` matrix of `w_ij^IGS`: the block density of the pair of
/// clusters holding `i` and `j`.
pub fn igs_weights(g: &InfluenceGraph, asg: &ClusterAssignment) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let k = asg.effective_k();
    let sums = block_sums(g, asg);
    let sizes = asg.sizes();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (c, d) = (asg.label(i), asg.label(j));
                    sums[c * k + d] / (sizes[c] * sizes[d]) as f64
                })
                .collect()
        })
        .collect()
}

/// Dense `n × n` matrix of `w_ij^KM = Σ_{p∈π_c} a_pj / 2|π_c| + Σ_{q∈π_d} a_iq / 2|π_d|`
/// with `c` the cluster of `i` and `d` the cluster of `j`.
pub fn km_weights(g: &InfluenceGraph, asg: &ClusterAssignment) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let k = asg.effective_k();
    // into[c][j] = Σ_{p∈π_c} a_pj, out_of[i][d] = Σ_{q∈π_d} a_iq
    let mut into = vec![0.0; k * n];
    let mut out_of = vec![0.0; n * k];
    for (p, q, w) in g.edges() {
        into[asg.label(p) * n + q] += w;
        out_of[p * k + asg.label(q)] += w;
    }
    let sizes = asg.sizes();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (c, d) = (asg.label(i), asg.label(j));
                    into[c * n + j] / (2.0 * sizes[c] as f64)
                        + out_of[i * k + d] / (2.0 * sizes[d] as f64)
                })
                .collect()
        })
        .collect()
}

fn weighted_adjacency_sum(g: &InfluenceGraph, w: &[Vec<f64>]) -> f64 {
    g.edges().map(|(i, j, a)| a * w[i][j]).sum()
}

/// Full squared objective over all cluster pairs, and the same quantity
/// written as `Σ a_ij w_ij^IGS`.
pub fn igs_weight_identity(g: &InfluenceGraph, asg: &ClusterAssignment) -> Result<(f64, f64)> {
    asg.check_len(g.node_count())?;
    let k = asg.effective_k();
    let sizes = asg.sizes();
    let sums = block_sums(g, asg);
    let mut lhs = 0.0;
    for c in 0..k {
        for d in 0..k {
            lhs += sums[c * k + d].powi(2) / (sizes[c] * sizes[d]) as f64;
        }
    }
    Ok((lhs, weighted_adjacency_sum(g, &igs_weights(g, asg))))
}

/// Kernel k-means objective `Σ_c Σ_{i,j∈π_c} k_ij / |π_c|` with the
/// bidirectional CommonNeighbor kernel, and the same quantity written as
/// `Σ a_ij w_ij^KM`.
pub fn km_weight_identity(g: &InfluenceGraph, asg: &ClusterAssignment) -> Result<(f64, f64)> {
    asg.check_len(g.node_count())?;
    let kernel = common_neighbor(g, Direction::Bidirectional);
    let sizes = asg.sizes();
    let lhs: f64 = kernel
        .entries()
        .filter(|&(i, j, _)| asg.label(i) == asg.label(j))
        .map(|(i, _, v)| v / sizes[asg.label(i)] as f64)
        .sum();
    Ok((lhs, weighted_adjacency_sum(g, &km_weights(g, asg))))
}

/// `Tr(Hᵀ K H)` for the normalized indicator `H` of `asg`
/// (column `c` is the indicator of `π_c` scaled by `1/√|π_c|`).
pub fn trace_objective(kernel: &SimilarityMatrix, asg: &ClusterAssignment) -> Result<f64> {
    asg.check_len(kernel.order())?;
    let k = asg.effective_k();
    let n = kernel.order();
    let mut h = vec![0.0; n * k];
    for i in 0..n {
        h[i * k + asg.label(i)] = 1.0 / (asg.sizes()[asg.label(i)] as f64).sqrt();
    }
    // Tr(HᵀKH) = Σ_c Σ_{i,j} h_ic k_ij h_jc
    let mut trace = 0.0;
    for (i, j, v) in kernel.entries() {
        for c in 0..k {
            trace += h[i * k + c] * v * h[j * k + c];
        }
    }
    Ok(trace)
}

/// True when `|lhs - rhs| <= tol * max(1, |lhs|)`.
pub fn agrees(lhs: f64, rhs: f64, tol: f64) -> bool {
    (lhs - rhs).abs() <= tol * lhs.abs().max(1.0)
}
