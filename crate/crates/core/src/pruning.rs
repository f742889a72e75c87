//! Reduction of the k² flow table to the summary graph: top-l ranking with
//! incoming-flow recovery, or a maximum spanning tree.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summarize::{ClusterAssignment, Flow, FlowMatrix, ObjectiveKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PruneKind {
    #[default]
    Rank,
    Mst,
}

impl FromStr for PruneKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rank" | "rank_filter" => Ok(PruneKind::Rank),
            "mst" => Ok(PruneKind::Mst),
            other => Err(Error::Argument(format!("unknown prune kind `{other}`"))),
        }
    }
}

impl fmt::Display for PruneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PruneKind::Rank => "rank",
            PruneKind::Mst => "mst",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterNode {
    pub id: usize,
    pub size: usize,
    pub members: Vec<usize>,
}

/// Clusters plus retained flows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryGraph {
    pub clusters: Vec<ClusterNode>,
    pub flows: Vec<Flow>,
    /// Cluster holding the source node.
    pub source_cluster: usize,
}

impl SummaryGraph {
    fn new(asg: &ClusterAssignment, source_node: usize, flows: Vec<Flow>) -> Self {
        let mut members = vec![Vec::new(); asg.effective_k()];
        for (i, &c) in asg.labels().iter().enumerate() {
            members[c].push(i);
        }
        let clusters = members
            .into_iter()
            .enumerate()
            .map(|(id, members)| ClusterNode {
                id,
                size: members.len(),
                members,
            })
            .collect();
        SummaryGraph {
            clusters,
            flows,
            source_cluster: if asg.node_count() == 0 {
                0
            } else {
                asg.label(source_node)
            },
        }
    }

    pub fn contains(&self, src: usize, dst: usize) -> bool {
        self.flows.iter().any(|f| f.src == src && f.dst == dst)
    }

    /// Objective over the retained flows.
    pub fn objective(&self, kind: ObjectiveKind) -> f64 {
        self.flows
            .iter()
            .map(|f| match kind {
                ObjectiveKind::General => f.normalized_rate,
                ObjectiveKind::Squared => f.squared_contribution,
            })
            .sum()
    }
}

/// Keeps the `l` best nonzero flows, then for every cluster re-adds its
/// densest incoming inter-cluster flow when it is missing. The source node
/// is taken to be node 0 (the root of an extracted influence graph).
pub fn rank_filter(flows: &FlowMatrix, asg: &ClusterAssignment, l: usize) -> SummaryGraph {
    rank_filter_from(flows, asg, l, 0)
}

pub fn rank_filter_from(
    flows: &FlowMatrix,
    asg: &ClusterAssignment,
    l: usize,
    source_node: usize,
) -> SummaryGraph {
    let ranked: Vec<Flow> = flows
        .ranked()
        .into_iter()
        .filter(|f| f.normalized_rate > 0.0)
        .collect();
    let mut kept: Vec<Flow> = ranked.iter().take(l).copied().collect();
    let k = flows.k();
    let mut present = vec![false; k * k];
    for f in &kept {
        present[f.src * k + f.dst] = true;
    }
    for dst in 0..k {
        // `ranked` is already in rank order; the first hit is the densest
        if let Some(best) = ranked.iter().find(|f| f.dst == dst && !f.is_intra()) {
            if !present[best.src * k + best.dst] {
                present[best.src * k + best.dst] = true;
                kept.push(*best);
            }
        }
    }
    SummaryGraph::new(asg, source_node, kept)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Maximum spanning forest over the undirected collapse of inter-cluster
/// flows (weight = larger normalized rate of the two directions). Each kept
/// pair retains its dominant direction.
pub fn mst_prune(flows: &FlowMatrix, asg: &ClusterAssignment) -> SummaryGraph {
    mst_prune_from(flows, asg, 0)
}

pub fn mst_prune_from(flows: &FlowMatrix, asg: &ClusterAssignment, source_node: usize) -> SummaryGraph {
    let k = flows.k();
    let mut candidates: Vec<(f64, usize, usize, Flow)> = Vec::new();
    for a in 0..k {
        for b in (a + 1)..k {
            let (fwd, bwd) = (flows.get(a, b), flows.get(b, a));
            let dominant = if bwd.normalized_rate > fwd.normalized_rate { bwd } else { fwd };
            if dominant.normalized_rate > 0.0 {
                candidates.push((dominant.normalized_rate, a, b, *dominant));
            }
        }
    }
    candidates.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((x.1, x.2).cmp(&(y.1, y.2)))
    });
    let mut parent: Vec<usize> = (0..k).collect();
    let mut kept = Vec::new();
    for (_, a, b, flow) in candidates {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            kept.push(flow);
        }
    }
    SummaryGraph::new(asg, source_node, kept)
}

/// Dispatches on `kind`.
pub fn prune(
    flows: &FlowMatrix,
    asg: &ClusterAssignment,
    kind: PruneKind,
    l: usize,
    source_node: usize,
) -> SummaryGraph {
    match kind {
        PruneKind::Rank => rank_filter_from(flows, asg, l, source_node),
        PruneKind::Mst => mst_prune_from(flows, asg, source_node),
    }
}
