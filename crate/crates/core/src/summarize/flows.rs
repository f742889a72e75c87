use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::ClusterAssignment;
use crate::error::{Error, Result};
use crate::graph::InfluenceGraph;

/// All edges from cluster `src` to cluster `dst`, aggregated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub src: usize,
    pub dst: usize,
    /// Sum of edge weights in the block.
    pub raw_sum: f64,
    /// `raw_sum / (|src| |dst|)`.
    pub rate: f64,
    /// `rate * sqrt(|src| |dst|)`; the ranking key.
    pub normalized_rate: f64,
    /// `rate² |src| |dst|`.
    pub squared_contribution: f64,
}

impl Flow {
    pub fn new(src: usize, dst: usize, raw_sum: f64, src_size: usize, dst_size: usize) -> Self {
        let area = (src_size * dst_size) as f64;
        let rate = raw_sum / area;
        let normalized_rate = rate * area.sqrt();
        Flow {
            src,
            dst,
            raw_sum,
            rate,
            normalized_rate,
            squared_contribution: normalized_rate * normalized_rate,
        }
    }

    pub fn is_intra(&self) -> bool {
        self.src == self.dst
    }
}

/// Descending normalized rate, then ascending (src, dst).
pub(crate) fn rank_order(a: &Flow, b: &Flow) -> Ordering {
    b.normalized_rate
        .partial_cmp(&a.normalized_rate)
        .unwrap_or(Ordering::Equal)
        .then((a.src, a.dst).cmp(&(b.src, b.dst)))
}

/// Dense `k x k` table of flows between clusters, self-flows included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowMatrix {
    k: usize,
    sizes: Vec<usize>,
    cells: Vec<Flow>,
}

impl FlowMatrix {
    /// Builds from per-block raw sums (`raw[c * k + d]`).
    pub fn from_raw(sizes: &[usize], raw: &[f64]) -> Self {
        let k = sizes.len();
        assert_eq!(raw.len(), k * k, "raw block sums must be k x k");
        let cells = (0..k * k)
            .map(|s| {
                let (c, d) = (s / k, s % k);
                Flow::new(c, d, raw[s], sizes[c], sizes[d])
            })
            .collect();
        FlowMatrix {
            k,
            sizes: sizes.to_vec(),
            cells,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn get(&self, src: usize, dst: usize) -> &Flow {
        &self.cells[src * self.k + dst]
    }

    pub fn flows(&self) -> &[Flow] {
        &self.cells
    }

    /// All k² flows in ranking order.
    pub fn ranked(&self) -> Vec<Flow> {
        let mut v = self.cells.clone();
        v.sort_by(rank_order);
        v
    }

    /// Objective over the top `min(l, k²)` flows.
    pub fn captured(&self, l: usize, kind: ObjectiveKind) -> f64 {
        sum_top(&self.ranked(), l.min(self.k * self.k), kind)
    }
}

/// Flow rates of `g` under `asg`.
pub fn flow_matrix(g: &InfluenceGraph, asg: &ClusterAssignment) -> Result<FlowMatrix> {
    asg.check_len(g.node_count())?;
    let k = asg.effective_k();
    let mut raw = vec![0.0; k * k];
    for (i, j, w) in g.edges() {
        raw[asg.label(i) * k + asg.label(j)] += w;
    }
    Ok(FlowMatrix::from_raw(asg.sizes(), &raw))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// Sum of normalized rates.
    General,
    /// Sum of squared contributions.
    Squared,
}

fn sum_top(ranked: &[Flow], l: usize, kind: ObjectiveKind) -> f64 {
    ranked[..l]
        .iter()
        .map(|f| match kind {
            ObjectiveKind::General => f.normalized_rate,
            ObjectiveKind::Squared => f.squared_contribution,
        })
        .sum()
}

/// Summary objective over the `l` top-ranked flows.
pub fn objective(flows: &FlowMatrix, l: usize, kind: ObjectiveKind) -> Result<f64> {
    let total = flows.k * flows.k;
    if l == 0 || l > total {
        return Err(Error::Argument(format!(
            "l = {l} outside 1..={total} for k = {}",
            flows.k
        )));
    }
    Ok(sum_top(&flows.ranked(), l, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(n: usize, edges: &[(usize, usize)]) -> InfluenceGraph {
        let e: Vec<_> = edges.iter().map(|&(i, j)| (i, j, 1.0)).collect();
        InfluenceGraph::from_edge_list(n, &e).unwrap()
    }

    #[test]
    fn two_into_one() {
        let g = unit(3, &[(0, 2), (1, 2)]);
        let asg = ClusterAssignment::from_labels(&[0, 0, 1], 2);
        let f = flow_matrix(&g, &asg).unwrap();
        assert_eq!(f.get(0, 1).rate, 1.0);
        assert_eq!(f.get(0, 1).raw_sum, 2.0);
    }

    #[test]
    fn singleton_without_self_loop() {
        let g = unit(2, &[(0, 1)]);
        let f = flow_matrix(&g, &ClusterAssignment::singletons(2)).unwrap();
        assert_eq!(f.get(0, 0).rate, 0.0);
    }

    #[test]
    fn single_cluster_rate() {
        let g = unit(4, &[(0, 1), (1, 2), (2, 3), (3, 3)]);
        let f = flow_matrix(&g, &ClusterAssignment::from_labels(&[0; 4], 1)).unwrap();
        assert_eq!(f.get(0, 0).rate, 4.0 / 16.0);
    }

    #[test]
    fn path_singletons_squared() {
        let g = unit(3, &[(0, 1), (1, 2)]);
        let f = flow_matrix(&g, &ClusterAssignment::singletons(3)).unwrap();
        assert_eq!(objective(&f, 2, ObjectiveKind::Squared).unwrap(), 2.0);
        assert_eq!(objective(&f, 2, ObjectiveKind::General).unwrap(), 2.0);
    }

    #[test]
    fn edgeless_is_zero() {
        let g = unit(3, &[]);
        let f = flow_matrix(&g, &ClusterAssignment::from_labels(&[0, 1, 1], 2)).unwrap();
        assert_eq!(objective(&f, 4, ObjectiveKind::Squared).unwrap(), 0.0);
        assert_eq!(objective(&f, 1, ObjectiveKind::General).unwrap(), 0.0);
    }

    #[test]
    fn l_out_of_range() {
        let g = unit(2, &[(0, 1)]);
        let f = flow_matrix(&g, &ClusterAssignment::singletons(2)).unwrap();
        assert!(objective(&f, 0, ObjectiveKind::Squared).is_err());
        assert!(objective(&f, 5, ObjectiveKind::Squared).is_err());
    }

    #[test]
    fn singletons_squared_is_sum_of_squared_weights() {
        let g = InfluenceGraph::from_edge_list(3, &[(0, 1, 2.0), (1, 2, 3.0), (2, 2, 0.5)]).unwrap();
        let f = flow_matrix(&g, &ClusterAssignment::singletons(3)).unwrap();
        assert_eq!(objective(&f, 9, ObjectiveKind::Squared).unwrap(), 4.0 + 9.0 + 0.25);
    }

    #[test]
    fn assignment_length_checked() {
        let g = unit(3, &[]);
        assert!(flow_matrix(&g, &ClusterAssignment::singletons(2)).is_err());
    }

    proptest! {
        #[test]
        fn ranking_by_rate_equals_ranking_by_square(
            k in 1usize..6,
            sizes in proptest::collection::vec(1usize..20, 6),
            raw in proptest::collection::vec(0.0f64..50.0, 36),
        ) {
            let f = FlowMatrix::from_raw(&sizes[..k], &raw[..k * k]);
            for cell in f.flows() {
                prop_assert!((cell.rate - cell.raw_sum / (sizes[cell.src] * sizes[cell.dst]) as f64).abs() < 1e-12);
                prop_assert!(cell.squared_contribution >= 0.0);
            }
            let by_rate = f.ranked();
            let mut by_square = f.flows().to_vec();
            by_square.sort_by(|a, b| b.squared_contribution.partial_cmp(&a.squared_contribution).unwrap()
                .then((a.src, a.dst).cmp(&(b.src, b.dst))));
            let a: Vec<(usize, usize)> = by_rate.iter().map(|x| (x.src, x.dst)).collect();
            let b: Vec<(usize, usize)> = by_square.iter().map(|x| (x.src, x.dst)).collect();
            prop_assert_eq!(a, b);
        }
    }
}
