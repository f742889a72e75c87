use serde::{Deserialize, Serialize};

use super::FactorMatrix;
use crate::error::{Error, Result};

/// Disjoint, exhaustive clustering with dense, nonempty cluster ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    sizes: Vec<usize>,
    requested_k: usize,
}

impl ClusterAssignment {
    /// Compacts arbitrary labels: clusters are renumbered by ascending
    /// original label, empty ones disappear.
    pub fn from_labels(labels: &[usize], requested_k: usize) -> Self {
        let max = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut remap = vec![usize::MAX; max];
        for &l in labels {
            remap[l] = 0;
        }
        let mut next = 0;
        for slot in remap.iter_mut() {
            if *slot == 0 {
                *slot = next;
                next += 1;
            }
        }
        let labels: Vec<usize> = labels.iter().map(|&l| remap[l]).collect();
        let mut sizes = vec![0; next];
        for &l in &labels {
            sizes[l] += 1;
        }
        ClusterAssignment {
            labels,
            sizes,
            requested_k: requested_k.max(next),
        }
    }

    /// Every node in its own cluster.
    pub fn singletons(n: usize) -> Self {
        Self::from_labels(&(0..n).collect::<Vec<_>>(), n)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> usize {
        self.labels[node]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of nonempty clusters.
    pub fn effective_k(&self) -> usize {
        self.sizes.len()
    }

    pub fn requested_k(&self) -> usize {
        self.requested_k
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i] == cluster)
            .collect()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.labels.len() != n {
            return Err(Error::Dimension(format!(
                "assignment covers {} nodes, graph has {n}",
                self.labels.len()
            )));
        }
        Ok(())
    }
}

/// Row-wise argmax of `h` (lowest column wins ties), then compaction of
/// empty clusters preserving column order.
pub fn assign_clusters(h: &FactorMatrix) -> ClusterAssignment {
    let labels: Vec<usize> = (0..h.rows())
        .map(|i| {
            let row = h.row(i);
            let mut best = 0;
            for c in 1..row.len() {
                if row[c] > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect();
    ClusterAssignment::from_labels(&labels, h.cols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn argmax_and_ties() {
        let h = FactorMatrix::from_rows(&[vec![0.1, 0.9], vec![0.5, 0.5]]);
        let a = assign_clusters(&h);
        assert_eq!(a.labels(), &[1, 0]);
    }

    #[test]
    fn unused_column_is_dropped() {
        let h = FactorMatrix::from_rows(&[
            vec![0.9, 0.2, 0.1],
            vec![0.1, 0.2, 0.8],
            vec![0.7, 0.6, 0.1],
        ]);
        let a = assign_clusters(&h);
        assert_eq!(a.effective_k(), 2);
        assert_eq!(a.requested_k(), 3);
        assert_eq!(a.labels(), &[0, 1, 0]);
        assert_eq!(a.sizes(), &[2, 1]);
    }

    #[test]
    fn from_labels_compacts_in_order() {
        let a = ClusterAssignment::from_labels(&[4, 2, 4, 7], 8);
        assert_eq!(a.labels(), &[1, 0, 1, 2]);
        assert_eq!(a.sizes().iter().sum::<usize>(), 4);
        assert_eq!(a.members(1), vec![0, 2]);
    }

    proptest! {
        #[test]
        fn row_scaling_keeps_labels(
            rows in proptest::collection::vec(proptest::collection::vec(0.0f64..10.0, 4), 1..30),
            scales in proptest::collection::vec(0.01f64..100.0, 30),
        ) {
            let h = FactorMatrix::from_rows(&rows);
            let scaled: Vec<Vec<f64>> = rows
                .iter()
                .zip(&scales)
                .map(|(r, s)| r.iter().map(|x| x * s).collect())
                .collect();
            // compare argmax positions only where the row has a strict maximum
            let a = assign_clusters(&h);
            let b = assign_clusters(&FactorMatrix::from_rows(&scaled));
            let strict = rows.iter().zip(&scaled).all(|(r, s)| {
                let m = r.iter().cloned().fold(f64::MIN, f64::max);
                let ms = s.iter().cloned().fold(f64::MIN, f64::max);
                r.iter().filter(|&&x| x == m).count() == 1 && s.iter().filter(|&&x| x == ms).count() == 1
            });
            if strict {
                prop_assert_eq!(a, b);
            }
            let sizes = assign_clusters(&h).sizes().iter().sum::<usize>();
            prop_assert_eq!(sizes, rows.len());
        }
    }
}
