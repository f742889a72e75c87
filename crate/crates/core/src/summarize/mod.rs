//! Node summarization: eigen-based initialization, symmetric NMF, cluster
//! assignment, flow computation and the flow objectives.

mod assign;
mod config;
mod eigen;
mod flows;
mod pipeline;
mod symnmf;

pub use assign::{assign_clusters, ClusterAssignment};
pub use config::{AugmentConfig, SummarizeConfig};
pub use eigen::{
    eigen_init, top_eigenpairs, EigenInit, EigenSolver, DENSE_EIGEN_LIMIT, EPSILON_INIT,
};
pub use flows::{flow_matrix, objective, Flow, FlowMatrix, ObjectiveKind};
pub use pipeline::{summarize_pipeline, Diagnostics, PipelineOutput, StageTimings};
pub use symnmf::{symnmf, symnmf_objective, SymNmfOutput, BETA, EPSILON_DIV};

/// Dense nonnegative `rows x cols` matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FactorMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FactorMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "factor data length mismatch");
        FactorMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_vec(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, c: usize) -> f64 {
        self.data[i * self.cols + c]
    }

    pub fn set(&mut self, i: usize, c: usize, v: f64) {
        self.data[i * self.cols + c] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|v| *v >= 0.0)
    }
}
