use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::eigen::random_factor;
use super::{
    assign_clusters, eigen_init, flow_matrix, symnmf, ClusterAssignment, EigenSolver,
    FactorMatrix, FlowMatrix, ObjectiveKind, SummarizeConfig,
};
use crate::error::Result;
use crate::graph::InfluenceGraph;
use crate::similarity::{
    attribute_matrix, fuse, time_matrix, topology_matrix, PairFactor, SimilarityMatrix,
};

/// Wall time per stage, in milliseconds.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub similarity_ms: f64,
    pub fusion_ms: f64,
    pub init_ms: f64,
    pub factorization_ms: f64,
    pub assignment_ms: f64,
    pub flows_ms: f64,
    /// Filled in by callers that prune and label after the pipeline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pruning_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labeling_ms: Option<f64>,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub node_count: usize,
    pub edge_count: usize,
    pub similarity_nnz: usize,
    pub requested_k: usize,
    pub effective_k: usize,
    pub init_solver: EigenSolver,
    pub iterations: usize,
    pub converged: bool,
    /// SymNMF objective, initial value first, for the winning run.
    pub objective_trace: Vec<f64>,
    /// Squared flow objective over all k² flows, per restart.
    pub restart_objectives: Vec<f64>,
    pub best_restart: usize,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<StageTimings>,
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub assignment: ClusterAssignment,
    pub flows: FlowMatrix,
    pub factor: FactorMatrix,
    pub similarity: SimilarityMatrix,
    pub diagnostics: Diagnostics,
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn missing_warning(g: &InfluenceGraph, missing: &[usize], what: &str) -> Option<String> {
    if missing.is_empty() {
        return None;
    }
    let shown: Vec<&str> = missing.iter().take(10).map(|&i| g.node_id(i)).collect();
    let more = if missing.len() > shown.len() { ", ..." } else { "" };
    Some(format!(
        "{} node(s) lack {what}: {}{more}",
        missing.len(),
        shown.join(", ")
    ))
}

/// Similarity, optional fusion, eigen initialization, SymNMF, assignment
/// and flow computation, in that order.
pub fn summarize_pipeline(g: &InfluenceGraph, cfg: &SummarizeConfig) -> Result<PipelineOutput> {
    let started = Instant::now();
    cfg.validate(Some(g.node_count()))?;
    let mut timings = StageTimings::default();

    let t = Instant::now();
    let (topology, mut warnings) = topology_matrix(g, cfg.similarity, cfg.simrank)?;
    timings.similarity_ms = ms_since(t);

    let t = Instant::now();
    let similarity = if cfg.augment.is_enabled() {
        let attr = match &cfg.augment.attribute {
            Some(sel) => Some((attribute_matrix(g.metas(), sel, cfg.params)?, sel)),
            None => None,
        };
        let time = if cfg.augment.time {
            Some(time_matrix(g.metas(), cfg.params)?)
        } else {
            None
        };
        let mut factors: Vec<&dyn PairFactor> = Vec::new();
        if let Some((a, sel)) = &attr {
            warnings.extend(missing_warning(g, a.missing(), &format!("attribute `{sel}`")));
            factors.push(a);
        }
        if let Some(tm) = &time {
            warnings.extend(missing_warning(g, tm.missing(), "a year (no time decay applied)"));
            factors.push(tm);
        }
        fuse(&topology, &factors)?
    } else {
        topology
    };
    timings.fusion_ms = ms_since(t);

    let mut best: Option<(f64, usize, ClusterAssignment, FlowMatrix, super::SymNmfOutput)> = None;
    let mut restart_objectives = Vec::with_capacity(cfg.restarts);
    let mut solver = EigenSolver::Dense;
    for r in 0..cfg.restarts {
        let t = Instant::now();
        let h0 = if r == 0 {
            let init = eigen_init(&similarity, cfg.k, cfg.seed)?;
            solver = init.solver;
            if solver == EigenSolver::RandomFallback {
                warnings.push("eigensolver did not converge; random initialization used".into());
            }
            init.h
        } else {
            random_factor(g.node_count(), cfg.k, cfg.seed.wrapping_add(r as u64))
        };
        timings.init_ms += ms_since(t);

        let t = Instant::now();
        let nmf = symnmf(&similarity, &h0, cfg.max_iter, cfg.rel_tol)?;
        timings.factorization_ms += ms_since(t);

        let t = Instant::now();
        let assignment = assign_clusters(&nmf.h);
        timings.assignment_ms += ms_since(t);

        let t = Instant::now();
        let flows = flow_matrix(g, &assignment)?;
        timings.flows_ms += ms_since(t);

        let score = flows.captured(usize::MAX, ObjectiveKind::Squared);
        restart_objectives.push(score);
        if best.as_ref().is_none_or(|b| score > b.0) {
            best = Some((score, r, assignment, flows, nmf));
        }
    }
    let (_, best_restart, assignment, flows, nmf) = best.expect("at least one restart");
    if assignment.effective_k() < cfg.k {
        warnings.push(format!(
            "{} of {} clusters came out empty",
            cfg.k - assignment.effective_k(),
            cfg.k
        ));
    }
    timings.total_ms = ms_since(started);

    let diagnostics = Diagnostics {
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        similarity_nnz: similarity.nnz(),
        requested_k: cfg.k,
        effective_k: assignment.effective_k(),
        init_solver: solver,
        iterations: nmf.iterations,
        converged: nmf.converged,
        objective_trace: nmf.trace,
        restart_objectives,
        best_restart,
        warnings,
        timings: Some(timings),
    };
    Ok(PipelineOutput {
        assignment,
        flows,
        factor: nmf.h,
        similarity,
        diagnostics,
    })
}
