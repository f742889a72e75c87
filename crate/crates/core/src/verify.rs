//! Self-check suite: algebraic identities on random graphs, hand-solved
//! brute-force cases, and the pipeline-versus-optimum floor on tiny DAGs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::{maximal_influence_graph, InfluenceGraph};
use crate::oracle::{
    agrees, brute_force_best_partition, igs_weight_identity, km_weight_identity, trace_objective,
};
use crate::similarity::{common_neighbor, Direction};
use crate::summarize::{summarize_pipeline, ClusterAssignment, ObjectiveKind, SummarizeConfig};
use crate::synth::{random_dag, random_digraph};

pub const IDENTITY_TOLERANCE: f64 = 1e-9;
pub const FLOOR_RATIO: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: String, passed: bool, detail: String) {
        self.checks.push(CheckResult { name, passed, detail });
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random (graph, partition) pairs for the identity checks.
    pub cases: usize,
    /// Small DAGs compared against the brute-force optimum.
    pub floor_cases: usize,
    /// Skews one identity so the suite must report a failure.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 7,
            cases: 200,
            floor_cases: 20,
            inject_fault: false,
        }
    }
}

fn case_rng(seed: u64, stream: u64, case: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r.set_word_pos(case as u128 * 1024);
    r
}

/// Random digraph with `n <= 10` and a random partition into at most four
/// clusters, reproducible from `(seed, case)`.
pub fn identity_case(seed: u64, case: usize) -> (InfluenceGraph, ClusterAssignment) {
    let mut r = case_rng(seed, 1, case);
    let n = r.random_range(1..=10);
    let p = r.random_range(0.05..0.6);
    let g = random_digraph(n, p, r.random());
    let k = r.random_range(1..=4);
    let labels: Vec<usize> = (0..n).map(|_| r.random_range(0..k)).collect();
    (g, ClusterAssignment::from_labels(&labels, k))
}

/// Maximal influence graph of node `0` in a random DAG on at most eight
/// nodes, with `2 <= k <= 3` clusters. Draws repeat until at least three
/// nodes are reachable.
pub fn floor_case(seed: u64, case: usize) -> (InfluenceGraph, usize) {
    let mut r = case_rng(seed, 2, case);
    loop {
        let n = r.random_range(3..=8);
        let p = r.random_range(0.2..0.6);
        let k = r.random_range(2..=3usize);
        let dag = random_dag(n, p, r.random());
        let g = maximal_influence_graph(&dag, "0").expect("node 0 exists");
        if g.node_count() >= 3 {
            let k = k.min(g.node_count());
            return (g, k);
        }
    }
}

/// Pipeline and brute-force squared objectives with `l = k`.
pub fn floor_values(g: &InfluenceGraph, k: usize, seed: u64) -> crate::Result<(f64, f64)> {
    let cfg = SummarizeConfig {
        k,
        l: k,
        seed,
        ..Default::default()
    };
    let out = summarize_pipeline(g, &cfg)?;
    let pipeline = out.flows.captured(k, ObjectiveKind::Squared);
    let (_, best) = brute_force_best_partition(g, k, k)?;
    Ok((pipeline, best))
}

pub fn run_verification(opts: VerifyOptions) -> VerifyReport {
    let mut report = VerifyReport::default();

    let path = InfluenceGraph::from_edge_list(3, &[(0, 1, 1.0), (1, 2, 1.0)]).expect("static graph");
    match brute_force_best_partition(&path, 3, 2) {
        Ok((asg, v)) => report.push(
            "brute_force.path".into(),
            v == 2.0 && asg.effective_k() == 3,
            format!("objective {v}, {} clusters (expected 2, 3)", asg.effective_k()),
        ),
        Err(e) => report.push("brute_force.path".into(), false, e.to_string()),
    }
    let star = InfluenceGraph::from_edge_list(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])
        .expect("static graph");
    match brute_force_best_partition(&star, 2, 1) {
        Ok((asg, v)) => report.push(
            "brute_force.star".into(),
            (v - 3.0).abs() < 1e-12 && asg.labels() == [0, 1, 1, 1],
            format!("objective {v}, labels {:?} (expected 3, [0, 1, 1, 1])", asg.labels()),
        ),
        Err(e) => report.push("brute_force.star".into(), false, e.to_string()),
    }

    for case in 0..opts.cases {
        let (g, asg) = identity_case(opts.seed, case);
        let (il, ir) = igs_weight_identity(&g, &asg).expect("case covers the graph");
        report.push(
            format!("identity.igs[{case}]"),
            agrees(il, ir, IDENTITY_TOLERANCE),
            format!("lhs {il:e} rhs {ir:e}"),
        );
        let (kl, mut kr) = km_weight_identity(&g, &asg).expect("case covers the graph");
        if opts.inject_fault && case == 0 {
            kr = kr * (1.0 + 1e-6) + 1e-6;
        }
        report.push(
            format!("identity.km[{case}]"),
            agrees(kl, kr, IDENTITY_TOLERANCE),
            format!("lhs {kl:e} rhs {kr:e}"),
        );
        let kernel = common_neighbor(&g, Direction::Bidirectional);
        let t = trace_objective(&kernel, &asg).expect("case covers the graph");
        report.push(
            format!("identity.trace[{case}]"),
            agrees(kl, t, IDENTITY_TOLERANCE),
            format!("trace {t:e} km lhs {kl:e}"),
        );
    }

    for case in 0..opts.floor_cases {
        let (g, k) = floor_case(opts.seed, case);
        let name = format!("floor[{case}]");
        match floor_values(&g, k, opts.seed) {
            Ok((p, b)) => report.push(
                name,
                p >= FLOOR_RATIO * b * (1.0 - IDENTITY_TOLERANCE),
                format!("pipeline {p:.6} vs optimum {b:.6} (n {}, k {k})", g.node_count()),
            ),
            Err(e) => report.push(name, false, e.to_string()),
        }
    }
    report
}
