use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pruning::PruneKind;
use crate::similarity::{AttributeSelector, AugmentParams, SimRankParams, SimilarityKind};

/// Optional Hadamard factors fused into the topology matrix.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    /// Categorical attribute to boost, if any.
    pub attribute: Option<AttributeSelector>,
    /// Apply the publication-time decay factor.
    pub time: bool,
}

impl AugmentConfig {
    pub fn is_enabled(&self) -> bool {
        self.attribute.is_some() || self.time
    }
}

/// Every tunable of a summarization run. Missing fields deserialize to
/// their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SummarizeConfig {
    pub k: usize,
    pub l: usize,
    pub similarity: SimilarityKind,
    pub simrank: SimRankParams,
    pub augment: AugmentConfig,
    pub params: AugmentParams,
    pub seed: u64,
    pub max_iter: usize,
    pub rel_tol: f64,
    /// Independent factorizations; the one with the highest squared flow
    /// objective wins. The first uses the eigen initialization.
    pub restarts: usize,
    pub prune: PruneKind,
}

impl Default for SummarizeConfig {
    fn default() -> Self {
        SummarizeConfig {
            k: 10,
            l: 20,
            similarity: SimilarityKind::default(),
            simrank: SimRankParams::default(),
            augment: AugmentConfig::default(),
            params: AugmentParams::default(),
            seed: 42,
            max_iter: 300,
            rel_tol: 1e-4,
            restarts: 1,
            prune: PruneKind::default(),
        }
    }
}

impl SummarizeConfig {
    /// Config with `k` clusters and the matching `l = 2k`.
    pub fn with_k(k: usize) -> Self {
        SummarizeConfig {
            k,
            l: 2 * k,
            ..Default::default()
        }
    }

    /// Checks parameter ranges; `node_count` adds the `k <= n` check.
    pub fn validate(&self, node_count: Option<usize>) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Argument(format!("k must be >= 2, got {}", self.k)));
        }
        if self.l < 1 || self.l > self.k * self.k {
            return Err(Error::Argument(format!(
                "l must lie in 1..={} for k = {}, got {}",
                self.k * self.k,
                self.k,
                self.l
            )));
        }
        if let Some(n) = node_count {
            if self.k > n {
                return Err(Error::Dimension(format!(
                    "k = {} exceeds the {n} nodes of the graph",
                    self.k
                )));
            }
        }
        if !(self.rel_tol >= 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::Argument(format!("rel_tol must be >= 0, got {}", self.rel_tol)));
        }
        if self.restarts == 0 {
            return Err(Error::Argument("restarts must be >= 1".into()));
        }
        if self.similarity == SimilarityKind::Simrank
            && (!(self.simrank.decay > 0.0 && self.simrank.decay < 1.0) || self.simrank.max_hops == 0
                || self.simrank.iterations == 0)
        {
            return Err(Error::Argument("simrank decay must lie in (0,1); max_hops and iterations must be >= 1".into()));
        }
        self.params.validate()
    }
}
