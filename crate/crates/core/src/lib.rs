//! Flow-based summarization of influence graphs.
//!
//! Given a directed influence graph and a source node, the engine extracts
//! everything the source reaches, clusters those nodes so that dense
//! cluster-to-cluster flows emerge, keeps the strongest flows and exports the
//! result as JSON or Graphviz DOT.
//!
//! ```
//! use flowsum::graph::InfluenceGraph;
//! use flowsum::summarize::{summarize_pipeline, SummarizeConfig};
//! use flowsum::pruning::rank_filter;
//!
//! let g = InfluenceGraph::from_edge_list(
//!     5,
//!     &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0), (1, 4, 1.0), (2, 4, 1.0)],
//! )
//! .unwrap();
//! let cfg = SummarizeConfig { k: 3, l: 4, ..Default::default() };
//! let out = summarize_pipeline(&g, &cfg).unwrap();
//! let summary = rank_filter(&out.flows, &out.assignment, cfg.l);
//! assert!(summary.flows.len() <= cfg.l + out.assignment.effective_k());
//! ```

pub mod cli;
pub mod document;
pub mod dot;
pub mod error;
pub mod graph;
pub mod labeling;
pub mod metrics;
pub mod oracle;
pub mod pruning;
pub mod service;
pub mod settings;
pub mod similarity;
pub mod summarize;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
