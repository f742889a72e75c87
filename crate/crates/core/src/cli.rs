//! Command-line front end: `extract`, `summarize`, `verify` and `serve`.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::document::{summarize_document, to_dot, DocumentOptions, LabelMode};
use crate::error::{Error, Result};
use crate::graph::{
    load_author_map, load_graph_files, maximal_influence_graph, project_author_graph, reverse_edges,
    write_graph_dir, InfluenceGraph, LoadOptions,
};
use crate::labeling::Stopwords;
use crate::service::{serve, AppState};
use crate::settings::{env_settings, load_settings_file, resolve};
use crate::summarize::SummarizeConfig;
use crate::verify::{run_verification, VerifyOptions};

/// Exit status for invalid input, configuration or I/O failures.
pub const EXIT_ERROR: u8 = 2;
/// Exit status when `verify` finds a failing check.
pub const EXIT_CHECK_FAILED: u8 = 1;

#[derive(Debug, Parser)]
#[command(name = "flowsum", version, about = "Summarize the influence of a node in a directed graph")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the subgraph reachable from a source node.
    Extract(ExtractArgs),
    /// Cluster a graph and write the summary as JSON (and optionally DOT).
    Summarize(SummarizeArgs),
    /// Run the built-in consistency checks.
    Verify(VerifyArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Directory holding `edges.tsv` and, optionally, `meta.jsonl`.
    #[arg(long, conflicts_with_all = ["edges", "meta"])]
    pub input: Option<PathBuf>,
    /// Edge list: `src<TAB>dst[<TAB>weight]` per line.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Node metadata, one JSON object per line.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Reject edges whose endpoints have no metadata record.
    #[arg(long)]
    pub require_meta: bool,
}

impl InputArgs {
    fn load(&self) -> Result<InfluenceGraph> {
        let opts = LoadOptions {
            require_meta: self.require_meta,
        };
        match (&self.input, &self.edges) {
            (Some(dir), _) => {
                let meta = dir.join("meta.jsonl");
                load_graph_files(&dir.join("edges.tsv"), meta.exists().then_some(meta.as_path()), opts)
            }
            (None, Some(edges)) => load_graph_files(edges, self.meta.as_deref(), opts),
            (None, None) => Err(Error::Argument("either --input or --edges is required".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Id of the source node (an author id with --authors).
    #[arg(long)]
    pub source: String,
    /// Reverse every edge first (citation links to influence links).
    #[arg(long)]
    pub reverse: bool,
    /// `paper<TAB>author...` file; extracts from the author-level graph.
    #[arg(long)]
    pub authors: Option<PathBuf>,
    /// Authors with fewer papers are dropped from the projection.
    #[arg(long, default_value_t = 1)]
    pub min_papers: usize,
    /// Output directory for `edges.tsv` and `meta.jsonl`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LabelChoice {
    Keywords,
    Fields,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Summarize the subgraph reachable from this node. Without it the
    /// first node of the input is the source.
    #[arg(long)]
    pub source: Option<String>,
    /// `key = value` settings file, applied before flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Flows kept before recovery; defaults to 2k.
    #[arg(long)]
    pub l: Option<usize>,
    /// bidirectional, forward, backward, simrank, ratio_association, normalized_cut.
    #[arg(long)]
    pub similarity: Option<String>,
    /// Boost pairs sharing this attribute: venue, fields or an extra key.
    #[arg(long)]
    pub augment: Option<String>,
    /// Decay similarity with publication-year distance.
    #[arg(long)]
    pub augment_time: bool,
    #[arg(long)]
    pub lambda_aug: Option<f64>,
    #[arg(long)]
    pub lambda_decay: Option<f64>,
    /// rank or mst.
    #[arg(long)]
    pub prune: Option<String>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Stopword file, one token per line; replaces the built-in list.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Leave full member lists out of the JSON.
    #[arg(long)]
    pub no_members: bool,
    /// JSON output path; standard output when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Also write a Graphviz rendering here.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Label text used in the DOT rendering.
    #[arg(long, value_enum, default_value_t = LabelChoice::Keywords)]
    pub dot_labels: LabelChoice,
    /// Write diagnostics, including stage timings, here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

impl SummarizeArgs {
    fn flag_settings(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut put = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                out.push((key.to_string(), v));
            }
        };
        put("k", self.k.map(|v| v.to_string()));
        put("l", self.l.map(|v| v.to_string()));
        put("similarity", self.similarity.clone());
        put("augment", self.augment.clone());
        put("augment_time", self.augment_time.then(|| "true".to_string()));
        put("lambda_aug", self.lambda_aug.map(|v| v.to_string()));
        put("lambda_decay", self.lambda_decay.map(|v| v.to_string()));
        put("prune", self.prune.clone());
        put("restarts", self.restarts.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("max_iter", self.max_iter.map(|v| v.to_string()));
        put("rel_tol", self.rel_tol.map(|v| v.to_string()));
        out
    }

    /// Defaults, then the settings file, then flags, then `FLOWSUM_*`.
    pub fn resolve_config(&self) -> Result<SummarizeConfig> {
        let file = match &self.config {
            Some(p) => load_settings_file(p)?,
            None => Vec::new(),
        };
        resolve(&[file, self.flag_settings(), env_settings(std::env::vars())])
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Random graphs for the identity checks.
    #[arg(long, default_value_t = 200)]
    pub cases: usize,
    /// Tiny DAGs compared against the exhaustive optimum.
    #[arg(long, default_value_t = 20)]
    pub floor_cases: usize,
    /// Deliberately skew one identity to demonstrate a failing run.
    #[arg(long)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn stopwords(path: Option<&Path>) -> Result<Stopwords> {
    path.map_or_else(|| Ok(Stopwords::default()), Stopwords::from_file)
}

pub fn extract(args: &ExtractArgs, out: &mut dyn Write) -> Result<()> {
    let mut g = args.input.load()?;
    if args.reverse {
        g = reverse_edges(&g);
    }
    if let Some(path) = &args.authors {
        let authors = load_author_map(path)?;
        g = project_author_graph(&g, &authors, args.min_papers)?;
    }
    let sub = maximal_influence_graph(&g, &args.source)?;
    write_graph_dir(&sub, &args.out)?;
    writeln!(out, "nodes: {}", sub.node_count()).map_err(|e| Error::io(&args.out, e))?;
    writeln!(out, "links: {}", sub.edge_count()).map_err(|e| Error::io(&args.out, e))?;
    Ok(())
}

/// Runs the summarization and returns the JSON text that `summarize`
/// writes.
pub fn summarize(args: &SummarizeArgs) -> Result<String> {
    let cfg = args.resolve_config()?;
    cfg.validate(None)?;
    let g = args.input.load()?;
    let g = match &args.source {
        Some(s) => maximal_influence_graph(&g, s)?,
        None => g,
    };
    let opts = DocumentOptions {
        include_members: !args.no_members,
        include_timings: true,
        stopwords: stopwords(args.stopwords.as_deref())?,
        ..Default::default()
    };
    let mut doc = summarize_document(&g, &cfg, &opts)?;
    if let Some(path) = &args.report {
        write_file(path, &serde_json::to_string_pretty(&doc.diagnostics)?)?;
    }
    doc.diagnostics.timings = None;
    for w in &doc.diagnostics.warnings {
        log::warn!("{w}");
    }
    if let Some(path) = &args.dot {
        let mode = match args.dot_labels {
            LabelChoice::Keywords => LabelMode::Keywords,
            LabelChoice::Fields => LabelMode::Fields,
        };
        write_file(path, &to_dot(&doc, mode))?;
    }
    let mut json = doc.to_json_pretty()?;
    json.push('\n');
    if let Some(path) = &args.out {
        write_file(path, &json)?;
    }
    Ok(json)
}

fn serve_blocking(args: &ServeArgs) -> Result<()> {
    let options = DocumentOptions {
        stopwords: stopwords(args.stopwords.as_deref())?,
        ..Default::default()
    };
    let state = Arc::new(AppState::loading(options));
    let addr = SocketAddr::new(args.host, args.port);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::io(Path::new("<runtime>"), e))?;
    let loader_state = Arc::clone(&state);
    let input = InputArgs {
        input: args.input.input.clone(),
        edges: args.input.edges.clone(),
        meta: args.input.meta.clone(),
        require_meta: args.input.require_meta,
    };
    runtime.block_on(async move {
        let loader = tokio::task::spawn_blocking(move || -> Result<()> {
            let g = input.load()?;
            log::info!("loaded {} nodes, {} links", g.node_count(), g.edge_count());
            loader_state.set_graph(g);
            Ok(())
        });
        let server = tokio::spawn(serve(state, addr));
        log::info!("listening on http://{addr}");
        match loader.await {
            Ok(Ok(())) => {}
            Ok(Err(e)) => return Err(e),
            Err(e) => return Err(Error::Validation(format!("graph loader failed: {e}"))),
        }
        match server.await {
            Ok(r) => r.map_err(|e| Error::io(Path::new("<listener>"), e)),
            Err(e) => Err(Error::Validation(format!("server task failed: {e}"))),
        }
    })
}

/// Executes a parsed command line and maps the outcome to an exit status.
pub fn run(cli: Cli) -> ExitCode {
    let result = match &cli.command {
        Command::Extract(a) => extract(a, &mut std::io::stdout()),
        Command::Summarize(a) => summarize(a).map(|json| {
            if a.out.is_none() {
                print!("{json}");
            }
        }),
        Command::Verify(a) => {
            let report = run_verification(VerifyOptions {
                seed: a.seed,
                cases: a.cases,
                floor_cases: a.floor_cases,
                inject_fault: a.inject_fault,
            });
            if report.passed() {
                println!("all {} checks passed", report.checks.len());
                return ExitCode::SUCCESS;
            }
            for f in report.failures() {
                println!("FAILED {}: {}", f.name, f.detail);
            }
            let failed = report.failures().count();
            println!("{failed} of {} checks failed", report.checks.len());
            return ExitCode::from(EXIT_CHECK_FAILED);
        }
        Command::Serve(a) => serve_blocking(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
